#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "intentcheck/fql/parser.hpp"
#include "intentcheck/fql/printer.hpp"

using namespace intentcheck;
using namespace intentcheck::fql;

namespace {
std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> bench_queries() {
  std::vector<std::string> out;
  for (int i = 1; i <= 21; ++i) {
    char dir[8];
    std::snprintf(dir, sizeof dir, "%02d", i);
    out.push_back(slurp(std::filesystem::path(INTENTCHECK_BENCH_DIR) / dir / "query.fql"));
  }
  return out;
}
}  // namespace

TEST(FqlParse, Empty) {
  EXPECT_TRUE(parse_query("").sentences.empty());
  EXPECT_TRUE(parse_query("  \n ").sentences.empty());
}

TEST(FqlParse, MoveFromRemote) {
  auto q = parse_query("move file from remote \"/scratch/file.txt\" to remote \"/home/user/data.txt\"");
  ASSERT_EQ(q.sentences.size(), 1u);
  ASSERT_EQ(q.sentences[0].size(), 1u);
  const Atom& a = *q.sentences[0][0].atom;
  EXPECT_EQ(a.verb, "move");
  EXPECT_EQ(a.desc, std::vector<std::string>{"file"});
  ASSERT_EQ(a.args.size(), 2u);
  EXPECT_EQ(a.args[0].sep, "from");
  EXPECT_EQ(print(a.args[0].value), "remote \"/scratch/file.txt\"");
  EXPECT_EQ(a.args[1].sep, "to");
  EXPECT_EQ(a.args[1].value.back().kind, ValueToken::Kind::String);
}

TEST(FqlParse, ZshSentence) {
  auto q = parse_query(
      "install zsh; set default shell for user=\"dev\" to zsh; if zsh configuration file for user=\"dev\" not exists then "
      "create zsh configuration file for user=\"dev\"");
  ASSERT_EQ(q.sentences.size(), 1u);
  const auto& s = q.sentences[0];
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].atom->desc_text(), "zsh");
  EXPECT_EQ(s[1].atom->desc_text(), "default shell");
  ASSERT_TRUE(s[2].cond);
  const Cond& c = s[2].cond->cond;
  EXPECT_EQ(c.kind, Cond::Kind::Exists);
  EXPECT_TRUE(c.negated);
  EXPECT_EQ(c.subject.desc_text(), "zsh configuration file");
  ASSERT_EQ(c.subject.args.size(), 1u);
  EXPECT_EQ(c.subject.args[0].binds[0].key, "user");
  EXPECT_EQ(s[2].cond->then_branch.size(), 1u);
}

TEST(FqlParse, Bindings) {
  auto q = parse_query("set file permissions in /srv/path to read=all, write=owner, list directory=all");
  const Atom& a = *q.sentences[0][0].atom;
  ASSERT_EQ(a.args.size(), 2u);
  ASSERT_TRUE(a.args[1].has_binds);
  ASSERT_EQ(a.args[1].binds.size(), 3u);
  EXPECT_EQ(a.args[1].binds[2].key, "list directory");
}

TEST(FqlParse, OsConditions) {
  auto q = parse_query("if os is Debian based or os is RedHat based then install numpy");
  const Cond& c = q.sentences[0][0].cond->cond;
  ASSERT_EQ(c.kind, Cond::Kind::Or);
  ASSERT_EQ(c.kids.size(), 2u);
  EXPECT_TRUE(c.kids[1].based);
  EXPECT_EQ(c.kids[1].os.text, "RedHat");

  auto r = parse_query("if os is Debian and reboot required then reboot");
  const Cond& d = r.sentences[0][0].cond->cond;
  ASSERT_EQ(d.kind, Cond::Kind::And);
  EXPECT_EQ(d.kids[1].kind, Cond::Kind::RebootRequired);
  EXPECT_EQ(r.sentences[0][0].cond->then_branch[0].atom->verb, "reboot");
}

TEST(FqlParse, Otherwise) {
  auto q = parse_query("if os is Debian then install git otherwise install zsh");
  ASSERT_TRUE(q.sentences[0][0].cond->otherwise);
  EXPECT_EQ((*q.sentences[0][0].cond->otherwise)[0].atom->desc_text(), "zsh");
}

TEST(FqlParse, SentencesSplitOnPeriod) {
  auto q = parse_query("install git. install zsh.");
  EXPECT_EQ(q.sentences.size(), 2u);
}

TEST(FqlParse, DottedWordsStayWhole) {
  auto q = parse_query("download file from \"http://x\" to /etc/main.cf");
  EXPECT_EQ(q.sentences[0][0].atom->args[1].value[0].text, "/etc/main.cf");
}

TEST(FqlParse, SyntaxErrorCarriesPosition) {
  try {
    parse_query("install git;\n  frobnicate it");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_NE(std::string(e.what()).find("2:3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("verb"), std::string::npos);
  }
  EXPECT_THROW(parse_query("if os is Debian install git"), Error);
  EXPECT_THROW(parse_query("create file \"unterminated"), Error);
  EXPECT_THROW(parse_query("install git with =x"), Error);
}

TEST(FqlParse, AllBenchmarkQueriesParse) {
  for (const auto& text : bench_queries()) {
    Query q;
    ASSERT_NO_THROW(q = parse_query(text)) << text;
    EXPECT_FALSE(q.sentences.empty());
  }
}

TEST(FqlParse, RoundTrip) {
  for (const auto& text : bench_queries()) {
    auto q = parse_query(text);
    auto printed = print(q);
    EXPECT_EQ(parse_query(printed), q) << printed;
    EXPECT_EQ(print(parse_query(printed)), printed);
  }
}

TEST(FqlParse, SentenceCounts) {
  auto qs = bench_queries();
  EXPECT_EQ(parse_query(qs[17]).sentences.size(), 3u);
  EXPECT_EQ(parse_query(qs[13]).sentences[0].size(), 2u);
}
