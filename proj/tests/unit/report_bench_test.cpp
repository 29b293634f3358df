#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

#include "intentcheck/bench/bench.hpp"
#include "intentcheck/report/report.hpp"

using namespace intentcheck;
namespace fs = std::filesystem;

namespace {

const modlang::ModuleLibrary& lib() {
  static const auto l = modlang::ModuleLibrary::from_dir(std::string(INTENTCHECK_DATA_DIR) + "/modules");
  return l;
}

const kb::KnowledgeBase& kbase() {
  static const auto k = kb::KnowledgeBase::load(std::string(INTENTCHECK_DATA_DIR) + "/kb/default.kb");
  return k;
}

std::string bench_file(const std::string& rel) { return report::read_file(std::string(INTENTCHECK_BENCH_DIR) + "/" + rel); }

report::Report verify(const std::string& id, const std::string& playbook) {
  return report::make_report(report::verify_texts(bench_file(id + "/query.fql"), bench_file(id + "/" + playbook), kbase(), lib()));
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("intentcheck-" + tag + "-" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST(Report, CleanAcceptance) {
  auto r = verify("01", "accept/reference.yml");
  EXPECT_TRUE(r.accepted);
  EXPECT_TRUE(r.residual_assumptions.empty() && r.residual_actions.empty() && r.residual_constraints.empty());
  EXPECT_EQ(report::to_human(r).rfind("ACCEPTED (no residual)", 0), 0u);
}

TEST(Report, AssumptionIsListed) {
  auto r = verify("01", "accept/owner_unknown_user.yml");
  ASSERT_TRUE(r.accepted);
  ASSERT_FALSE(r.residual_assumptions.empty());
  bool mentions = false;
  for (const auto& a : r.residual_assumptions) mentions = mentions || a.find("webmaster") != std::string::npos;
  EXPECT_TRUE(mentions);
  EXPECT_NE(report::to_human(r).find("assumes"), std::string::npos);
}

TEST(Report, RejectionExplains) {
  auto r = verify("01", "reject/wrong_path.yml");
  EXPECT_FALSE(r.accepted);
  EXPECT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(report::to_human(r).rfind("REJECTED", 0), 0u);
}

TEST(Report, JsonShape) {
  auto j = report::to_json(verify("12", "accept/reference.yml"), false);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"verdict", "residual_assumptions", "residual_actions", "residual_constraints", "diagnostics", "metadata"}));
  EXPECT_EQ(j["verdict"], "accepted");
  EXPECT_FALSE(j["metadata"].contains("timing_ms"));
  EXPECT_EQ(j["metadata"]["plays"].size(), 1u);
  EXPECT_TRUE(report::to_json(verify("12", "accept/reference.yml"))["metadata"].contains("timing_ms"));
}

TEST(Report, JsonIsDeterministicWithoutTiming) {
  auto a = report::to_json(verify("21", "accept/reference.yml"), false).dump();
  auto b = report::to_json(verify("21", "accept/reference.yml"), false).dump();
  EXPECT_EQ(a, b);
}

TEST(Bench, EmptySuite) {
  TempDir d("empty");
  auto s = bench::run_bench(d.path, kbase(), lib());
  EXPECT_TRUE(s.rows.empty());
  EXPECT_TRUE(s.ok());
  EXPECT_NE(bench::format_table(s, false).find("total"), std::string::npos);
}

TEST(Bench, MalformedSuites) {
  TempDir d("malformed");
  EXPECT_THROW(bench::run_bench(d.path / "missing", kbase(), lib()), Error);
  fs::create_directories(d.path / "01" / "accept");
  try {
    bench::run_bench(d.path, kbase(), lib());
    FAIL() << "expected MalformedSuite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedSuite);
  }
}

TEST(Bench, BadQueryIsAMismatch) {
  TempDir d("badquery");
  write(d.path / "01" / "query.fql", "create frobnicator at \"/x\"\n");
  auto s = bench::run_bench(d.path, kbase(), lib());
  ASSERT_EQ(s.rows.size(), 1u);
  EXPECT_FALSE(s.rows[0].query_error.empty());
  EXPECT_FALSE(s.ok());
}

TEST(Bench, BrokenPlaybookCountsAsRejected) {
  TempDir d("broken");
  write(d.path / "01" / "query.fql", bench_file("01/query.fql"));
  write(d.path / "01" / "reject" / "broken.yml", "- hosts: all\n  tasks:\n    - ansible.builtin.shell: rm -rf /\n");
  auto s = bench::run_bench(d.path, kbase(), lib());
  ASSERT_EQ(s.rows[0].cases.size(), 1u);
  EXPECT_FALSE(s.rows[0].cases[0].accepted);
  EXPECT_FALSE(s.rows[0].cases[0].error.empty());
  EXPECT_TRUE(s.ok());
}

TEST(Mutate, DeterministicAndDistinct) {
  auto ast = ansible::parse_playbook(bench_file("21/accept/reference.yml"));
  auto a = bench::mutate(ast, lib(), 7, 20);
  auto b = bench::mutate(ast, lib(), 7, 20);
  ASSERT_EQ(a.size(), 20u);
  ASSERT_EQ(a.size(), b.size());
  std::set<std::string> seen{bench::to_yaml(ast)};
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(bench::to_yaml(a[i].ast), bench::to_yaml(b[i].ast));
    EXPECT_EQ(a[i].note, b[i].note);
    EXPECT_TRUE(seen.insert(bench::to_yaml(a[i].ast)).second) << a[i].note;
  }
}

TEST(Mutate, YamlRoundTrips) {
  for (const char* id : {"07", "12", "18", "21"}) {
    auto ast = ansible::parse_playbook(bench_file(std::string(id) + "/accept/reference.yml"));
    auto text = bench::to_yaml(ast);
    EXPECT_EQ(bench::to_yaml(ansible::parse_playbook(text)), text) << id;
  }
}

TEST(Mutate, EveryReferenceGetsTwentyAndEveryKindShowsUp) {
  std::set<bench::MutationKind> kinds;
  for (int i = 1; i <= 21; ++i) {
    char id[3];
    std::snprintf(id, sizeof id, "%02d", i);
    auto ast = ansible::parse_playbook(bench_file(std::string(id) + "/accept/reference.yml"));
    auto ms = bench::mutate(ast, lib(), 20240101, 20);
    EXPECT_EQ(ms.size(), 20u) << id;
    for (const auto& m : ms) {
      kinds.insert(m.kind);
      EXPECT_NO_THROW(ansible::compile_playbook(m.ast, lib())) << id << ": " << m.note;
    }
  }
  for (auto k : {bench::MutationKind::PathEdit, bench::MutationKind::CopyDirection, bench::MutationKind::ManagerSwap,
                 bench::MutationKind::PackageName, bench::MutationKind::DropTask, bench::MutationKind::RegexpAnchor})
    EXPECT_TRUE(kinds.count(k)) << bench::to_string(k);
}

TEST(Mutate, FetchTurnsIntoPush) {
  auto ast = ansible::parse_playbook(bench_file("08/accept/reference.yml"));
  std::mt19937 rng(1);
  auto m = bench::detail::copy_direction(ast, rng);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->ast.plays[0].tasks[1].module, "ansible.builtin.copy");
  EXPECT_EQ(m->ast.plays[0].tasks[1].arg("flat"), nullptr);
}

TEST(Mutate, RegexpLosesItsAnchor) {
  auto ast = ansible::parse_playbook(bench_file("10/accept/reference.yml"));
  for (std::uint32_t seed = 0; seed < 8; ++seed) {
    std::mt19937 rng(seed);
    auto m = bench::detail::regexp_anchor(ast, rng);
    ASSERT_TRUE(m);
    const auto* re = m->ast.plays[0].tasks[0].arg("regexp");
    ASSERT_NE(re, nullptr);
    EXPECT_NE(re->text(), ast.plays[0].tasks[0].arg("regexp")->text());
  }
}
