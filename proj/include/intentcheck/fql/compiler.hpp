#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "intentcheck/calculus/program.hpp"
#include "intentcheck/calculus/pure.hpp"
#include "intentcheck/error.hpp"
#include "intentcheck/fql/ast.hpp"
#include "intentcheck/fql/printer.hpp"
#include "intentcheck/kb/knowledge_base.hpp"

namespace intentcheck::fql {

using calculus::AttrPathExpr;
using calculus::ElemPathExpr;
using calculus::Expr;
using calculus::Program;
using calculus::Value;

namespace vocab {
inline Value side(const std::string& s) { return Value::enum_member("file_system", s); }
inline Value file_state(const std::string& s) { return Value::enum_member("file_state", s); }
inline Value manager(const std::string& s) { return Value::enum_member("package_manager", s); }
inline Value service_state(const std::string& s) { return Value::enum_member("service_state", s); }
inline ElemPathExpr file(Expr path, const std::string& where) {
  return ElemPathExpr("file", calculus::fn("pair", {std::move(path), calculus::lit(side(where))}));
}
inline AttrPathExpr attr(ElemPathExpr e, std::string name) { return AttrPathExpr{std::move(e), std::move(name)}; }
inline AttrPathExpr global(std::string name) { return AttrPathExpr{{}, std::move(name)}; }
}  // namespace vocab

/// Lowers a parsed query to a StateProgram. Descriptions resolve through the
/// knowledge base; anything outside the supported verb/description table is an error.
class QueryCompiler {
 public:
  explicit QueryCompiler(const kb::KnowledgeBase& kb) : kb_(kb) {}

  Program compile(const Query& q) {
    Program out;
    for (const auto& s : q.sentences) append(out, sentence(s));
    return out;
  }

  /// Prelude plus boolean expression for a condition.
  std::pair<Program, Expr> condition(const Cond& c) {
    using namespace calculus;
    switch (c.kind) {
      case Cond::Kind::Or:
      case Cond::Kind::And: {
        Program pre;
        std::vector<Expr> parts;
        for (const auto& k : c.kids) {
          auto [p, e] = condition(k);
          append(pre, std::move(p));
          parts.push_back(std::move(e));
        }
        return {std::move(pre), fn(c.kind == Cond::Kind::Or ? "or" : "and", std::move(parts))};
      }
      case Cond::Kind::OsIs:
        return os_condition(c);
      case Cond::Kind::RebootRequired: {
        auto rows = kb_.lookup("condition_file", "reboot required");
        if (rows.empty()) raise(ErrorCode::KbMiss, "condition 'reboot required'");
        return exists_flag(vocab::file(lit(Value::path(rows[0].value)), "remote"), false);
      }
      case Cond::Kind::Exists: {
        Program pre;
        auto target = subject_file(c.subject, pre);
        auto [p, e] = exists_flag(target, c.negated);
        append(pre, std::move(p));
        return {std::move(pre), std::move(e)};
      }
    }
    raise(ErrorCode::SyntaxError, "malformed condition");
  }

 private:
  static void append(Program& out, Program more) {
    for (auto& s : more) out.push_back(std::move(s));
  }

  std::string fresh(const char* stem) { return std::string(stem) + "_" + std::to_string(++counter_); }

  Program sentence(const Sentence& s) {
    Program out;
    for (const auto& item : s) {
      if (item.atom) {
        append(out, atom(*item.atom));
        continue;
      }
      const Conditional& c = *item.cond;
      auto [pre, e] = condition(c.cond);
      append(out, std::move(pre));
      Program otherwise = c.otherwise ? sentence(*c.otherwise) : Program{};
      out.push_back(calculus::if_(std::move(e), sentence(c.then_branch), std::move(otherwise)));
    }
    return out;
  }

  // ---- argument helpers -------------------------------------------------

  [[noreturn]] static void unsupported(const Atom& a, const std::string& why = "") {
    raise(ErrorCode::UnknownVerbDesc, "'" + print(a) + "'" + (why.empty() ? "" : ": " + why));
  }

  static const Arg* arg(const Atom& a, const std::string& sep) {
    for (const auto& x : a.args)
      if (x.sep == sep) return &x;
    return nullptr;
  }

  static const TokenList* binding(const Atom& a, const std::string& key) {
    for (const auto& x : a.args)
      for (const auto& b : x.binds)
        if (b.key == key) return &b.value;
    return nullptr;
  }

  static std::map<std::string, std::string> bindings(const Atom& a) {
    std::map<std::string, std::string> out;
    for (const auto& x : a.args)
      for (const auto& b : x.binds) out[b.key] = join(b.value);
    return out;
  }

  static std::string join(const TokenList& ts) {
    std::string out;
    for (const auto& t : ts) out += (out.empty() ? "" : " ") + t.text;
    return out;
  }

  struct Location {
    std::string side = "remote";
    TokenList value;
  };

  static Location location(const TokenList& ts) {
    Location l;
    std::size_t i = 0;
    if (!ts.empty() && ts[0].kind == ValueToken::Kind::Word && (ts[0].text == "remote" || ts[0].text == "controller")) {
      l.side = ts[0].text;
      i = 1;
    }
    l.value.assign(ts.begin() + static_cast<long>(i), ts.end());
    return l;
  }

  static bool is_path(const TokenList& ts) { return ts.size() == 1 && !ts[0].text.empty() && ts[0].text[0] == '/'; }
  static bool is_placeholder(const TokenList& ts) {
    return ts.size() == 1 && ts[0].kind == ValueToken::Kind::Word && !ts[0].text.empty() && ts[0].text[0] == '?';
  }

  /// A path literal, an existential placeholder, or a kb file description.
  Expr path_expr(const TokenList& ts, const std::map<std::string, std::string>& params, Program& pre, const Atom& a) {
    using namespace calculus;
    if (is_path(ts)) return lit(Value::path(ts[0].text));
    if (is_placeholder(ts)) {
      auto v = fresh("placeholder");
      pre.push_back(choose(v, std::nullopt));
      return var(v);
    }
    if (ts.empty()) unsupported(a, "missing path");
    return lit(Value::path(kb_file(join(ts), params)));
  }

  std::string kb_file(const std::string& key, const std::map<std::string, std::string>& params) {
    auto rows = kb_.lookup("file", key);
    if (rows.empty()) raise(ErrorCode::KbMiss, "file description '" + key + "'");
    return kb::KnowledgeBase::instantiate(rows[0].value, params);
  }

  std::vector<std::string> kb_values(const std::string& category, const std::string& key,
                                     const std::map<std::string, std::string>& params = {}) {
    auto rows = kb_.lookup(category, key);
    if (rows.empty()) raise(ErrorCode::KbMiss, category + " '" + key + "'");
    std::vector<std::string> out;
    for (const auto& r : rows) out.push_back(kb::KnowledgeBase::instantiate(r.value, params));
    return out;
  }

  /// Binds `name` to the single value or to a choice over several.
  static void pick(Program& out, const std::string& name, const std::vector<Value>& vs) {
    using namespace calculus;
    if (vs.size() == 1) out.push_back(assign(name, lit(vs[0])));
    else out.push_back(choose(name, lit(Value::list(vs))));
  }

  static std::vector<Value> strings(const std::vector<std::string>& xs) {
    std::vector<Value> out;
    for (const auto& x : xs) out.push_back(Value::string(x));
    return out;
  }

  // ---- conditions --------------------------------------------------------

  std::pair<Program, Expr> exists_flag(const ElemPathExpr& target, bool negated) {
    using namespace calculus;
    auto t = fresh("present");
    Program pre;
    pre.push_back(assign(t, lit(Value::boolean(false))));
    pre.push_back(exists(target, {assign(t, lit(Value::boolean(true)))}, {}));
    Expr e = var(t);
    if (negated) e = fn("not", {e});
    return {std::move(pre), std::move(e)};
  }

  std::pair<Program, Expr> os_condition(const Cond& c) {
    using namespace calculus;
    auto rows = kb_.lookup("os", c.os.text);
    if (rows.empty()) raise(ErrorCode::KbMiss, "operating system '" + c.os.text + "'");
    const auto& row = rows[0];
    Program pre;
    auto fam = fresh("os");
    pre.push_back(get(fam, vocab::global("os_family")));
    Expr e = fn("eq", {var(fam), lit(Value::string(row.value))});
    if (!c.based && !row.extra.empty()) {
      auto dist = fresh("distribution");
      pre.push_back(get(dist, vocab::global("distribution")));
      e = fn("and", {fn("eq", {var(dist), lit(Value::string(row.extra))}), e});
    }
    return {std::move(pre), std::move(e)};
  }

  /// The file named by a condition subject or an atom description.
  ElemPathExpr subject_file(const Atom& s, Program& pre) {
    using namespace calculus;
    auto params = bindings(s);
    std::string key = s.desc_text();
    if (key == "file" || key == "directory") {
      for (const auto& x : s.args)
        if (!x.has_binds) {
          auto l = location(x.value);
          return vocab::file(path_expr(l.value, params, pre, s), l.side);
        }
      unsupported(s, "no path given");
    }
    return vocab::file(lit(Value::path(kb_file(key, params))), "remote");
  }

  // ---- atoms -------------------------------------------------------------

  Program atom(const Atom& a) {
    const std::string d = a.desc_text();
    const std::string& v = a.verb;
    if (v == "create" && d == "directory") return create_directory(a);
    if (v == "create" && d == "virtual environment") return create_virtualenv(a);
    if (v == "create" && d == "user") return create_user(a);
    if (v == "create" && d == "ssh key") return create_ssh_key(a);
    if (v == "create" && (d == "file" || kb_.has("file", d))) return create_file(a);
    if ((v == "delete" || v == "remove") && (d == "directory" || d == "file")) return delete_path(a);
    if ((v == "delete" || v == "remove") && d == "files") return delete_files(a);
    if ((v == "copy" || v == "move") && d == "files") return copy_glob(a);
    if ((v == "copy" || v == "move") && (d == "file" || kb_.has("file", d))) return copy_file(a, v == "move");
    if (v == "clone" && a.desc.size() == 2 && a.desc[1] == "repository") return clone(a);
    if (v == "set" && a.desc.size() == 3 && a.desc[0] == "environment" && a.desc[1] == "variable") return set_env(a);
    if (v == "set" && d == "file permissions") return set_permissions(a);
    if (v == "set" && d == "default shell") return set_shell(a);
    if (v == "write" && d.empty()) return write_line(a);
    if (v == "reboot" && d.empty() && a.args.empty()) return {calculus::add_elem(ElemPathExpr("reboot", calculus::lit(Value::unit())))};
    if (v == "install") return install(a);
    if (v == "disable" && d == "password") return disable_password(a);
    if (v == "enable" && d == "passwordless sudo") return passwordless_sudo(a);
    if (v == "download" && kb_.has("file", d)) return download(a);
    if ((v == "start" || v == "stop" || v == "restart" || v == "enable" || v == "disable") && !a.desc.empty()) return service(a);
    unsupported(a);
  }

  Program create_directory(const Atom& a) {
    using namespace calculus;
    Program out;
    auto target = subject_file(a, out);
    out.push_back(add_elem(target));
    out.push_back(add_attr(vocab::attr(target, "state"), lit(vocab::file_state("directory"))));
    return out;
  }

  Program create_file(const Atom& a) {
    using namespace calculus;
    Program out;
    ElemPathExpr target;
    if (a.desc_text() == "file") {
      const Arg* at = arg(a, "at");
      if (!at) unsupported(a, "no path given");
      auto l = location(at->value);
      target = vocab::file(path_expr(l.value, {}, out, a), l.side);
    } else {
      target = subject_file(a, out);
    }
    out.push_back(add_elem(target));
    out.push_back(add_attr(vocab::attr(target, "state"), lit(vocab::file_state("file"))));
    if (const TokenList* c = binding(a, "content")) out.push_back(add_attr(vocab::attr(target, "content"), lit(Value::string(join(*c)))));
    return out;
  }

  Program delete_path(const Atom& a) {
    Program out;
    const Arg* at = arg(a, "at");
    if (!at) at = arg(a, "in");
    if (!at) unsupported(a, "no path given");
    auto l = location(at->value);
    out.push_back(calculus::add_not_elem(vocab::file(path_expr(l.value, {}, out, a), l.side)));
    return out;
  }

  Expr glob_list(const Location& l, const std::string& pattern, Program& out, const Atom& a) {
    using namespace calculus;
    if (!is_path(l.value)) unsupported(a, "glob needs a directory path");
    Value pat = eval_pure("path_join", {Value::path(l.value[0].text), Value::string(pattern)});
    auto list = fresh("matches");
    out.push_back(get(list, {ElemPathExpr("dir_glob", lit(Value::pair(pat, vocab::side(l.side)))), "matches"}));
    return var(list);
  }

  Program delete_files(const Atom& a) {
    using namespace calculus;
    Program out;
    const Arg* in = arg(a, "in");
    if (!in) unsupported(a, "no directory given");
    const TokenList* g = binding(a, "glob");
    Expr list = glob_list(location(in->value), g ? join(*g) : "*", out, a);
    auto f = fresh("f");
    out.push_back(foreach(f, list, {add_not_elem(vocab::file(var(f), "remote"))}));
    return out;
  }

  /// exists src then (copy content to dst [; delete src]) else fail
  Program transfer(const ElemPathExpr& src, const ElemPathExpr& dst, bool move) {
    using namespace calculus;
    auto c = fresh("content");
    Program body{get(c, vocab::attr(src, "content")), add_elem(dst), add_attr(vocab::attr(dst, "state"), lit(vocab::file_state("file"))),
                 add_attr(vocab::attr(dst, "content"), var(c))};
    if (move) body.push_back(add_not_elem(src));
    return {exists(src, std::move(body), {fail()})};
  }

  Program copy_file(const Atom& a, bool move) {
    Program out;
    const Arg* to = arg(a, "to");
    if (!to) unsupported(a, "no destination");
    ElemPathExpr src;
    if (a.desc_text() == "file") {
      const Arg* from = arg(a, "from");
      if (!from) unsupported(a, "no source");
      auto l = location(from->value);
      src = vocab::file(path_expr(l.value, {}, out, a), l.side);
    } else {
      src = subject_file(a, out);
    }
    auto l = location(to->value);
    auto dst = vocab::file(path_expr(l.value, bindings(a), out, a), l.side);
    append(out, transfer(src, dst, move));
    return out;
  }

  Program copy_glob(const Atom& a) {
    using namespace calculus;
    Program out;
    const Arg* from = arg(a, "from");
    const Arg* to = arg(a, "to");
    const TokenList* g = binding(a, "glob");
    if (!from || !to || !g) unsupported(a, "needs glob, source and destination");
    auto sl = location(from->value);
    auto dl = location(to->value);
    if (!is_path(dl.value)) unsupported(a, "destination must be a directory path");
    Expr list = glob_list(sl, join(*g), out, a);
    auto f = fresh("f");
    auto dst = vocab::file(fn("path_join", {lit(Value::path(dl.value[0].text)), fn("basename", {var(f)})}), dl.side);
    out.push_back(foreach(f, list, transfer(vocab::file(var(f), sl.side), dst, a.verb == "move")));
    return out;
  }

  Program clone(const Atom& a) {
    using namespace calculus;
    Program out;
    const TokenList* name = binding(a, "name");
    const Arg* into = arg(a, "into");
    if (!name || !into) unsupported(a, "needs name and destination");
    std::string via = "https";
    if (const Arg* v = arg(a, "via")) via = join(v->value);
    auto urls = kb_values("repo_url", a.desc[0] + " " + via, {{"name", join(*name)}});
    auto l = location(into->value);
    auto target = vocab::file(path_expr(l.value, {}, out, a), l.side);
    auto url = fresh("repo");
    pick(out, url, strings(urls));
    out.push_back(add_elem(target));
    out.push_back(add_attr(vocab::attr(target, "state"), lit(vocab::file_state("directory"))));
    out.push_back(add_attr(vocab::attr(target, "repo"), var(url)));
    if (const TokenList* b = binding(a, "branch")) out.push_back(add_attr(vocab::attr(target, "version"), lit(Value::string(join(*b)))));
    return out;
  }

  /// exists path then content = line_in_file(content, regexp, line, position) else fail
  Program edit_lines(const std::string& path, const std::vector<std::string>& regexps, const std::vector<std::string>& lines,
                     const std::string& position) {
    using namespace calculus;
    auto target = vocab::file(lit(Value::path(path)), "remote");
    auto old = fresh("lines");
    auto rx = fresh("regexp");
    auto ln = fresh("line");
    Program body{get(old, vocab::attr(target, "content"))};
    pick(body, rx, strings(regexps));
    pick(body, ln, strings(lines));
    body.push_back(
        add_attr(vocab::attr(target, "content"), fn("line_in_file", {var(old), var(rx), var(ln), lit(Value::string(position))})));
    return {exists(target, std::move(body), {fail()})};
  }

  Program set_env(const Atom& a) {
    const Arg* to = arg(a, "to");
    if (!to) unsupported(a, "no value");
    std::map<std::string, std::string> params{{"name", a.desc[2]}, {"value", join(to->value)}};
    return edit_lines(kb_file("environment file", {}), kb_values("env_regexp", "environment variable", params),
                      kb_values("env_line", "environment variable", params), "EOF");
  }

  Program write_line(const Atom& a) {
    std::string text;
    std::string file;
    std::string position = "EOF";
    auto params = bindings(a);
    for (const auto& x : a.args) {
      if (x.sep.empty() && !x.has_binds) text = join(x.value);
      if (x.sep == "to" && !x.has_binds) file = join(x.value);
    }
    if (text.empty() || file.empty()) unsupported(a, "needs a line and a file");
    if (auto it = params.find("position"); it != params.end()) position = kb_values("position", it->second)[0];
    std::string path = file[0] == '/' ? file : kb_file(file, params);
    return edit_lines(path, {""}, {text}, position);
  }

  Program set_permissions(const Atom& a) {
    using namespace calculus;
    Program out;
    const Arg* in = arg(a, "in");
    const Arg* to = arg(a, "to");
    if (!in || !to || !to->has_binds) unsupported(a, "needs a path and permission bindings");
    auto l = location(in->value);
    auto target = vocab::file(path_expr(l.value, {}, out, a), l.side);
    std::string key = print(Arg{"", true, to->binds, {}});
    auto m = fresh("mode");
    pick(out, m, strings(kb_values("permissions", key)));
    out.push_back(add_attr(vocab::attr(target, "mode"), var(m)));
    return out;
  }

  Program create_virtualenv(const Atom& a) {
    using namespace calculus;
    Program out;
    const Arg* in = arg(a, "in");
    if (!in) in = arg(a, "at");
    if (!in) unsupported(a, "no path");
    auto env = ElemPathExpr("virtualenv", path_expr(location(in->value).value, {}, out, a));
    out.push_back(add_elem(env));
    if (const TokenList* py = binding(a, "python")) {
      auto p = fresh("python");
      pick(out, p, strings(kb_values("python", join(*py))));
      out.push_back(add_attr(vocab::attr(env, "python"), var(p)));
    }
    return out;
  }

  Program create_user(const Atom& a) {
    using namespace calculus;
    const TokenList* name = binding(a, "name");
    if (!name) unsupported(a, "no user name");
    ElemPathExpr u("user", lit(Value::string(join(*name))));
    Program out{add_elem(u)};
    for (const auto& key : {"supplemental groups", "groups"})
      if (const TokenList* g = binding(a, key)) {
        std::vector<Value> gs;
        for (const auto& t : *g) gs.push_back(Value::string(t.text));
        out.push_back(add_attr(vocab::attr(u, "groups"), lit(Value::list(gs))));
        break;
      }
    return out;
  }

  Program create_ssh_key(const Atom& a) {
    using namespace calculus;
    auto params = bindings(a);
    if (!params.count("name")) params["name"] = "id_rsa";
    auto target = vocab::file(lit(Value::path(kb_file("ssh key", params))), "remote");
    return {add_elem(target), add_attr(vocab::attr(target, "state"), lit(vocab::file_state("file")))};
  }

  Program set_shell(const Atom& a) {
    using namespace calculus;
    const TokenList* user = binding(a, "user");
    const Arg* to = arg(a, "to");
    if (!user || !to) unsupported(a, "needs user and shell");
    ElemPathExpr u("user", lit(Value::string(join(*user))));
    Program out{add_elem(u)};
    auto sh = fresh("shell");
    std::string shell = join(to->value);
    if (is_path(to->value)) pick(out, sh, {Value::string(shell)});
    else pick(out, sh, strings(kb_values("shell", shell)));
    out.push_back(add_attr(vocab::attr(u, "shell"), var(sh)));
    return out;
  }

  Program disable_password(const Atom& a) {
    using namespace calculus;
    const TokenList* user = binding(a, "user");
    if (!user) unsupported(a, "no user");
    ElemPathExpr u("user", lit(Value::string(join(*user))));
    return {add_elem(u), add_attr(vocab::attr(u, "password_locked"), lit(Value::boolean(true)))};
  }

  Program passwordless_sudo(const Atom& a) {
    auto params = bindings(a);
    if (!params.count("group")) unsupported(a, "no group");
    return edit_lines(kb_file("sudoers file", {}), kb_values("sudoers_regexp", "passwordless sudo", params),
                      kb_values("sudoers_line", "passwordless sudo", params), "EOF");
  }

  Program download(const Atom& a) {
    using namespace calculus;
    Program out;
    const Arg* from = arg(a, "from");
    if (!from) unsupported(a, "no url");
    auto target = subject_file(a, out);
    auto c = fresh("content");
    out.push_back(get(c, {ElemPathExpr("url", lit(Value::string(join(from->value)))), "content"}));
    out.push_back(add_elem(target));
    out.push_back(add_attr(vocab::attr(target, "state"), lit(vocab::file_state("file"))));
    out.push_back(add_attr(vocab::attr(target, "content"), var(c)));
    return out;
  }

  /// os <- os_family; if eq(os, F1) then body(F1) else if ... else fail
  template <typename Body>
  Program per_family(const std::vector<std::string>& families, Body body) {
    using namespace calculus;
    auto os = fresh("os");
    Program chain{fail()};
    for (auto it = families.rbegin(); it != families.rend(); ++it)
      chain = {if_(fn("eq", {var(os), lit(Value::string(*it))}), body(*it), std::move(chain))};
    Program out{get(os, vocab::global("os_family"))};
    append(out, std::move(chain));
    return out;
  }

  Program install(const Atom& a) {
    using namespace calculus;
    const std::string key = a.desc_text();
    if (key.empty()) unsupported(a, "nothing to install");
    const TokenList* version = binding(a, "version");
    std::optional<std::string> ver;
    if (version) ver = kb_values("version", join(*version))[0];

    const Arg* at = arg(a, "at");
    const Arg* in = arg(a, "in");
    if (in && join(in->value) == "virtual environment") {
      if (!at) unsupported(a, "virtual environment needs a path");
      Program out;
      auto env = ElemPathExpr("virtualenv", path_expr(location(at->value).value, {}, out, a));
      auto n = fresh("package");
      pick(out, n, strings(kb_values("pip_package", key)));
      auto pkg = env.child("package", var(n));
      out.push_back(add_elem(pkg));
      if (ver) out.push_back(add_attr(vocab::attr(pkg, "version"), lit(Value::string(*ver))));
      return out;
    }

    auto families = kb_.families("package", key);
    if (families.empty()) raise(ErrorCode::KbMiss, "package '" + key + "'");
    return per_family(families, [&](const std::string& fam) {
      std::vector<Value> choices;
      for (const auto& r : kb_.lookup("package", key, fam))
        if (r.os == fam) choices.push_back(Value::pair(Value::string(r.value), vocab::manager(r.extra)));
      Program body;
      auto c = fresh("package");
      pick(body, c, choices);
      auto pkg = ElemPathExpr("package", fn("fst", {var(c)}));
      body.push_back(add_elem(pkg));
      body.push_back(add_attr(vocab::attr(pkg, "manager"), fn("snd", {var(c)})));
      if (ver) body.push_back(add_attr(vocab::attr(pkg, "version"), lit(Value::string(*ver))));
      return body;
    });
  }

  Program service(const Atom& a) {
    using namespace calculus;
    auto words = a.desc;
    if (words.size() > 1 && words.back() == "service") words.pop_back();
    std::string key;
    for (const auto& w : words) key += (key.empty() ? "" : " ") + w;
    if (!kb_.has("service", key)) raise(ErrorCode::KbMiss, "service '" + key + "'");

    auto effect = [&](const Expr& name) {
      ElemPathExpr s("service", name);
      Program body{add_elem(s)};
      const std::string& v = a.verb;
      if (v == "enable" || v == "disable") body.push_back(add_attr(vocab::attr(s, "enabled"), lit(Value::boolean(v == "enable"))));
      else body.push_back(add_attr(vocab::attr(s, "state"), lit(vocab::service_state(v == "start" ? "started" : v == "stop" ? "stopped" : "restarted"))));
      return body;
    };
    auto families = kb_.families("service", key);
    if (families.empty()) {
      Program out;
      auto n = fresh("service");
      pick(out, n, strings(kb_values("service", key)));
      append(out, effect(var(n)));
      return out;
    }
    return per_family(families, [&](const std::string& fam) {
      std::vector<std::string> names;
      for (const auto& r : kb_.lookup("service", key, fam)) names.push_back(r.value);
      Program body;
      auto n = fresh("service");
      pick(body, n, strings(names));
      append(body, effect(var(n)));
      return body;
    });
  }

  const kb::KnowledgeBase& kb_;
  int counter_ = 0;
};

inline Program compile_query(const Query& q, const kb::KnowledgeBase& kb) { return QueryCompiler(kb).compile(q); }

inline std::pair<Program, Expr> compile_condition(const Cond& c, const kb::KnowledgeBase& kb) { return QueryCompiler(kb).condition(c); }

}  // namespace intentcheck::fql
