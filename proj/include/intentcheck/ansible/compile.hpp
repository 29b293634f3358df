#pragma once

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "intentcheck/ansible/playbook.hpp"
#include "intentcheck/calculus/program.hpp"
#include "intentcheck/calculus/state.hpp"
#include "intentcheck/modlang/library.hpp"

namespace intentcheck::ansible {

using calculus::AttributePath;
using calculus::Expr;
using calculus::Program;

inline const std::map<std::string, std::string>& fact_table() {
  static const std::map<std::string, std::string> t{
      {"ansible_os_family", "os_family"},
      {"ansible_distribution", "distribution"},
      {"ansible_hostname", "hostname"},
  };
  return t;
}

/// Ansible fact variable to the global attribute holding it.
inline AttributePath resolve_fact_variable(const std::string& name) {
  auto it = fact_table().find(name);
  if (it == fact_table().end()) raise(ErrorCode::UnknownFactVariable, "fact '" + name + "' is not modelled");
  return {{}, it->second};
}

struct PlayMeta {
  std::string name;
  std::string hosts;
  std::optional<bool> become;
  std::string become_user;
  std::size_t first_task = 0;
  std::size_t task_count = 0;
};

/// The program plus what the state model leaves out (hosts, privilege).
struct CompiledPlaybook {
  Program program;
  std::vector<PlayMeta> plays;
  std::vector<std::string> modules;  // called modules in task order
};

namespace detail {

struct JTok {
  enum class Kind { Name, String, Int, Op, End };
  Kind kind = Kind::End;
  std::string text;
};

inline std::vector<JTok> jinja_lex(const std::string& s) {
  std::vector<JTok> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    JTok t;
    if (c == '\'' || c == '"') {
      t.kind = JTok::Kind::String;
      std::size_t j = i + 1;
      while (j < s.size() && s[j] != c) t.text += s[j++];
      if (j >= s.size()) raise(ErrorCode::SyntaxError, "unterminated string in '" + s + "'");
      i = j + 1;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = JTok::Kind::Int;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) t.text += s[i++];
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      // dotted names and ['key'] subscripts form one operand
      t.kind = JTok::Kind::Name;
      while (i < s.size()) {
        char d = s[i];
        if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '.') {
          t.text += d;
          ++i;
        } else if (d == '[') {
          auto close = s.find(']', i);
          if (close == std::string::npos) raise(ErrorCode::SyntaxError, "unclosed '[' in '" + s + "'");
          std::string key = s.substr(i + 1, close - i - 1);
          if (key.size() >= 2 && (key.front() == '\'' || key.front() == '"')) key = key.substr(1, key.size() - 2);
          t.text += "." + key;
          i = close + 1;
        } else {
          break;
        }
      }
    } else if (s.compare(i, 2, "==") == 0 || s.compare(i, 2, "!=") == 0) {
      t.kind = JTok::Kind::Op;
      t.text = s.substr(i, 2);
      i += 2;
    } else if (c == '(' || c == ')') {
      t.kind = JTok::Kind::Op;
      t.text = std::string(1, c);
      ++i;
    } else if (c == '|') {
      raise(ErrorCode::UnsupportedFeature, "jinja filter in '" + s + "'");
    } else {
      raise(ErrorCode::UnsupportedFeature, std::string("operator '") + c + "' in '" + s + "'");
    }
    out.push_back(std::move(t));
  }
  out.push_back({});
  return out;
}

/// What a name in a `when` or template may refer to while compiling one task.
struct Scope {
  const std::map<std::string, Value>* vars = nullptr;
  const std::set<std::string>* registered = nullptr;
  bool in_loop = false;
  int* counter = nullptr;
};

/// Field accesses on registered results that collapse onto the module's return value.
inline bool result_alias(const std::string& field) { return field.empty() || field == "stat.exists" || field == "files"; }

class JinjaExpr {
 public:
  JinjaExpr(const std::string& text, const Scope& scope, Program& pre) : text_(text), toks_(jinja_lex(text)), scope_(scope), pre_(pre) {}

  Expr parse() {
    Expr e = disj();
    if (peek().kind != JTok::Kind::End) raise(ErrorCode::SyntaxError, "unexpected '" + peek().text + "' in '" + text_ + "'");
    return e;
  }

  Expr operand_only() {
    Expr e = operand();
    if (peek().kind != JTok::Kind::End) raise(ErrorCode::UnsupportedFeature, "template expression '" + text_ + "'");
    return e;
  }

 private:
  const JTok& peek() const { return toks_[pos_]; }
  bool is_word(const char* w) const { return peek().kind == JTok::Kind::Name && peek().text == w; }
  bool is_op(const char* o) const { return peek().kind == JTok::Kind::Op && peek().text == o; }

  Expr disj() {
    Expr l = conj();
    while (is_word("or")) {
      ++pos_;
      l = calculus::fn("or", {l, conj()});
    }
    return l;
  }
  Expr conj() {
    Expr l = neg();
    while (is_word("and")) {
      ++pos_;
      l = calculus::fn("and", {l, neg()});
    }
    return l;
  }
  Expr neg() {
    if (is_word("not")) {
      ++pos_;
      return calculus::fn("not", {neg()});
    }
    return cmp();
  }
  Expr cmp() {
    Expr l = atom();
    if (is_op("==") || is_op("!=")) {
      std::string op = toks_[pos_++].text;
      return calculus::fn(op == "==" ? "eq" : "neq", {l, atom()});
    }
    if (is_word("is") || is_word("in")) raise(ErrorCode::UnsupportedFeature, "'" + peek().text + "' test in '" + text_ + "'");
    return l;
  }
  Expr atom() {
    if (is_op("(")) {
      ++pos_;
      Expr e = disj();
      if (!is_op(")")) raise(ErrorCode::SyntaxError, "missing ')' in '" + text_ + "'");
      ++pos_;
      return e;
    }
    return operand();
  }

  Expr operand() {
    using namespace calculus;
    const JTok t = toks_[pos_++];
    switch (t.kind) {
      case JTok::Kind::String:
        return lit(Value::string(t.text));
      case JTok::Kind::Int:
        return lit(Value::integer(std::stoll(t.text)));
      case JTok::Kind::Name:
        return name(t.text);
      default:
        raise(ErrorCode::SyntaxError, "expected a value in '" + text_ + "'");
    }
  }

  Expr name(const std::string& full) {
    using namespace calculus;
    if (full == "true" || full == "True") return lit(Value::boolean(true));
    if (full == "false" || full == "False") return lit(Value::boolean(false));
    auto dot = full.find('.');
    std::string head = full.substr(0, dot);
    std::string field = dot == std::string::npos ? "" : full.substr(dot + 1);
    if (head == "ansible_facts") return fact("ansible_" + field);
    if (head.rfind("ansible_", 0) == 0) {
      if (!field.empty()) raise(ErrorCode::UnsupportedFeature, "field access on fact '" + full + "'");
      return fact(head);
    }
    if (head == "item") {
      if (!scope_.in_loop) raise(ErrorCode::UnboundVariable, "'item' used outside a loop");
      if (!field.empty() && field != "path") raise(ErrorCode::UnsupportedFeature, "loop item field '" + full + "'");
      return var("item");
    }
    if (scope_.registered->count(head)) {
      if (!result_alias(field)) raise(ErrorCode::UnsupportedFeature, "registered result field '" + full + "'");
      return var(head);
    }
    auto v = scope_.vars->find(head);
    if (v != scope_.vars->end()) {
      if (!field.empty()) raise(ErrorCode::UnsupportedFeature, "field access on variable '" + full + "'");
      return lit(v->second);
    }
    raise(ErrorCode::UnboundVariable, "variable '" + head + "' is not defined");
  }

  Expr fact(const std::string& n) {
    auto a = resolve_fact_variable(n);
    std::string t = "_fact" + std::to_string(++*scope_.counter);
    pre_.push_back(calculus::get(t, {{}, a.attribute}));
    return calculus::var(t);
  }

  std::string text_;
  std::vector<JTok> toks_;
  std::size_t pos_ = 0;
  const Scope& scope_;
  Program& pre_;
};

/// A YAML value with `{{ }}` templates resolved. Literal when nothing is dynamic.
struct Resolved {
  std::optional<Value> literal;
  Expr expr;
};

inline Resolved resolve(const Value& v, const Scope& scope, Program& pre) {
  using namespace calculus;
  if (v.is(ValueKind::List)) {
    std::vector<Resolved> parts;
    bool all = true;
    for (const auto& x : v.items()) {
      parts.push_back(resolve(x, scope, pre));
      all = all && parts.back().literal;
    }
    if (all) {
      std::vector<Value> items;
      for (auto& p : parts) items.push_back(*p.literal);
      Value l = Value::list(std::move(items));
      return {l, lit(l)};
    }
    std::vector<Expr> items;
    for (auto& p : parts) items.push_back(p.expr);
    return {std::nullopt, fn("list", std::move(items))};
  }
  if (!v.is_textual() || v.text().find("{{") == std::string::npos) return {v, lit(v)};

  const std::string& s = v.text();
  std::vector<Expr> pieces;
  std::size_t i = 0;
  while (i < s.size()) {
    auto open = s.find("{{", i);
    if (open == std::string::npos) {
      pieces.push_back(lit(Value::string(s.substr(i))));
      break;
    }
    if (open > i) pieces.push_back(lit(Value::string(s.substr(i, open - i))));
    auto close = s.find("}}", open);
    if (close == std::string::npos) raise(ErrorCode::SyntaxError, "unclosed template in '" + s + "'");
    pieces.push_back(JinjaExpr(s.substr(open + 2, close - open - 2), scope, pre).operand_only());
    i = close + 2;
  }
  if (pieces.size() == 1) {
    if (pieces[0].kind == Expr::Kind::Lit) return {pieces[0].literal, pieces[0]};
    return {std::nullopt, pieces[0]};
  }
  // splice literal pieces together, concat the rest at run time
  bool all = true;
  for (const auto& p : pieces) all = all && p.kind == Expr::Kind::Lit && p.literal.is_textual();
  if (all) {
    std::string joined;
    for (const auto& p : pieces) joined += p.literal.text();
    return {Value::string(joined), lit(Value::string(joined))};
  }
  Expr acc = pieces[0];
  for (std::size_t k = 1; k < pieces.size(); ++k) acc = fn("concat", {acc, pieces[k]});
  return {std::nullopt, acc};
}

}  // namespace detail

class PlaybookCompiler {
 public:
  explicit PlaybookCompiler(const modlang::ModuleLibrary& lib) : lib_(lib) {}

  CompiledPlaybook compile(const PlaybookAst& ast) {
    CompiledPlaybook out;
    for (const auto& play : ast.plays) {
      PlayMeta meta{play.name, play.hosts, play.become, play.become_user, out.modules.size(), play.tasks.size()};
      for (const auto& t : play.tasks) {
        for (auto& s : task(t, play)) out.program.push_back(std::move(s));
        out.modules.push_back(t.module);
      }
      out.plays.push_back(std::move(meta));
    }
    return out;
  }

 private:
  std::string where(const TaskAst& t) const {
    return t.module + " (line " + std::to_string(t.line) + (t.name.empty() ? "" : ", '" + t.name + "'") + ")";
  }

  Program task(const TaskAst& t, const PlayAst& play) {
    using namespace calculus;
    const modlang::Signature* sig = lib_.signature(t.module);
    if (!sig) raise(ErrorCode::UnknownModule, where(t) + ": module '" + t.module + "' is not defined");
    if (!t.register_as.empty() && !t.loop_kind.empty())
      raise(ErrorCode::UnsupportedFeature, where(t) + ": register on a looped task");

    detail::Scope scope{&play.vars, &registered_, !t.loop_kind.empty(), &counter_};
    const std::string res = "_res" + std::to_string(++counter_);

    Program body;
    std::map<std::string, modlang::ArgInput> args;
    for (const auto& [k, v] : t.args) {
      auto r = detail::resolve(v, scope, body);
      args[k] = r.literal ? modlang::ArgInput::of(*r.literal) : modlang::ArgInput::expr(r.expr);
    }
    Expr record;
    try {
      record = lib_.check(t.module, args);
    } catch (const Error& e) {
      raise(e.code(), where(t) + ": " + e.message());
    }
    body.push_back(call_fn(res, t.module, std::move(record)));
    // a module reporting false is a failed task unless errors are ignored
    if (sig->ret.kind == modlang::Type::Kind::Bool && !t.ignore_errors)
      body.push_back(if_(fn("eq", {var(res), lit(Value::boolean(false))}), {fail()}, {}));
    if (!t.register_as.empty()) body.push_back(assign(t.register_as, var(res)));

    if (!t.when.empty()) {
      Program pre;
      Expr cond;
      for (std::size_t i = 0; i < t.when.size(); ++i) {
        Expr c = condition(t.when[i], scope, pre);
        cond = i == 0 ? c : fn("and", {cond, c});
      }
      Program skipped;
      if (!t.register_as.empty()) skipped.push_back(assign(t.register_as, lit(Value::unit())));
      pre.push_back(if_(std::move(cond), std::move(body), std::move(skipped)));
      body = std::move(pre);
    }
    if (!t.register_as.empty()) registered_.insert(t.register_as);

    if (t.loop_kind.empty()) return body;
    Program out;
    detail::Scope outer = scope;
    outer.in_loop = false;
    Expr items = loop_items(t, outer, out);
    out.push_back(foreach("item", std::move(items), std::move(body)));
    return out;
  }

  Expr condition(const std::string& text, const detail::Scope& scope, Program& pre) {
    std::string s = text;
    // `when: "{{ x }}"` is deprecated but still seen
    auto b = s.find_first_not_of(" \t");
    if (b != std::string::npos && s.compare(b, 2, "{{") == 0) {
      auto e = s.rfind("}}");
      s = s.substr(b + 2, e - b - 2);
    }
    return detail::JinjaExpr(s, scope, pre).parse();
  }

  Expr loop_items(const TaskAst& t, const detail::Scope& scope, Program& pre) {
    using namespace calculus;
    if (t.loop_kind != "with_fileglob") {
      auto r = detail::resolve(*t.loop, scope, pre);
      return r.expr;
    }
    // fileglob matches on the controller
    std::vector<Value> patterns = t.loop->is(ValueKind::List) ? t.loop->items() : std::vector<Value>{*t.loop};
    Expr acc;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      auto r = detail::resolve(patterns[i], scope, pre);
      Expr path = r.literal ? lit(Value::path(r.literal->text())) : r.expr;
      std::string tmp = "_glob" + std::to_string(++counter_);
      ElemPathExpr g("dir_glob", fn("pair", {path, lit(Value::enum_member("file_system", "controller"))}));
      pre.push_back(get(tmp, {g, "matches"}));
      acc = i == 0 ? var(tmp) : fn("concat", {acc, var(tmp)});
    }
    return patterns.empty() ? lit(Value::list({})) : acc;
  }

  const modlang::ModuleLibrary& lib_;
  std::set<std::string> registered_;
  int counter_ = 0;
};

inline CompiledPlaybook compile_playbook(const PlaybookAst& ast, const modlang::ModuleLibrary& lib) { return PlaybookCompiler(lib).compile(ast); }

}  // namespace intentcheck::ansible
