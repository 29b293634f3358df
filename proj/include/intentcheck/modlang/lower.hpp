#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "intentcheck/calculus/program.hpp"
#include "intentcheck/interp/module_table.hpp"
#include "intentcheck/modlang/ast.hpp"
#include "intentcheck/modlang/coerce.hpp"

namespace intentcheck::modlang {

using calculus::ElemPathExpr;
using calculus::Expr;
using calculus::Program;

/// One module input as seen by check_args and the lowered body.
struct Param {
  enum class Kind { Required, ChoiceMember, Optional, Defaulted };
  std::string name;
  Type type;
  Kind kind = Kind::Required;
  int group = -1;  // choice group index
  std::optional<Value> default_value;

  /// Sum-encoded inputs arrive as inl(unit) when absent and inr(v) when present.
  bool sum() const { return kind == Kind::ChoiceMember || kind == Kind::Optional; }
};

struct Signature {
  std::string module;
  Type ret = Type::of(Type::Kind::Unit);
  std::vector<Param> params;

  const Param* find(const std::string& n) const {
    for (const auto& p : params)
      if (p.name == n) return &p;
    return nullptr;
  }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& p : params) out.push_back(p.name);
    return out;
  }
};

struct LoweredModule {
  Signature signature;
  interp::ModuleDef def;
};

inline Signature signature_of(const SModule& m) {
  Signature s;
  s.module = m.name;
  s.ret = m.ret;
  int group = 0;
  for (const auto& c : m.clauses) {
    for (const auto& a : c.members) {
      Param p{a.name, a.type, Param::Kind::Required, -1, a.default_value};
      if (c.kind == ArgClause::Kind::Choice) {
        p.kind = Param::Kind::ChoiceMember;
        p.group = group;
      } else if (c.kind == ArgClause::Kind::Optional) {
        p.kind = a.default_value ? Param::Kind::Defaulted : Param::Kind::Optional;
      }
      s.params.push_back(std::move(p));
    }
    if (c.kind == ArgClause::Kind::Choice) ++group;
  }
  return s;
}

class Lowerer {
 public:
  Lowerer(const DeclTable& decls, const SModule& m) : decls_(decls), m_(m), sig_(signature_of(m)) {}

  LoweredModule lower() {
    Scope top;
    for (const auto& p : sig_.params) top[p.name] = p.sum() ? Binding::Sum : Binding::Plain;
    Program body = block(m_.body, top);
    return {sig_, interp::ModuleDef{m_.name, sig_.names(), std::move(body)}};
  }

 private:
  enum class Binding { Plain, Sum };
  using Scope = std::map<std::string, Binding>;

  [[noreturn]] void fail(ErrorCode code, int line, const std::string& msg) const {
    raise(code, m_.name + ":" + std::to_string(line) + ": " + msg);
  }

  std::string temp() { return "_t" + std::to_string(++counter_); }

  static void append(Program& out, Program more) {
    for (auto& s : more) out.push_back(std::move(s));
  }

  Program block(const std::vector<SStmt>& stmts, Scope scope) {
    Program out;
    for (const auto& s : stmts) append(out, statement(s, scope));
    return out;
  }

  Program statement(const SStmt& s, Scope& scope) {
    using namespace calculus;
    Program out;
    switch (s.kind) {
      case SStmt::Kind::Let:
      case SStmt::Kind::Assign: {
        Expr e = expr(*s.expr, scope, out);
        if (s.kind == SStmt::Kind::Assign && !scope.count(s.name)) {
          if (!decls_.attribute(s.name)) fail(ErrorCode::UnboundVariable, s.line, "assignment to undeclared name '" + s.name + "'");
          out.push_back(add_attr({{}, s.name}, std::move(e)));
          return out;
        }
        if (s.kind == SStmt::Kind::Assign && scope[s.name] == Binding::Sum)
          fail(ErrorCode::TypeMismatch, s.line, "cannot assign to optional argument '" + s.name + "' outside a provided test");
        scope[s.name] = Binding::Plain;
        out.push_back(assign(s.name, std::move(e)));
        return out;
      }
      case SStmt::Kind::If: {
        Expr c = expr(*s.expr, scope, out);
        out.push_back(if_(std::move(c), block(s.then_branch, scope), block(s.else_branch, scope)));
        return out;
      }
      case SStmt::Kind::IfProvided: {
        require_sum(s.name, scope, s.line);
        Scope inner = scope;
        inner[s.name] = Binding::Plain;
        Scope other = scope;
        Program no = narrow_partner(s.name, other);
        append(no, block(s.else_branch, other));
        out.push_back(case_(var(s.name), temp(), std::move(no), s.name, block(s.then_branch, inner)));
        return out;
      }
      case SStmt::Kind::IfExists: {
        auto p = path(*s.ref, scope, out);
        auto t = block(s.then_branch, scope);
        auto e = block(s.else_branch, scope);
        out.push_back(s.negated ? exists(std::move(p), std::move(e), std::move(t)) : exists(std::move(p), std::move(t), std::move(e)));
        return out;
      }
      case SStmt::Kind::For: {
        Expr l = expr(*s.expr, scope, out);
        Scope inner = scope;
        inner[s.name] = Binding::Plain;
        out.push_back(foreach(s.name, std::move(l), block(s.then_branch, inner)));
        return out;
      }
      case SStmt::Kind::Touch:
      case SStmt::Kind::Delete: {
        auto p = path(*s.ref, scope, out);
        out.push_back(s.kind == SStmt::Kind::Touch ? add_elem(std::move(p)) : add_not_elem(std::move(p)));
        return out;
      }
      case SStmt::Kind::Write: {
        auto p = path(*s.ref, scope, out);
        Expr e = expr(*s.expr, scope, out);
        out.push_back(add_attr({std::move(p), s.name}, std::move(e)));
        return out;
      }
      case SStmt::Kind::Return: {
        Expr e = s.expr ? expr(*s.expr, scope, out) : lit(Value::unit());
        out.push_back(ret(std::move(e)));
        return out;
      }
      case SStmt::Kind::Fail:
        out.push_back(calculus::fail());
        return out;
    }
    return out;
  }

  void require_sum(const std::string& name, const Scope& scope, int line) const {
    const Param* p = sig_.find(name);
    if (!p || !p->sum()) fail(ErrorCode::TypeMismatch, line, "'" + name + "' is not an optional or choice argument");
    auto it = scope.find(name);
    if (it == scope.end() || it->second != Binding::Sum) fail(ErrorCode::TypeMismatch, line, "'" + name + "' is already known to be provided");
  }

  /// In a two-way choice, the member that was not provided is the one that was.
  Program narrow_partner(const std::string& name, Scope& scope) const {
    const Param* p = sig_.find(name);
    if (p->kind != Param::Kind::ChoiceMember) return {};
    std::vector<const Param*> group;
    for (const auto& q : sig_.params)
      if (q.kind == Param::Kind::ChoiceMember && q.group == p->group && q.name != name) group.push_back(&q);
    if (group.size() != 1) return {};
    auto it = scope.find(group[0]->name);
    if (it == scope.end() || it->second != Binding::Sum) return {};
    it->second = Binding::Plain;
    return {calculus::assign(group[0]->name, calculus::fn("unr", {calculus::var(group[0]->name)}))};
  }

  ElemPathExpr path(const SElemRef& r, const Scope& scope, Program& pre) {
    using namespace calculus;
    ElemPathExpr out;
    for (const auto& seg : r.segments) {
      const ElementDecl* d = decls_.element(seg.label);
      std::vector<Expr> keys;
      for (std::size_t i = 0; i < seg.keys.size(); ++i) keys.push_back(key_expr(*seg.keys[i], d->keys[i], scope, pre));
      Expr k = keys.empty() ? lit(Value::unit()) : keys.back();
      for (std::size_t i = keys.size(); i-- > 1;) k = fn("pair", {keys[i - 1], k});
      out.segments.emplace_back(seg.label, std::move(k));
    }
    return out;
  }

  /// String literals in path-typed key positions become paths so keys compare equal.
  Expr key_expr(const SExpr& e, const Type& t, const Scope& scope, Program& pre) {
    if (e.kind == SExpr::Kind::Lit && t.kind != Type::Kind::Any) return calculus::lit(coerce(e.value, t, decls_, "element key"));
    return expr(e, scope, pre);
  }

  Expr expr(const SExpr& e, const Scope& scope, Program& pre) {
    using namespace calculus;
    switch (e.kind) {
      case SExpr::Kind::Lit:
        return lit(e.value);
      case SExpr::Kind::Name: {
        auto it = scope.find(e.name);
        if (it != scope.end()) {
          if (it->second == Binding::Sum)
            fail(ErrorCode::TypeMismatch, e.line, "optional argument '" + e.name + "' used without a provided test");
          return var(e.name);
        }
        if (decls_.attribute(e.name)) {
          auto t = temp();
          pre.push_back(get(t, {{}, e.name}));
          return var(t);
        }
        fail(ErrorCode::UnboundVariable, e.line, "unknown name '" + e.name + "'");
      }
      case SExpr::Kind::Call:
      case SExpr::Kind::List: {
        std::vector<Expr> args;
        for (const auto& k : e.kids) args.push_back(expr(*k, scope, pre));
        return fn(e.kind == SExpr::Kind::List ? "list" : e.name, std::move(args));
      }
      case SExpr::Kind::Provided:
        require_sum(e.name, scope, e.line);
        return fn("not", {fn("is_inl", {var(e.name)})});
      case SExpr::Kind::Exists: {
        auto p = path(*e.ref, scope, pre);
        auto t = temp();
        pre.push_back(assign(t, lit(Value::boolean(false))));
        pre.push_back(exists(std::move(p), {assign(t, lit(Value::boolean(true)))}, {}));
        return var(t);
      }
      case SExpr::Kind::Read: {
        auto p = path(*e.ref, scope, pre);
        auto t = temp();
        pre.push_back(get(t, {std::move(p), e.name}));
        return var(t);
      }
      case SExpr::Kind::Not:
        return fn("not", {expr(*e.kids[0], scope, pre)});
      case SExpr::Kind::Eq:
      case SExpr::Kind::Neq: {
        Expr l = expr(*e.kids[0], scope, pre);
        Expr r = expr(*e.kids[1], scope, pre);
        return fn(e.kind == SExpr::Kind::Eq ? "eq" : "neq", {std::move(l), std::move(r)});
      }
      case SExpr::Kind::And:
      case SExpr::Kind::Or: {
        const bool is_and = e.kind == SExpr::Kind::And;
        Expr l = expr(*e.kids[0], scope, pre);
        Program rpre;
        Expr r = expr(*e.kids[1], scope, rpre);
        if (rpre.empty()) return fn(is_and ? "and" : "or", {std::move(l), std::move(r)});
        // the right operand reads state, so only evaluate it when it matters
        auto t = temp();
        pre.push_back(assign(t, std::move(l)));
        rpre.push_back(assign(t, std::move(r)));
        if (is_and) pre.push_back(if_(var(t), std::move(rpre), {}));
        else pre.push_back(if_(var(t), {}, std::move(rpre)));
        return var(t);
      }
      case SExpr::Kind::Ternary: {
        auto t = temp();
        const SExpr& c = *e.kids[0];
        if (c.kind == SExpr::Kind::Provided) {
          require_sum(c.name, scope, c.line);
          Scope inner = scope;
          inner[c.name] = Binding::Plain;
          Scope other = scope;
          Program yes, no = narrow_partner(c.name, other);
          Expr a = expr(*e.kids[1], inner, yes);
          yes.push_back(assign(t, std::move(a)));
          Expr b = expr(*e.kids[2], other, no);
          no.push_back(assign(t, std::move(b)));
          pre.push_back(case_(var(c.name), temp(), std::move(no), c.name, std::move(yes)));
          return var(t);
        }
        Expr ce = expr(c, scope, pre);
        Program yes, no;
        Expr a = expr(*e.kids[1], scope, yes);
        yes.push_back(assign(t, std::move(a)));
        Expr b = expr(*e.kids[2], scope, no);
        no.push_back(assign(t, std::move(b)));
        pre.push_back(if_(std::move(ce), std::move(yes), std::move(no)));
        return var(t);
      }
    }
    fail(ErrorCode::SyntaxError, e.line, "malformed expression");
  }

  const DeclTable& decls_;
  const SModule& m_;
  Signature sig_;
  int counter_ = 0;
};

inline LoweredModule lower_module(const SModule& m, const DeclTable& decls) { return Lowerer(decls, m).lower(); }

}  // namespace intentcheck::modlang
