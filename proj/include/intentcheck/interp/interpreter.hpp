#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "intentcheck/calculus/labels.hpp"
#include "intentcheck/calculus/program.hpp"
#include "intentcheck/calculus/pure.hpp"
#include "intentcheck/calculus/substitute.hpp"
#include "intentcheck/interp/module_table.hpp"
#include "intentcheck/interp/outcome.hpp"

namespace intentcheck::interp {

using calculus::AttributePath;
using calculus::ElementPath;
using calculus::Presence;
using calculus::Program;
using calculus::SymbolId;
using calculus::ValueKind;
namespace stmt = calculus::stmt;

struct Limits {
  std::size_t max_branches = 4096;
  std::size_t max_steps = 1000000;
};

using Env = std::map<std::string, Value>;

namespace detail {

/// One call frame. scopes[0] holds ordinary variables; loop and case binders push a scope.
struct Frame {
  std::vector<Env> scopes{Env{}};

  const Value* lookup(const std::string& name) const {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
      if (auto f = it->find(name); f != it->end()) return &f->second;
    return nullptr;
  }
  void assign(const std::string& name, Value v) {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
      if (auto f = it->find(name); f != it->end()) {
        f->second = std::move(v);
        return;
      }
    scopes.front()[name] = std::move(v);
  }
};

struct Branch {
  Outcome out;
  std::vector<Frame> frames{Frame{}};
  std::set<ElementPath> deleted;  // elements removed by the program during this run
  bool halted = false;            // ret/fail reached in the current frame
  std::size_t steps = 0;
};

}  // namespace detail

/// Symbolic interpreter over abstract partial states. One instance per run:
/// it owns the symbol source, so query and program runs use separate instances.
class Interpreter {
 public:
  Interpreter(const ModuleTable* modules = nullptr, calculus::SymbolSource symbols = calculus::SymbolSource::for_program(),
              Limits limits = {}, const calculus::PureFnTable* fns = nullptr)
      : modules_(modules), symbols_(symbols), limits_(limits), fns_(fns ? fns : &calculus::PureFnTable::builtin()) {}

  std::vector<Outcome> interpret(const Program& p, const Env& env = {}, const AbstractState& seed = {}) {
    detail::Branch b;
    b.out.initial = seed;
    b.frames.front().scopes.front() = env;
    branches_created_ = 1;
    auto done = exec_block(p, {std::move(b)});
    std::vector<Outcome> outs;
    for (auto& br : done) {
      if (br.out.status == Status::Returned && !br.halted) br.out.result = Value::unit();
      outs.push_back(std::move(br.out));
    }
    return outs;
  }

  calculus::SymbolSource& symbols() { return symbols_; }

 private:
  using Branch = detail::Branch;
  static constexpr const char* kLoopList = "\x01list";
  using Branches = std::vector<Branch>;

  // ---- expressions -------------------------------------------------------

  Value eval(const Branch& b, const calculus::Expr& e) const {
    switch (e.kind) {
      case calculus::Expr::Kind::Var: {
        if (const Value* v = b.frames.back().lookup(e.name)) return *v;
        raise(ErrorCode::UnboundVariable, "variable '" + e.name + "' is unbound");
      }
      case calculus::Expr::Kind::Lit:
        return e.literal;
      case calculus::Expr::Kind::Call: {
        std::vector<Value> args;
        for (const auto& a : e.args) args.push_back(eval(b, a));
        return calculus::eval_pure(*fns_, e.name, std::move(args));
      }
    }
    return Value::unit();
  }

  ElementPath eval_path(const Branch& b, const calculus::ElemPathExpr& p) const {
    ElementPath out;
    for (const auto& [label, key] : p.segments) out.segments.push_back({label, eval(b, key)});
    return out;
  }

  /// Folds recorded constraints into `v`, bottom-up.
  Value rewrite(const Branch& b, const Value& v) const {
    if (b.out.constraints.empty()) return v;
    if (v.is(ValueKind::Symbolic)) {
      auto it = b.out.constraints.find(v);
      return it == b.out.constraints.end() ? v : it->second;
    }
    if (!v.is(ValueKind::Stuck)) return v;
    std::vector<Value> args;
    for (const auto& a : v.items()) args.push_back(rewrite(b, a));
    Value r = calculus::eval_pure(*fns_, v.fn_name(), std::move(args));
    if (r.is(ValueKind::Stuck)) {
      auto it = b.out.constraints.find(r);
      if (it != b.out.constraints.end()) return it->second;
    }
    return r;
  }

  // ---- substitution and assumptions --------------------------------------

  /// Replaces ?sym everywhere in the branch. False when the branch becomes contradictory.
  bool substitute_branch(Branch& b, SymbolId sym, const Value& repl) const {
    auto lookup = [&](const Value& s) -> const Value* { return s.symbol_id() == sym ? &repl : nullptr; };
    auto sub = [&](const Value& v) { return calculus::substitute_with(v, lookup, *fns_); };
    try {
      b.out.initial = calculus::substitute_state(b.out.initial, lookup);
      b.out.delta = calculus::substitute_state(b.out.delta, lookup);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SubstitutionCollision) return false;
      throw;
    }
    b.out.result = sub(b.out.result);
    for (auto& f : b.frames)
      for (auto& scope : f.scopes)
        for (auto& [k, v] : scope) v = sub(v);
    std::set<ElementPath> deleted;
    for (const auto& p : b.deleted) deleted.insert(calculus::substitute_path(p, lookup));
    b.deleted = std::move(deleted);

    std::vector<std::pair<Value, Value>> changed;
    for (auto it = b.out.constraints.begin(); it != b.out.constraints.end();) {
      Value k = sub(it->first);
      if (k == it->first) {
        ++it;
        continue;
      }
      changed.emplace_back(std::move(k), it->second);
      it = b.out.constraints.erase(it);
    }
    for (const auto& [k, v] : changed)
      if (!assume(b, k, v.bool_value())) return false;
    return true;
  }

  static bool substitutable(const Value& v) { return v.is(ValueKind::Symbolic) && !v.universal(); }

  bool record(Branch& b, const Value& form, bool truth) const {
    auto [it, fresh] = b.out.constraints.emplace(form, Value::boolean(truth));
    return fresh || it->second.bool_value() == truth;
  }

  /// Restricts the branch to states where `cond` evaluates to `truth`.
  bool assume(Branch& b, const Value& raw, bool truth) const {
    Value cond = rewrite(b, raw);
    if (cond.is(ValueKind::Bool)) return cond.bool_value() == truth;
    if (cond.is_concrete()) raise(ErrorCode::NonBooleanCondition, "condition evaluated to " + cond.to_string());
    if (cond.is(ValueKind::Symbolic)) {
      if (cond.universal()) return record(b, cond, truth);
      return substitute_branch(b, cond.symbol_id(), Value::boolean(truth));
    }
    const auto& fn = cond.fn_name();
    const auto& args = cond.items();
    if (fn == "not") return assume(b, args[0], !truth);
    if ((fn == "eq" && truth) || (fn == "neq" && !truth)) {
      const Value* s = nullptr;
      const Value* other = nullptr;
      if (substitutable(args[0]) && !args[1].contains_symbol(args[0].symbol_id())) {
        s = &args[0];
        other = &args[1];
      } else if (substitutable(args[1]) && !args[0].contains_symbol(args[1].symbol_id())) {
        s = &args[1];
        other = &args[0];
      }
      if (s) {
        Value target = *s;
        Value repl = *other;
        return substitute_branch(b, target.symbol_id(), repl);
      }
    }
    if ((fn == "and" && truth) || (fn == "or" && !truth)) {
      std::vector<Value> parts = args;
      for (const auto& part : parts)
        if (!assume(b, part, truth)) return false;
      return true;
    }
    return record(b, cond, truth);
  }

  // ---- forking -----------------------------------------------------------

  void note_fork(Branches& alive, Decision::Kind kind, const std::vector<int>& indices, int arity) {
    if (alive.size() > 1)
      for (std::size_t i = 0; i < alive.size(); ++i) alive[i].out.trace.push_back({kind, indices[i], arity});
    branches_created_ += alive.size() > 0 ? alive.size() - 1 : 0;
    if (branches_created_ > limits_.max_branches)
      raise(ErrorCode::ResourceBoundExceeded, "branch count exceeded " + std::to_string(limits_.max_branches));
  }

  /// Splits `b` on a boolean condition: first the then-side, then the else-side.
  std::pair<std::optional<Branch>, std::optional<Branch>> split(Branch b, const Value& cond) {
    Value c = rewrite(b, cond);
    if (c.is(ValueKind::Bool)) {
      if (c.bool_value()) return {std::move(b), std::nullopt};
      return {std::nullopt, std::move(b)};
    }
    if (c.is_concrete()) raise(ErrorCode::NonBooleanCondition, "condition evaluated to " + c.to_string());
    Branch t = b;
    std::optional<Branch> then_b, else_b;
    if (assume(t, c, true)) then_b = std::move(t);
    if (assume(b, c, false)) else_b = std::move(b);
    return {std::move(then_b), std::move(else_b)};
  }

  Branches run_two(std::optional<Branch> a, const Program& pa, std::optional<Branch> b, const Program& pb) {
    Branches alive;
    std::vector<int> idx;
    if (a) {
      alive.push_back(std::move(*a));
      idx.push_back(0);
    }
    if (b) {
      alive.push_back(std::move(*b));
      idx.push_back(1);
    }
    note_fork(alive, Decision::Kind::Branch, idx, 2);
    Branches out;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      auto r = exec_block(idx[i] == 0 ? pa : pb, {std::move(alive[i])});
      for (auto& x : r) out.push_back(std::move(x));
    }
    return out;
  }

  static void fail_branch(Branch& b) {
    b.out.status = Status::Failed;
    b.halted = true;
  }

  // ---- state access ------------------------------------------------------

  static std::optional<Presence> effective(const Branch& b, const ElementPath& p) {
    if (auto d = b.out.delta.find_elem(p)) return d;
    return b.out.initial.find_elem(p);
  }

  /// Created (or recreated) by this run: its attributes were never observed in the initial state.
  static bool program_created(const Branch& b, const ElementPath& e) {
    for (std::size_t n = 1; n <= e.size(); ++n) {
      auto p = e.prefix(n);
      auto d = b.out.delta.find_elem(p);
      if (!d || *d != Presence::Present) continue;
      auto i = b.out.initial.find_elem(p);
      if (!i || *i != Presence::Present || b.deleted.count(p)) return true;
    }
    return false;
  }

  /// False when the path routes through an absent element (the branch fails).
  bool read_attribute(Branch& b, const AttributePath& a, Value& out) {
    // children of a recreated element are gone even if the initial state has them
    for (std::size_t n = 1; n <= a.element.size(); ++n) {
      auto p = a.element.prefix(n);
      auto k = known_exists(b, p);
      if (k && !*k) return false;
      if (!k) b.out.initial.set_elem(p, Presence::Present);
    }
    if (const Value* v = b.out.delta.find_attr(a)) {
      out = *v;
      return true;
    }
    if (!program_created(b, a.element)) {
      if (const Value* v = b.out.initial.find_attr(a)) {
        out = *v;
        return true;
      }
      out = symbols_.fresh();
      b.out.initial.set_attr(a, out);
      return true;
    }
    out = symbols_.fresh();
    b.out.delta.set_attr(a, out);
    return true;
  }

  /// Present/absent status of `e` if already determined by either state.
  static std::optional<bool> known_exists(const Branch& b, const ElementPath& e) {
    for (std::size_t n = 1; n <= e.size(); ++n) {
      auto st = effective(b, e.prefix(n));
      if (st && *st == Presence::Absent) return false;
    }
    if (auto d = b.out.delta.find_elem(e)) return *d == Presence::Present;
    if (program_created(b, e)) return false;
    if (auto i = b.out.initial.find_elem(e)) return *i == Presence::Present;
    return std::nullopt;
  }

  // ---- statements --------------------------------------------------------

  Branches exec_block(const Program& p, Branches in) {
    for (const auto& s : p) {
      Branches next;
      for (auto& b : in) {
        if (b.halted) {
          next.push_back(std::move(b));
          continue;
        }
        if (++b.steps > limits_.max_steps)
          raise(ErrorCode::ResourceBoundExceeded, "step count exceeded " + std::to_string(limits_.max_steps));
        for (auto& r : exec(s, std::move(b))) next.push_back(std::move(r));
      }
      in = std::move(next);
    }
    return in;
  }

  Branches exec(const calculus::Stmt& s, Branch b) {
    return std::visit([&](const auto& n) { return exec_node(n, std::move(b)); }, s.node);
  }

  Branches exec_node(const stmt::Assign& n, Branch b) {
    Value v = eval(b, n.value);
    b.frames.back().assign(n.var, std::move(v));
    return {std::move(b)};
  }

  Branches exec_node(const stmt::Get& n, Branch b) {
    AttributePath a{eval_path(b, n.attr.element), n.attr.attribute};
    Value v;
    if (!read_attribute(b, a, v)) fail_branch(b);
    else b.frames.back().assign(n.var, std::move(v));
    return {std::move(b)};
  }

  Branches exec_node(const stmt::AddAttr& n, Branch b) {
    AttributePath a{eval_path(b, n.attr.element), n.attr.attribute};
    Value v = eval(b, n.value);
    if (!b.out.delta.set_attr(a, std::move(v))) fail_branch(b);
    return {std::move(b)};
  }

  Branches exec_node(const stmt::AddElem& n, Branch b) {
    ElementPath e = eval_path(b, n.element);
    if (n.negated) {
      b.out.delta.set_elem(e, Presence::Absent);
      b.deleted.insert(e);
    } else if (b.out.delta.absent_prefix(e.prefix(e.size() - 1)) && e.size() > 1) {
      fail_branch(b);
    } else {
      auto cur = b.out.delta.find_elem(e);
      if (!cur || *cur != Presence::Present) b.out.delta.set_elem(e, Presence::Present);
    }
    return {std::move(b)};
  }

  Branches exec_node(const stmt::Ret& n, Branch b) {
    b.out.result = eval(b, n.value);
    b.halted = true;
    return {std::move(b)};
  }

  Branches exec_node(const stmt::Fail&, Branch b) {
    fail_branch(b);
    return {std::move(b)};
  }

  Branches exec_node(const stmt::If& n, Branch b) {
    Value c = eval(b, n.cond);
    auto [t, e] = split(std::move(b), c);
    return run_two(std::move(t), n.then_branch, std::move(e), n.else_branch);
  }

  Branches exec_node(const stmt::Exists& n, Branch b) {
    ElementPath e = eval_path(b, n.element);
    if (auto k = known_exists(b, e)) return exec_block(*k ? n.then_branch : n.else_branch, {std::move(b)});
    Branch absent = b;
    for (std::size_t i = 1; i <= e.size(); ++i)
      if (!effective(b, e.prefix(i))) b.out.initial.set_elem(e.prefix(i), Presence::Present);
    absent.out.initial.set_elem(e, Presence::Absent);
    return run_two(std::move(b), n.then_branch, std::move(absent), n.else_branch);
  }

  Branches run_bound(const Program& body, const std::string& var, Value v, Branch b) {
    b.frames.back().scopes.push_back(Env{{var, std::move(v)}});
    auto out = exec_block(body, {std::move(b)});
    for (auto& r : out) r.frames.back().scopes.pop_back();
    return out;
  }

  Branches exec_node(const stmt::Case& n, Branch b) {
    Value v = rewrite(b, eval(b, n.scrutinee));
    if (v.is(ValueKind::Left)) return run_bound(n.left_branch, n.left_var, v.payload(), std::move(b));
    if (v.is(ValueKind::Right)) return run_bound(n.right_branch, n.right_var, v.payload(), std::move(b));
    if (v.is_concrete()) raise(ErrorCode::TypeMismatch, "case over non-sum value " + v.to_string());

    std::optional<Branch> l, r;
    Value lv, rv;
    if (substitutable(v)) {
      Branch lb = b;
      lv = symbols_.fresh();
      rv = symbols_.fresh();
      if (substitute_branch(lb, v.symbol_id(), Value::left(lv))) l = std::move(lb);
      if (substitute_branch(b, v.symbol_id(), Value::right(rv))) r = std::move(b);
    } else {
      Value tag = calculus::eval_pure(*fns_, "is_inl", {v});
      lv = calculus::eval_pure(*fns_, "unl", {v});
      rv = calculus::eval_pure(*fns_, "unr", {v});
      auto [lt, rt] = split(std::move(b), tag);
      l = std::move(lt);
      r = std::move(rt);
    }
    Branches alive;
    std::vector<int> idx;
    if (l) {
      alive.push_back(std::move(*l));
      idx.push_back(0);
    }
    if (r) {
      alive.push_back(std::move(*r));
      idx.push_back(1);
    }
    note_fork(alive, Decision::Kind::Branch, idx, 2);
    Branches out;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      Value bound = idx[i] == 0 ? lv : rv;
      // substitution may have rewritten the scrutinee's payload symbols
      for (auto& x : run_bound(idx[i] == 0 ? n.left_branch : n.right_branch, idx[i] == 0 ? n.left_var : n.right_var,
                               rewrite(alive[i], bound), std::move(alive[i])))
        out.push_back(std::move(x));
    }
    return out;
  }

  Branches exec_node(const stmt::Foreach& n, Branch b) {
    Value list = rewrite(b, eval(b, n.list));
    if (list.is(ValueKind::List)) {
      // held in a hidden scope so substitutions made by earlier iterations reach later items
      const std::size_t count = list.items().size();
      b.frames.back().scopes.push_back(Env{{kLoopList, std::move(list)}});
      Branches cur{std::move(b)};
      for (std::size_t i = 0; i < count; ++i) {
        Branches next;
        for (auto& x : cur) {
          if (x.halted) {
            next.push_back(std::move(x));
            continue;
          }
          Value item = rewrite(x, x.frames.back().lookup(kLoopList)->items()[i]);
          for (auto& r : run_bound(n.body, n.var, std::move(item), std::move(x))) next.push_back(std::move(r));
        }
        cur = std::move(next);
      }
      for (auto& x : cur) x.frames.back().scopes.pop_back();
      return cur;
    }
    if (list.is_concrete()) raise(ErrorCode::NonListIterable, "foreach over " + list.to_string());
    Value elem = Value::member_of(symbols_.fresh(true).symbol_id(), list);
    return run_bound(n.body, n.var, std::move(elem), std::move(b));
  }

  Branches exec_node(const stmt::Choose& n, Branch b) {
    if (!n.from) {
      b.frames.back().assign(n.var, symbols_.fresh(false, /*existential=*/true));
      return {std::move(b)};
    }
    Value list = rewrite(b, eval(b, *n.from));
    if (!list.is(ValueKind::List)) {
      if (list.is_concrete()) raise(ErrorCode::NonListIterable, "choose over " + list.to_string());
      b.frames.back().assign(n.var, symbols_.fresh(false, true));
      return {std::move(b)};
    }
    if (list.items().empty()) {
      fail_branch(b);
      return {std::move(b)};
    }
    Branches alive;
    std::vector<int> idx;
    for (std::size_t i = 0; i < list.items().size(); ++i) {
      Branch x = (i + 1 == list.items().size()) ? std::move(b) : b;
      x.frames.back().assign(n.var, list.items()[i]);
      alive.push_back(std::move(x));
      idx.push_back(static_cast<int>(i));
    }
    note_fork(alive, Decision::Kind::Choice, idx, static_cast<int>(list.items().size()));
    return alive;
  }

  Branches exec_node(const stmt::Call& n, Branch b) {
    if (!modules_) raise(ErrorCode::UnknownStatefulFunction, "no stateful functions available for '" + n.fn + "'");
    const ModuleDef& def = modules_->require(n.fn);
    Value arg = eval(b, n.arg);
    if (!arg.is(ValueKind::List)) raise(ErrorCode::SignatureMismatch, n.fn + ": argument is not a record");
    detail::Frame frame;
    std::set<std::string> seen;
    for (const auto& f : arg.items()) {
      if (!f.is(ValueKind::Pair) || !f.first().is(ValueKind::String)) raise(ErrorCode::SignatureMismatch, n.fn + ": malformed argument record");
      const auto& name = f.first().text();
      if (std::find(def.params.begin(), def.params.end(), name) == def.params.end())
        raise(ErrorCode::SignatureMismatch, n.fn + ": unexpected input '" + name + "'");
      seen.insert(name);
      frame.scopes.front()[name] = f.second();
    }
    for (const auto& p : def.params)
      if (!seen.count(p)) raise(ErrorCode::SignatureMismatch, n.fn + ": missing input '" + p + "'");
    b.frames.push_back(std::move(frame));
    auto saved = b.out.result;
    b.out.result = Value::unit();
    auto done = exec_block(def.body, {std::move(b)});
    for (auto& r : done) {
      Value ret = r.out.result;
      r.frames.pop_back();
      if (r.out.status == Status::Failed) continue;  // stays halted
      r.halted = false;
      r.out.result = saved;
      r.frames.back().assign(n.var, std::move(ret));
    }
    return done;
  }

  const ModuleTable* modules_;
  calculus::SymbolSource symbols_;
  Limits limits_;
  const calculus::PureFnTable* fns_;
  std::size_t branches_created_ = 1;
};

/// Convenience wrapper for a single program run.
inline std::vector<Outcome> interpret(const Program& p, const Env& env = {}, const ModuleTable* modules = nullptr,
                                      calculus::SymbolSource symbols = calculus::SymbolSource::for_program(), Limits limits = {},
                                      const AbstractState& seed = {}) {
  Interpreter in(modules, symbols, limits);
  return in.interpret(p, env, seed);
}

}  // namespace intentcheck::interp
