#pragma once

// Random loop-free, call-free state programs over a small fixed universe, and a
// plain concrete interpreter to check the symbolic one against.

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "intentcheck/calculus/program.hpp"
#include "intentcheck/calculus/state.hpp"
#include "intentcheck/interp/outcome.hpp"

namespace intentcheck::testing {

using namespace calculus;

// ---- universe ----------------------------------------------------------------

inline const std::vector<std::string>& file_keys() {
  static const std::vector<std::string> k{"/a", "/b", "/c"};
  return k;
}
inline const std::vector<std::string>& line_keys() {
  static const std::vector<std::string> k{"1", "2"};
  return k;
}
inline const std::vector<std::string>& attr_names() {
  static const std::vector<std::string> k{"owner", "mode"};
  return k;
}
inline const std::vector<std::string>& global_names() {
  static const std::vector<std::string> k{"os", "host"};
  return k;
}
inline const std::vector<std::string>& words() {
  static const std::vector<std::string> k{"root", "alice", "0644", "0755", "Debian", "RedHat"};
  return k;
}

inline ElementPath file_path(const std::string& k) { return ElementPath("file", Value::string(k)); }
inline ElementPath line_path(const std::string& f, const std::string& l) { return file_path(f).child("line", Value::string(l)); }

/// Every element of the universe: files, and lines under "/a".
inline std::vector<ElementPath> universe() {
  std::vector<ElementPath> out;
  for (const auto& f : file_keys()) out.push_back(file_path(f));
  for (const auto& l : line_keys()) out.push_back(line_path("/a", l));
  return out;
}

/// A fully concrete start: every element present or absent, every attribute of
/// a present element and every global set.
inline AbstractState random_seed(std::mt19937& rng) {
  auto coin = [&] { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; };
  auto word = [&] { return Value::string(words()[std::uniform_int_distribution<std::size_t>(0, words().size() - 1)(rng)]); };
  AbstractState s;
  for (const auto& g : global_names()) s.set_attr({{}, g}, word());
  for (const auto& e : universe()) {
    if (e.size() > 1 && s.find_elem(e.prefix(1)) == Presence::Absent) continue;  // covered by the absent parent
    bool present = coin();
    s.set_elem(e, present ? Presence::Present : Presence::Absent);
    if (present)
      for (const auto& a : attr_names()) s.set_attr({e, a}, word());
  }
  return s;
}

// ---- generator ------------------------------------------------------------------

enum class Ty { Str, Bool, Sum };

class ProgramGen {
 public:
  explicit ProgramGen(std::uint32_t seed) : rng_(seed) {}

  Program program() {
    defined_.clear();
    return block(4);
  }

  std::mt19937& rng() { return rng_; }

 private:
  std::size_t roll(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[roll(v.size())];
  }

  // variable names carry one type each, so branches never disagree on it
  static Ty type_of(const std::string& v) { return v[0] == 's' ? Ty::Str : v[0] == 'b' ? Ty::Bool : Ty::Sum; }
  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n{"s0", "s1", "s2", "b0", "b1", "u0"};
    return n;
  }

  std::optional<std::string> defined_var(Ty t) {
    std::vector<std::string> c;
    for (const auto& [n, ty] : defined_)
      if (ty == t) c.push_back(n);
    if (c.empty()) return std::nullopt;
    return pick(c);
  }

  Expr str(int depth) {
    switch (roll(depth > 0 ? 4 : 2)) {
      case 0:
        if (auto v = defined_var(Ty::Str)) return var(*v);
        [[fallthrough]];
      case 1: return lit(Value::string(pick(words())));
      default: return fn("concat", {str(depth - 1), str(depth - 1)});
    }
  }

  Expr boolean(int depth) {
    switch (roll(depth > 0 ? 7 : 2)) {
      case 0:
        if (auto v = defined_var(Ty::Bool)) return var(*v);
        [[fallthrough]];
      case 1: return lit(Value::boolean(roll(2) == 0));
      case 2:
      case 3: return fn(roll(2) ? "eq" : "neq", {str(depth - 1), str(depth - 1)});
      case 4: return fn("not", {boolean(depth - 1)});
      case 5: return fn("and", {boolean(depth - 1), boolean(depth - 1)});
      default: return fn("or", {boolean(depth - 1), boolean(depth - 1)});
    }
  }

  Expr sum(int depth) {
    if (roll(3) == 0)
      if (auto v = defined_var(Ty::Sum)) return var(*v);
    return fn(roll(2) ? "inl" : "inr", {str(depth - 1)});
  }

  Expr of_type(Ty t, int depth) { return t == Ty::Str ? str(depth) : t == Ty::Bool ? boolean(depth) : sum(depth); }

  ElemPathExpr elem() {
    if (roll(3) == 0) return ElemPathExpr("file", lit(Value::string("/a"))).child("line", lit(Value::string(pick(line_keys()))));
    return ElemPathExpr("file", lit(Value::string(pick(file_keys()))));
  }

  AttrPathExpr attr() {
    if (roll(4) == 0) return {{}, pick(global_names())};
    return {elem(), pick(attr_names())};
  }

  Program block(int depth) {
    Program p;
    std::size_t n = 1 + roll(4);
    for (std::size_t i = 0; i < n; ++i) p.push_back(statement(depth));
    return p;
  }

  /// Runs `f` with the defined set restored afterwards: a branch's assignments
  /// are not visible after the branch.
  template <class F>
  Program scoped(F f) {
    auto saved = defined_;
    Program p = f();
    defined_ = std::move(saved);
    return p;
  }

  Stmt statement(int depth) {
    std::size_t k = roll(depth > 1 ? 12 : 8);
    switch (k) {
      case 0:
      case 1: {
        const auto& v = pick(names());
        Expr e = of_type(type_of(v), 2);
        defined_[v] = type_of(v);
        return assign(v, std::move(e));
      }
      case 2: {
        std::string v = roll(2) ? "s0" : "s1";
        auto a = attr();
        defined_[v] = Ty::Str;
        return get(v, std::move(a));
      }
      case 3:
      case 4: return add_attr(attr(), str(1));
      case 5: return add_elem(elem());
      case 6: return add_not_elem(elem());
      case 7:
        if (roll(6) == 0) return roll(2) ? ret(str(1)) : calculus::fail();
        return add_attr(attr(), str(1));
      case 8:
      case 9: {
        Expr c = boolean(2);
        Program t = scoped([&] { return block(depth - 1); });
        Program e = scoped([&] { return block(depth - 1); });
        return if_(std::move(c), std::move(t), std::move(e));
      }
      case 10: {
        auto e = elem();
        Program t = scoped([&] { return block(depth - 1); });
        Program f = scoped([&] { return block(depth - 1); });
        return exists(std::move(e), std::move(t), std::move(f));
      }
      default: {
        Expr s = sum(2);
        Program l = scoped([&] {
          defined_["s2"] = Ty::Str;
          return block(depth - 1);
        });
        Program r = scoped([&] {
          defined_["s2"] = Ty::Str;
          return block(depth - 1);
        });
        return case_(std::move(s), "s2", std::move(l), "s2", std::move(r));
      }
    }
  }

  std::mt19937 rng_;
  std::map<std::string, Ty> defined_;
};

// ---- concrete interpreter -----------------------------------------------------------

struct ConcreteRun {
  bool unseeded = false;  // read a value the seed never fixed; outside the oracle's domain
  interp::Status status = interp::Status::Returned;
  Value result = Value::unit();
  AbstractState delta;
};

/// Runs on one total state. Writes are also recorded as the delta: attribute
/// writes and element adds as given, deletions dropping what was recorded beneath.
class ConcreteInterpreter {
 public:
  explicit ConcreteInterpreter(const AbstractState& seed) {
    for (const auto& [p, pr] : seed.elems()) present_[p] = pr == Presence::Present;
    for (const auto& [a, v] : seed.attrs()) attrs_[a] = v;
  }

  ConcreteRun run(const Program& p) {
    scopes_.assign(1, {});
    try {
      block(p);
    } catch (const Halt&) {
    } catch (const Unseeded&) {
      out_.unseeded = true;
    }
    return out_;
  }

 private:
  struct Halt {};
  struct Unseeded {};

  bool exists(const ElementPath& e) const {
    for (std::size_t n = 1; n <= e.size(); ++n) {
      auto it = present_.find(e.prefix(n));
      if (it == present_.end() || !it->second) return false;
    }
    return true;
  }

  Value lookup(const std::string& v) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(v); f != it->end()) return f->second;
    throw Unseeded{};
  }
  void store(const std::string& v, Value x) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
      if (auto f = it->find(v); f != it->end()) {
        f->second = std::move(x);
        return;
      }
    scopes_.front()[v] = std::move(x);
  }

  Value eval(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Lit: return e.literal;
      case Expr::Kind::Var: return lookup(e.name);
      case Expr::Kind::Call: break;
    }
    std::vector<Value> a;
    for (const auto& x : e.args) a.push_back(eval(x));
    const auto& f = e.name;
    if (f == "eq") return Value::boolean(a[0].text() == a[1].text());
    if (f == "neq") return Value::boolean(a[0].text() != a[1].text());
    if (f == "not") return Value::boolean(!a[0].bool_value());
    if (f == "and") return Value::boolean(a[0].bool_value() && a[1].bool_value());
    if (f == "or") return Value::boolean(a[0].bool_value() || a[1].bool_value());
    if (f == "concat") return Value::string(a[0].text() + a[1].text());
    if (f == "inl") return Value::left(a[0]);
    if (f == "inr") return Value::right(a[0]);
    throw std::logic_error("concrete interpreter: no function " + f);
  }

  ElementPath path(const ElemPathExpr& p) const {
    ElementPath out;
    for (const auto& [label, key] : p.segments) out.segments.push_back({label, eval(key)});
    return out;
  }

  [[noreturn]] void fail() {
    out_.status = interp::Status::Failed;
    throw Halt{};
  }

  void block(const Program& p) {
    for (const auto& s : p) std::visit([&](const auto& n) { step(n); }, s.node);
  }

  void step(const stmt::Assign& n) { store(n.var, eval(n.value)); }

  void step(const stmt::Get& n) {
    AttributePath a{path(n.attr.element), n.attr.attribute};
    if (!a.element.empty() && !exists(a.element)) fail();
    auto it = attrs_.find(a);
    if (it == attrs_.end()) throw Unseeded{};
    store(n.var, it->second);
  }

  // a run cannot write beneath an element it removed
  void step(const stmt::AddAttr& n) {
    AttributePath a{path(n.attr.element), n.attr.attribute};
    Value v = eval(n.value);
    if (out_.delta.absent_prefix(a.element)) fail();
    out_.delta.set_attr(a, v);
    attrs_[a] = v;
  }

  void step(const stmt::AddElem& n) {
    ElementPath e = path(n.element);
    if (n.negated) {
      out_.delta.set_elem(e, Presence::Absent);
      for (auto& [p, pr] : present_)
        if (e.is_prefix_of(p)) pr = false;
      present_[e] = false;
      for (auto it = attrs_.begin(); it != attrs_.end();) {
        if (e.is_prefix_of(it->first.element)) it = attrs_.erase(it);
        else ++it;
      }
      return;
    }
    if (e.size() > 1 && out_.delta.absent_prefix(e.prefix(e.size() - 1))) fail();
    if (out_.delta.find_elem(e) != Presence::Present) out_.delta.set_elem(e, Presence::Present);
    present_[e] = true;
  }

  void step(const stmt::Ret& n) {
    out_.result = eval(n.value);
    throw Halt{};
  }
  void step(const stmt::Fail&) { fail(); }

  void step(const stmt::If& n) { block(eval(n.cond).bool_value() ? n.then_branch : n.else_branch); }

  void step(const stmt::Exists& n) { block(exists(path(n.element)) ? n.then_branch : n.else_branch); }

  void step(const stmt::Case& n) {
    Value v = eval(n.scrutinee);
    bool left = v.is(ValueKind::Left);
    scopes_.push_back({{left ? n.left_var : n.right_var, v.payload()}});
    block(left ? n.left_branch : n.right_branch);
    scopes_.pop_back();
  }

  template <class T>
  void step(const T&) {
    throw std::logic_error("concrete interpreter: loops, choices and calls are out of scope");
  }

  std::map<ElementPath, bool> present_;
  std::map<AttributePath, Value> attrs_;
  std::vector<std::map<std::string, Value>> scopes_;
  ConcreteRun out_;
};

}  // namespace intentcheck::testing
