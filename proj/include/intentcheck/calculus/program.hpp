#pragma once

#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "intentcheck/calculus/labels.hpp"
#include "intentcheck/calculus/value.hpp"

namespace intentcheck::calculus {

struct Expr {
  enum class Kind { Var, Lit, Call };

  Kind kind = Kind::Lit;
  std::string name;  // variable name or pure-function name
  Value literal;
  std::vector<Expr> args;

  static Expr var(std::string n) {
    Expr e;
    e.kind = Kind::Var;
    e.name = std::move(n);
    return e;
  }
  static Expr lit(Value v) {
    Expr e;
    e.kind = Kind::Lit;
    e.literal = std::move(v);
    return e;
  }
  static Expr call(std::string fn, std::vector<Expr> args) {
    Expr e;
    e.kind = Kind::Call;
    e.name = std::move(fn);
    e.args = std::move(args);
    return e;
  }

  friend bool operator==(const Expr&, const Expr&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Expr& e) {
    switch (e.kind) {
      case Kind::Var: return os << e.name;
      case Kind::Lit: return os << e.literal;
      case Kind::Call:
        os << e.name << '(';
        for (std::size_t i = 0; i < e.args.size(); ++i) os << (i ? ", " : "") << e.args[i];
        return os << ')';
    }
    return os;
  }
};

struct ElemPathExpr {
  std::vector<std::pair<std::string, Expr>> segments;

  ElemPathExpr() = default;
  ElemPathExpr(std::string label, Expr key) { segments.emplace_back(std::move(label), std::move(key)); }
  ElemPathExpr child(std::string label, Expr key) const {
    ElemPathExpr out = *this;
    out.segments.emplace_back(std::move(label), std::move(key));
    return out;
  }
  bool empty() const { return segments.empty(); }

  friend bool operator==(const ElemPathExpr&, const ElemPathExpr&) = default;
  friend std::ostream& operator<<(std::ostream& os, const ElemPathExpr& p) {
    for (std::size_t i = 0; i < p.segments.size(); ++i) os << (i ? "." : "") << p.segments[i].first << '(' << p.segments[i].second << ')';
    return os;
  }
};

struct AttrPathExpr {
  ElemPathExpr element;
  std::string attribute;

  friend bool operator==(const AttrPathExpr&, const AttrPathExpr&) = default;
  friend std::ostream& operator<<(std::ostream& os, const AttrPathExpr& a) {
    if (!a.element.empty()) os << a.element << '.';
    return os << a.attribute;
  }
};

struct Stmt;
using Program = std::vector<Stmt>;

namespace stmt {
struct Assign {
  std::string var;
  Expr value;
};
struct Call {
  std::string var;
  std::string fn;
  Expr arg;
};
struct Get {
  std::string var;
  AttrPathExpr attr;
};
struct AddAttr {
  AttrPathExpr attr;
  Expr value;
};
struct AddElem {
  ElemPathExpr element;
  bool negated = false;
};
struct Ret {
  Expr value;
};
struct Fail {};
struct If {
  Expr cond;
  Program then_branch;
  Program else_branch;
};
struct Exists {
  ElemPathExpr element;
  Program then_branch;
  Program else_branch;
};
struct Case {
  Expr scrutinee;
  std::string left_var;
  Program left_branch;
  std::string right_var;
  Program right_branch;
};
struct Foreach {
  std::string var;
  Expr list;
  Program body;
};
/// Query-side choice point: with a list, branches once per member as
/// alternatives; without one, binds an existential placeholder.
struct Choose {
  std::string var;
  std::optional<Expr> from;
};
}  // namespace stmt

struct Stmt {
  using Node = std::variant<stmt::Assign, stmt::Call, stmt::Get, stmt::AddAttr, stmt::AddElem, stmt::Ret, stmt::Fail, stmt::If,
                            stmt::Exists, stmt::Case, stmt::Foreach, stmt::Choose>;
  Node node;

  template <typename T>
    requires(!std::is_same_v<std::decay_t<T>, Stmt>)
  Stmt(T n) : node(std::move(n)) {}
};

// Convenience constructors used by the compilers and tests.
inline Stmt assign(std::string var, Expr e) { return stmt::Assign{std::move(var), std::move(e)}; }
inline Stmt call_fn(std::string var, std::string fn, Expr arg) { return stmt::Call{std::move(var), std::move(fn), std::move(arg)}; }
inline Stmt get(std::string var, AttrPathExpr a) { return stmt::Get{std::move(var), std::move(a)}; }
inline Stmt add_attr(AttrPathExpr a, Expr e) { return stmt::AddAttr{std::move(a), std::move(e)}; }
inline Stmt add_elem(ElemPathExpr p) { return stmt::AddElem{std::move(p), false}; }
inline Stmt add_not_elem(ElemPathExpr p) { return stmt::AddElem{std::move(p), true}; }
inline Stmt ret(Expr e) { return stmt::Ret{std::move(e)}; }
inline Stmt fail() { return stmt::Fail{}; }
inline Stmt if_(Expr c, Program t, Program e = {}) { return stmt::If{std::move(c), std::move(t), std::move(e)}; }
inline Stmt exists(ElemPathExpr p, Program t, Program e = {}) { return stmt::Exists{std::move(p), std::move(t), std::move(e)}; }
inline Stmt case_(Expr s, std::string lv, Program l, std::string rv, Program r) {
  return stmt::Case{std::move(s), std::move(lv), std::move(l), std::move(rv), std::move(r)};
}
inline Stmt foreach(std::string var, Expr list, Program body) { return stmt::Foreach{std::move(var), std::move(list), std::move(body)}; }
inline Stmt choose(std::string var, std::optional<Expr> from) { return stmt::Choose{std::move(var), std::move(from)}; }

inline Expr var(std::string n) { return Expr::var(std::move(n)); }
inline Expr lit(Value v) { return Expr::lit(std::move(v)); }
inline Expr fn(std::string name, std::vector<Expr> args) { return Expr::call(std::move(name), std::move(args)); }

inline void print_program(std::ostream& os, const Program& p, int depth = 0);

namespace detail {
struct StmtPrinter {
  std::ostream& os;
  int depth;

  void pad() const {
    for (int i = 0; i < depth; ++i) os << "  ";
  }
  void block(const Program& p) const { print_program(os, p, depth + 1); }

  void operator()(const stmt::Assign& s) const { pad(), os << s.var << " <- " << s.value << '\n'; }
  void operator()(const stmt::Call& s) const { pad(), os << s.var << " <- " << s.fn << '(' << s.arg << ")\n"; }
  void operator()(const stmt::Get& s) const { pad(), os << s.var << " <- get " << s.attr << '\n'; }
  void operator()(const stmt::AddAttr& s) const { pad(), os << "add " << s.attr << " <= " << s.value << '\n'; }
  void operator()(const stmt::AddElem& s) const { pad(), os << "add " << (s.negated ? "!" : "") << s.element << '\n'; }
  void operator()(const stmt::Ret& s) const { pad(), os << "ret " << s.value << '\n'; }
  void operator()(const stmt::Fail&) const { pad(), os << "fail\n"; }
  void operator()(const stmt::If& s) const {
    pad(), os << "if " << s.cond << " then\n";
    block(s.then_branch);
    pad(), os << "else\n";
    block(s.else_branch);
    pad(), os << "end\n";
  }
  void operator()(const stmt::Exists& s) const {
    pad(), os << "exists " << s.element << " then\n";
    block(s.then_branch);
    pad(), os << "else\n";
    block(s.else_branch);
    pad(), os << "end\n";
  }
  void operator()(const stmt::Case& s) const {
    pad(), os << "case " << s.scrutinee << " of L(" << s.left_var << ") =>\n";
    block(s.left_branch);
    pad(), os << "R(" << s.right_var << ") =>\n";
    block(s.right_branch);
    pad(), os << "end\n";
  }
  void operator()(const stmt::Foreach& s) const {
    pad(), os << "foreach " << s.var << " in " << s.list << " do\n";
    block(s.body);
    pad(), os << "end\n";
  }
  void operator()(const stmt::Choose& s) const {
    pad(), os << s.var << " <- choose";
    if (s.from) os << ' ' << *s.from;
    os << '\n';
  }
};
}  // namespace detail

inline void print_program(std::ostream& os, const Program& p, int depth) {
  for (const auto& s : p) std::visit(detail::StmtPrinter{os, depth}, s.node);
}

inline std::string to_string(const Program& p) {
  std::ostringstream os;
  print_program(os, p);
  return os.str();
}

/// Structural checks: every variable is bound before use on every path, labels
/// are registered (when a table is given) and stateful calls resolve.
class ProgramValidator {
 public:
  ProgramValidator(const LabelTable* labels, std::set<std::string> stateful_fns)
      : labels_(labels), stateful_(std::move(stateful_fns)) {}

  void validate(const Program& p, std::set<std::string> bound = {}) const { (void)check_block(p, bound); }

 private:
  // Returns false when the block always terminates.
  bool check_block(const Program& p, std::set<std::string>& bound) const {
    for (const auto& s : p)
      if (!check(s, bound)) return false;
    return true;
  }

  void use(const Expr& e, const std::set<std::string>& bound) const {
    if (e.kind == Expr::Kind::Var && !bound.count(e.name))
      raise(ErrorCode::UnboundVariable, "variable '" + e.name + "' may be used before it is bound");
    for (const auto& a : e.args) use(a, bound);
  }
  void use(const ElemPathExpr& p, const std::set<std::string>& bound) const {
    for (const auto& [label, key] : p.segments) {
      if (labels_) labels_->require_element(label);
      use(key, bound);
    }
  }
  void use(const AttrPathExpr& a, const std::set<std::string>& bound) const {
    use(a.element, bound);
    if (labels_) labels_->require_attribute(a.attribute);
  }

  static std::set<std::string> meet(const std::set<std::string>& a, bool a_live, const std::set<std::string>& b, bool b_live) {
    if (!a_live) return b;
    if (!b_live) return a;
    std::set<std::string> out;
    for (const auto& v : a)
      if (b.count(v)) out.insert(v);
    return out;
  }

  bool check(const Stmt& s, std::set<std::string>& bound) const {
    return std::visit(
        [&](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, stmt::Assign>) {
            use(n.value, bound);
            bound.insert(n.var);
          } else if constexpr (std::is_same_v<T, stmt::Call>) {
            use(n.arg, bound);
            if (!stateful_.count(n.fn)) raise(ErrorCode::UnknownStatefulFunction, "stateful function '" + n.fn + "' is not defined");
            bound.insert(n.var);
          } else if constexpr (std::is_same_v<T, stmt::Get>) {
            use(n.attr, bound);
            bound.insert(n.var);
          } else if constexpr (std::is_same_v<T, stmt::AddAttr>) {
            use(n.attr, bound);
            use(n.value, bound);
          } else if constexpr (std::is_same_v<T, stmt::AddElem>) {
            use(n.element, bound);
          } else if constexpr (std::is_same_v<T, stmt::Ret>) {
            use(n.value, bound);
            return false;
          } else if constexpr (std::is_same_v<T, stmt::Fail>) {
            return false;
          } else if constexpr (std::is_same_v<T, stmt::If> || std::is_same_v<T, stmt::Exists>) {
            if constexpr (std::is_same_v<T, stmt::If>) use(n.cond, bound);
            else use(n.element, bound);
            auto t = bound, e = bound;
            bool tl = check_block(n.then_branch, t), el = check_block(n.else_branch, e);
            bound = meet(t, tl, e, el);
            return tl || el;
          } else if constexpr (std::is_same_v<T, stmt::Case>) {
            use(n.scrutinee, bound);
            auto l = bound, r = bound;
            l.insert(n.left_var);
            r.insert(n.right_var);
            bool ll = check_block(n.left_branch, l), rl = check_block(n.right_branch, r);
            bound = meet(l, ll, r, rl);
            return ll || rl;
          } else if constexpr (std::is_same_v<T, stmt::Foreach>) {
            use(n.list, bound);
            auto inner = bound;
            inner.insert(n.var);
            (void)check_block(n.body, inner);
          } else if constexpr (std::is_same_v<T, stmt::Choose>) {
            if (n.from) use(*n.from, bound);
            bound.insert(n.var);
          }
          return true;
        },
        s.node);
  }

  const LabelTable* labels_;
  std::set<std::string> stateful_;
};

}  // namespace intentcheck::calculus
