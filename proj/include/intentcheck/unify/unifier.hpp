#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "intentcheck/interp/outcome.hpp"
#include "intentcheck/unify/substitution.hpp"

namespace intentcheck::unify {

using calculus::Presence;
using interp::Decision;
using interp::Outcome;

struct Residual {
  AbstractState extra_assumptions;
  AbstractState extra_actions;
  std::vector<std::pair<Value, Value>> extra_constraints;  // program constraints the query never settles

  bool empty() const { return extra_assumptions.empty() && extra_actions.empty() && extra_constraints.empty(); }
};

struct PairMatch {
  std::size_t program_index = 0;
  Substitution sub;
  Residual residual;
};

struct QueryResult {
  std::size_t query_index = 0;
  bool failed_query = false;     // imposes no obligation
  bool selected = false;         // part of the alternative set that decided the verdict
  std::optional<PairMatch> match;
  std::string diagnostic;
};

struct Verdict {
  bool accepted = false;
  std::vector<QueryResult> results;
};

struct MatchOptions {
  bool strict = false;  // reject extra actions on elements the query mentions
};

// ---- value unification ---------------------------------------------------

/// Unifies a query value with a program value. Program symbols bind freely
/// (universal ones only to universal symbols); plain query symbols only match
/// program symbols; existential query placeholders bind to anything.
inline bool unify_value(const Value& q_raw, const Value& p_raw, Substitution& sub) {
  Value q = sub.apply(q_raw);
  Value p = sub.apply(p_raw);
  if (q == p) return true;
  auto is_sym = [](const Value& v) { return v.is(ValueKind::Symbolic); };
  auto program_sym = [&](const Value& v) { return is_sym(v) && !calculus::is_query_symbol(v.symbol_id()); };

  if (is_sym(q) && q.existential()) return sub.bind(q.symbol_id(), p);
  if (is_sym(p) && p.existential()) return sub.bind(p.symbol_id(), q);
  auto same_universe = [&](const Value& a, const Value& b) {
    if (!a.origin() || !b.origin()) return a.origin() == b.origin();
    return unify_value(*a.origin(), *b.origin(), sub);
  };
  if (program_sym(p)) {
    if (p.universal()) return is_sym(q) && q.universal() && same_universe(q, p) && sub.bind(p.symbol_id(), q);
    if (is_sym(q) && q.universal()) return false;
    return sub.bind(p.symbol_id(), q);
  }
  if (program_sym(q)) {  // program values can reach the query side through earlier bindings
    if (q.universal()) return is_sym(p) && p.universal() && same_universe(p, q) && sub.bind(q.symbol_id(), p);
    if (is_sym(p) && p.universal()) return false;
    return sub.bind(q.symbol_id(), p);
  }
  if (is_sym(q) || is_sym(p)) return false;
  if (q.is_textual() && p.is_textual()) return calculus::literal_equal(q, p);
  if (q.kind() != p.kind()) return false;
  switch (q.kind()) {
    case ValueKind::Stuck:
      if (q.fn_name() != p.fn_name()) return false;
      [[fallthrough]];
    case ValueKind::Pair:
    case ValueKind::List:
    case ValueKind::Left:
    case ValueKind::Right: {
      if (q.items().size() != p.items().size()) return false;
      Substitution trial = sub;
      for (std::size_t i = 0; i < q.items().size(); ++i)
        if (!unify_value(q.items()[i], p.items()[i], trial)) return false;
      sub = std::move(trial);
      return true;
    }
    default:
      return calculus::literal_equal(q, p);
  }
}

inline bool unify_path(const ElementPath& q, const ElementPath& p, Substitution& sub) {
  if (q.size() != p.size()) return false;
  Substitution trial = sub;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q.segments[i].label != p.segments[i].label) return false;
    if (!unify_value(q.segments[i].key, p.segments[i].key, trial)) return false;
  }
  sub = std::move(trial);
  return true;
}

namespace detail {

/// One state entry in uniform form.
struct Entry {
  bool is_elem = false;
  ElementPath elem;
  AttributePath attr;
  Presence presence = Presence::Present;
  Value value;

  const ElementPath& element() const { return is_elem ? elem : attr.element; }
  std::string to_string() const {
    std::ostringstream os;
    if (is_elem) os << elem << " = " << (presence == Presence::Present ? "present" : "absent");
    else os << attr << " = " << value;
    return os.str();
  }
};

inline std::vector<Entry> entries(const AbstractState& s) {
  std::vector<Entry> out;
  for (const auto& [p, pr] : s.elems()) out.push_back({true, p, {}, pr, {}});
  for (const auto& [a, v] : s.attrs()) out.push_back({false, {}, a, Presence::Present, v});
  return out;
}

inline Entry apply(const Substitution& sub, const Entry& e) {
  Entry out = e;
  if (e.is_elem) out.elem = sub.apply(e.elem);
  else {
    out.attr = sub.apply(e.attr);
    out.value = sub.apply(e.value);
  }
  return out;
}

inline bool same_key(const Entry& a, const Entry& b) {
  if (a.is_elem != b.is_elem) return false;
  return a.is_elem ? a.elem == b.elem : a.attr == b.attr;
}

inline bool has_open_symbol(const ElementPath& p) {
  bool open = false;
  for (const auto& s : p.segments)
    s.key.for_each_symbol([&](const Value& v) { open = open || !calculus::is_query_symbol(v.symbol_id()) || v.existential(); });
  return open;
}

inline bool unify_key(const Entry& q, const Entry& p, Substitution& sub) {
  if (q.is_elem != p.is_elem) return false;
  if (!q.is_elem && q.attr.attribute != p.attr.attribute) return false;
  return unify_path(q.element(), p.element(), sub);
}

inline bool unify_payload(const Entry& q, const Entry& p, Substitution& sub) {
  if (q.is_elem) return q.presence == p.presence;
  return unify_value(q.value, p.value, sub);
}

inline void add_to(AbstractState& s, const Entry& e) {
  if (e.is_elem) s.set_elem(e.elem, e.presence);
  else s.set_attr(e.attr, e.value);
}

/// Evaluates a program constraint under the substitution and the query's own constraints.
inline std::optional<bool> settle(const Value& form, const Substitution& sub, const std::map<Value, Value>& q_constraints) {
  std::map<Value, Value> qc;
  for (const auto& [k, v] : q_constraints) qc.emplace(sub.apply(k), v);
  std::function<Value(const Value&)> rw = [&](const Value& v) -> Value {
    if (auto it = qc.find(v); it != qc.end()) return it->second;
    if (!v.is(ValueKind::Stuck)) return v;
    std::vector<Value> args;
    for (const auto& a : v.items()) args.push_back(rw(a));
    Value r = calculus::eval_pure(v.fn_name(), std::move(args));
    if (auto it = qc.find(r); it != qc.end()) return it->second;
    return r;
  };
  Value r = rw(sub.apply(form));
  if (r.is(ValueKind::Bool)) return r.bool_value();
  return std::nullopt;
}

class PairMatcher {
 public:
  PairMatcher(const Outcome& q, const Outcome& p, MatchOptions opts) : q_(q), p_(p), opts_(opts) {
    q_init_ = entries(q.initial);
    p_init_ = entries(p.initial);
    q_delta_ = entries(q.delta);
    p_delta_ = entries(p.delta);
    for (const auto& e : q_init_) q_elements_.insert(e.element());
    for (const auto& e : q_delta_) q_elements_.insert(e.element());
    // lists the query loops over
    auto note = [&](const Value& v) {
      if (v.universal() && v.origin()) v.origin()->for_each_symbol([&](const Value& o) { loop_sources_.insert(o.symbol_id()); });
    };
    for (const auto& e : q_delta_) {
      if (!e.is_elem) e.value.for_each_symbol(note);
      for (const auto& seg : e.element().segments) seg.key.for_each_symbol(note);
    }
  }

  std::optional<std::pair<Substitution, Residual>> run() {
    std::vector<bool> residual_init(p_init_.size(), false);
    Substitution sub;
    if (initial(0, sub, residual_init)) return result_;
    return std::nullopt;
  }

 private:
  // Program initial entries: shared keys must agree; others become assumptions.
  bool initial(std::size_t i, Substitution& sub, std::vector<bool>& residual) {
    if (i == p_init_.size()) {
      std::vector<bool> used(p_delta_.size(), false);
      return final(0, sub, residual, used);
    }
    Entry pe = apply(sub, p_init_[i]);
    bool exact_exists = false;
    for (const auto& qr : q_init_) {
      Entry qe = apply(sub, qr);
      if (!same_key(qe, pe)) continue;
      exact_exists = true;
      Substitution trial = sub;
      if (unify_payload(qe, pe, trial) && initial(i + 1, trial, residual)) return true;
    }
    if (exact_exists) return false;
    if (has_open_symbol(pe.element()) || !q_.initial.empty()) {
      for (const auto& qr : q_init_) {
        Entry qe = apply(sub, qr);
        if (!has_open_symbol(qe.element()) && !has_open_symbol(pe.element())) continue;
        Substitution trial = sub;
        if (unify_key(qe, pe, trial) && unify_payload(qe, pe, trial) && initial(i + 1, trial, residual)) return true;
      }
    }
    residual[i] = true;
    bool ok = initial(i + 1, sub, residual);
    residual[i] = false;
    return ok;
  }

  // Query delta entries: each needs its own program delta entry.
  bool final(std::size_t j, Substitution& sub, const std::vector<bool>& residual, std::vector<bool>& used) {
    if (j == q_delta_.size()) return finish(sub, residual, used);
    Entry qe = apply(sub, q_delta_[j]);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < p_delta_.size(); ++k) {
        if (used[k]) continue;
        Entry pe = apply(sub, p_delta_[k]);
        bool exact = same_key(qe, pe);
        if ((pass == 0) != exact) continue;
        Substitution trial = sub;
        if (!exact && !unify_key(qe, pe, trial)) continue;
        if (!unify_payload(qe, pe, trial)) continue;
        used[k] = true;
        bool ok = final(j + 1, trial, residual, used);
        used[k] = false;
        if (ok) return true;
      }
    }
    return false;
  }

  bool finish(const Substitution& sub, const std::vector<bool>& residual, const std::vector<bool>& used) {
    Residual res;
    try {
      for (std::size_t i = 0; i < p_init_.size(); ++i) {
        if (!residual[i]) continue;
        Entry pe = apply(sub, p_init_[i]);
        for (const auto& qr : q_init_) {
          Entry qe = apply(sub, qr);
          if (same_key(qe, pe)) {
            Substitution check = sub;
            if (!unify_payload(qe, pe, check) || !(check.bindings() == sub.bindings())) return false;
          }
        }
        // an assumption may equate state with a query unknown ("the controller file
        // holds what the query expected"), but not with a list the query loops over,
        // otherwise any two loops would match
        bool borrows = false;
        auto check_sym = [&](const Value& v) { borrows = borrows || loop_sources_.count(v.symbol_id()); };
        if (!pe.is_elem) pe.value.for_each_symbol(check_sym);
        for (const auto& seg : pe.element().segments) seg.key.for_each_symbol(check_sym);
        if (borrows) return false;
        add_to(res.extra_assumptions, pe);
      }
      for (std::size_t k = 0; k < p_delta_.size(); ++k) {
        if (used[k]) continue;
        Entry pe = apply(sub, p_delta_[k]);
        if (opts_.strict) {
          for (const auto& qel : q_elements_) {
            auto qa = sub.apply(qel);
            if (qa.is_prefix_of(pe.element()) || pe.element().is_prefix_of(qa)) return false;
          }
        }
        add_to(res.extra_actions, pe);
      }
      for (const auto& [form, val] : p_.constraints) {
        Value k = sub.apply(form);
        if (auto it = q_.constraints.find(k); it != q_.constraints.end()) {
          if (!(it->second == val)) return false;
          continue;
        }
        auto settled = settle(form, sub, q_.constraints);
        if (settled) {
          if (*settled != val.bool_value()) return false;
          continue;
        }
        res.extra_constraints.emplace_back(k, val);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SubstitutionCollision || e.code() == ErrorCode::TypeMismatch) return false;
      throw;
    }
    result_ = std::make_pair(sub, std::move(res));
    return true;
  }

  const Outcome& q_;
  const Outcome& p_;
  MatchOptions opts_;
  std::vector<Entry> q_init_, p_init_, q_delta_, p_delta_;
  std::set<ElementPath> q_elements_;
  std::set<calculus::SymbolId> loop_sources_;
  std::pair<Substitution, Residual> result_;
};

}  // namespace detail

/// Finds a substitution under which `p` realizes `q`, with what `p` does beyond it.
inline std::optional<std::pair<Substitution, Residual>> match_pair(const Outcome& q, const Outcome& p, MatchOptions opts = {}) {
  if (p.failed()) return std::nullopt;
  detail::PairMatcher m(q, p, opts);
  return m.run();
}

namespace detail {

/// Names the query delta entries the closest program outcome does not provide.
inline std::string diagnose(const Outcome& q, const std::vector<Outcome>& programs) {
  auto qd = entries(q.delta);
  std::size_t best_missing = static_cast<std::size_t>(-1);
  std::size_t best = 0;
  std::vector<std::string> best_list;
  for (std::size_t i = 0; i < programs.size(); ++i) {
    if (programs[i].failed()) continue;
    auto pd = entries(programs[i].delta);
    std::vector<std::string> missing;
    for (const auto& qe : qd) {
      bool found = false;
      for (const auto& pe : pd) {
        Substitution s;
        if (unify_key(qe, pe, s) && unify_payload(qe, pe, s)) {
          found = true;
          break;
        }
      }
      if (!found) missing.push_back(qe.to_string());
    }
    if (missing.size() < best_missing) {
      best_missing = missing.size();
      best = i;
      best_list = std::move(missing);
    }
  }
  std::ostringstream os;
  if (best_missing == static_cast<std::size_t>(-1)) {
    os << "every program outcome fails";
    return os.str();
  }
  os << "closest program outcome #" << best;
  if (best_list.empty()) os << " performs the required actions but its initial assumptions or constraints conflict";
  else {
    os << " lacks:";
    for (const auto& m : best_list) os << ' ' << m << ';';
  }
  return os.str();
}

struct TreeNode {
  std::optional<Decision::Kind> kind;  // empty for a leaf
  std::vector<std::size_t> leaves;      // outcome indices (leaf nodes hold exactly one)
  std::map<int, TreeNode> children;
};

inline void insert(TreeNode& root, const Outcome& o, std::size_t idx) {
  TreeNode* n = &root;
  for (const auto& d : o.trace) {
    n->kind = d.kind;
    n = &n->children[d.index];
  }
  n->leaves.push_back(idx);
}

}  // namespace detail

/// Every query path must be realized by some program outcome; query
/// alternatives (Choice forks) need only one realized member.
inline Verdict verify(const std::vector<Outcome>& query, const std::vector<Outcome>& program, MatchOptions opts = {}) {
  Verdict v;
  v.results.resize(query.size());
  for (std::size_t i = 0; i < query.size(); ++i) {
    auto& r = v.results[i];
    r.query_index = i;
    if (query[i].failed()) {
      r.failed_query = true;
      continue;
    }
    for (std::size_t k = 0; k < program.size(); ++k) {
      if (auto m = match_pair(query[i], program[k], opts)) {
        r.match = PairMatch{k, std::move(m->first), std::move(m->second)};
        break;
      }
    }
    if (!r.match) r.diagnostic = detail::diagnose(query[i], program);
  }
  detail::TreeNode root;
  for (std::size_t i = 0; i < query.size(); ++i) detail::insert(root, query[i], i);

  std::function<bool(const detail::TreeNode&, bool)> eval = [&](const detail::TreeNode& n, bool mark) -> bool {
    bool ok = true;
    for (auto idx : n.leaves) {
      bool leaf = v.results[idx].failed_query || v.results[idx].match.has_value();
      ok = ok && leaf;
    }
    if (!n.kind || n.children.empty()) {
      if (mark)
        for (auto idx : n.leaves) v.results[idx].selected = true;
      return ok;
    }
    if (*n.kind == Decision::Kind::Branch) {
      for (const auto& [k, c] : n.children) ok = eval(c, mark) && ok;
      return ok;
    }
    bool any = false;
    for (const auto& [k, c] : n.children) {
      if (!any && eval(c, false)) {
        any = true;
        if (mark) eval(c, true);
      }
    }
    if (!any && mark)  // report every alternative when none works
      for (const auto& [k, c] : n.children) eval(c, true);
    return ok && any;
  };
  v.accepted = eval(root, true);
  if (query.empty()) v.accepted = true;
  return v;
}

}  // namespace intentcheck::unify
