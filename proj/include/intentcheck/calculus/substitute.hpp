#pragma once

#include <functional>
#include <map>

#include "intentcheck/calculus/pure.hpp"
#include "intentcheck/calculus/state.hpp"

namespace intentcheck::calculus {

/// Generic rewrite: `lookup` returns a replacement for a symbol or nullptr.
/// Stuck applications re-evaluate once their arguments change.
inline Value substitute_with(const Value& v, const std::function<const Value*(const Value&)>& lookup,
                             const PureFnTable& fns = PureFnTable::builtin()) {
  switch (v.kind()) {
    case ValueKind::Symbolic: {
      const Value* r = lookup(v);
      if (r) return *r;
      if (!v.origin()) return v;
      return Value::member_of(v.symbol_id(), substitute_with(*v.origin(), lookup, fns));
    }
    case ValueKind::Pair:
    case ValueKind::List:
    case ValueKind::Left:
    case ValueKind::Right: {
      Value out = v;
      for (auto& item : out.mutable_items()) item = substitute_with(item, lookup, fns);
      return out;
    }
    case ValueKind::Stuck: {
      std::vector<Value> args;
      bool changed = false;
      for (const auto& a : v.items()) {
        args.push_back(substitute_with(a, lookup, fns));
        changed = changed || !(args.back() == a);
      }
      if (!changed) return v;
      return eval_pure(fns, v.fn_name(), std::move(args));
    }
    default:
      return v;
  }
}

inline Value substitute(const Value& v, SymbolId sym, const Value& repl) {
  return substitute_with(v, [&](const Value& s) -> const Value* { return s.symbol_id() == sym ? &repl : nullptr; });
}

inline ElementPath substitute_path(const ElementPath& p, const std::function<const Value*(const Value&)>& lookup) {
  ElementPath out = p;
  for (auto& seg : out.segments) seg.key = substitute_with(seg.key, lookup);
  return out;
}

/// Rewrites keys and values. Two entries that collapse onto one key with
/// different contents raise SubstitutionCollision.
inline AbstractState substitute_state(const AbstractState& s, const std::function<const Value*(const Value&)>& lookup) {
  AbstractState out;
  std::map<ElementPath, Presence> elems;
  for (const auto& [path, p] : s.elems()) {
    auto np = substitute_path(path, lookup);
    auto [it, fresh] = elems.emplace(np, p);
    if (!fresh && it->second != p) raise(ErrorCode::SubstitutionCollision, "element " + np.to_string() + " bound to both present and absent");
  }
  for (const auto& [path, p] : elems) out.set_elem(path, p);
  for (const auto& [path, v] : s.attrs()) {
    AttributePath np{substitute_path(path.element, lookup), path.attribute};
    Value nv = substitute_with(v, lookup);
    if (const Value* prev = out.find_attr(np)) {
      if (!(*prev == nv)) raise(ErrorCode::SubstitutionCollision, "attribute " + np.to_string() + " bound to " + prev->to_string() + " and " + nv.to_string());
      continue;
    }
    if (!out.set_attr(np, nv)) raise(ErrorCode::SubstitutionCollision, "attribute " + np.to_string() + " lies under an absent element");
  }
  return out;
}

inline AbstractState substitute_state(const AbstractState& s, SymbolId sym, const Value& repl) {
  return substitute_state(s, [&](const Value& v) -> const Value* { return v.symbol_id() == sym ? &repl : nullptr; });
}

}  // namespace intentcheck::calculus
