#pragma once

#include <map>
#include <optional>

#include "intentcheck/calculus/substitute.hpp"

namespace intentcheck::unify {

using calculus::AbstractState;
using calculus::AttributePath;
using calculus::ElementPath;
using calculus::SymbolId;
using calculus::Value;
using calculus::ValueKind;

/// Bindings for program symbols and existential query placeholders.
class Substitution {
 public:
  const std::map<SymbolId, Value>& bindings() const { return map_; }
  bool empty() const { return map_.empty(); }
  const Value* find(SymbolId id) const {
    auto it = map_.find(id);
    return it == map_.end() ? nullptr : &it->second;
  }

  /// Resolves bound symbols transitively. Stuck applications re-evaluate.
  Value apply(const Value& v) const {
    if (map_.empty()) return v;
    return calculus::substitute_with(v, [this](const Value& s) -> const Value* {
      auto it = resolved_.find(s.symbol_id());
      if (it != resolved_.end()) return &it->second;
      auto b = map_.find(s.symbol_id());
      if (b == map_.end()) return nullptr;
      resolved_[s.symbol_id()] = apply(b->second);
      return &resolved_[s.symbol_id()];
    });
  }

  ElementPath apply(const ElementPath& p) const {
    ElementPath out = p;
    for (auto& s : out.segments) s.key = apply(s.key);
    return out;
  }
  AttributePath apply(const AttributePath& a) const { return {apply(a.element), a.attribute}; }

  AbstractState apply(const AbstractState& s) const {
    if (map_.empty()) return s;
    return calculus::substitute_state(s, [this](const Value& sym) -> const Value* {
      if (!find(sym.symbol_id())) return nullptr;
      auto it = resolved_.find(sym.symbol_id());
      if (it == resolved_.end()) it = resolved_.emplace(sym.symbol_id(), apply(map_.at(sym.symbol_id()))).first;
      return &it->second;
    });
  }

  /// Occurs check: refuses cyclic bindings.
  bool bind(SymbolId id, const Value& v) {
    Value target = apply(v);
    if (target.is(ValueKind::Symbolic) && target.symbol_id() == id) return true;
    if (target.contains_symbol(id)) return false;
    map_[id] = std::move(target);
    resolved_.clear();
    return true;
  }

 private:
  std::map<SymbolId, Value> map_;
  mutable std::map<SymbolId, Value> resolved_;
};

}  // namespace intentcheck::unify
