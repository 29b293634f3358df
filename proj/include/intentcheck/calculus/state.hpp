#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "intentcheck/calculus/value.hpp"

namespace intentcheck::calculus {

struct Segment {
  std::string label;
  Value key;

  friend auto operator<=>(const Segment&, const Segment&) = default;
  friend bool operator==(const Segment&, const Segment&) = default;
};

inline void print_key(std::ostream& os, const Value& key) {
  if (key.is(ValueKind::Unit)) return;
  if (key.is(ValueKind::Pair)) {
    print_key(os, key.first());
    os << ", ";
    print_key(os, key.second());
    return;
  }
  os << key;
}

struct ElementPath {
  std::vector<Segment> segments;

  ElementPath() = default;
  ElementPath(std::string label, Value key) { segments.push_back({std::move(label), std::move(key)}); }

  bool empty() const { return segments.empty(); }
  std::size_t size() const { return segments.size(); }

  ElementPath child(std::string label, Value key) const {
    ElementPath out = *this;
    out.segments.push_back({std::move(label), std::move(key)});
    return out;
  }
  ElementPath prefix(std::size_t n) const {
    ElementPath out;
    out.segments.assign(segments.begin(), segments.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }
  /// True when this path equals `other` or is one of its ancestors.
  bool is_prefix_of(const ElementPath& other) const {
    if (segments.size() > other.segments.size()) return false;
    for (std::size_t i = 0; i < segments.size(); ++i)
      if (!(segments[i] == other.segments[i])) return false;
    return true;
  }
  bool is_concrete() const {
    for (const auto& s : segments)
      if (!s.key.is_concrete()) return false;
    return true;
  }

  friend auto operator<=>(const ElementPath&, const ElementPath&) = default;
  friend bool operator==(const ElementPath&, const ElementPath&) = default;

  friend std::ostream& operator<<(std::ostream& os, const ElementPath& p) {
    for (std::size_t i = 0; i < p.segments.size(); ++i) {
      if (i) os << '.';
      os << p.segments[i].label << '(';
      print_key(os, p.segments[i].key);
      os << ')';
    }
    return os;
  }
  std::string to_string() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }
};

struct AttributePath {
  ElementPath element;
  std::string attribute;

  friend auto operator<=>(const AttributePath&, const AttributePath&) = default;
  friend bool operator==(const AttributePath&, const AttributePath&) = default;

  friend std::ostream& operator<<(std::ostream& os, const AttributePath& a) {
    if (!a.element.empty()) os << a.element << '.';
    return os << a.attribute;
  }
  std::string to_string() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }
};

enum class Presence { Present, Absent };

/// Partial map over attributes and elements. A present element stands for a
/// nested state whose contents are the entries routed through its path.
class AbstractState {
 public:
  using AttrMap = std::map<AttributePath, Value>;
  using ElemMap = std::map<ElementPath, Presence>;

  const AttrMap& attrs() const { return attrs_; }
  const ElemMap& elems() const { return elems_; }
  bool empty() const { return attrs_.empty() && elems_.empty(); }
  std::size_t size() const { return attrs_.size() + elems_.size(); }

  const Value* find_attr(const AttributePath& a) const {
    auto it = attrs_.find(a);
    return it == attrs_.end() ? nullptr : &it->second;
  }
  std::optional<Presence> find_elem(const ElementPath& e) const {
    auto it = elems_.find(e);
    if (it == elems_.end()) return std::nullopt;
    return it->second;
  }
  /// The first prefix of `e` (including `e`) bound to Absent, if any.
  std::optional<ElementPath> absent_prefix(const ElementPath& e) const {
    for (std::size_t n = 1; n <= e.size(); ++n) {
      auto p = e.prefix(n);
      auto it = elems_.find(p);
      if (it != elems_.end() && it->second == Presence::Absent) return p;
    }
    return std::nullopt;
  }

  /// Returns false (and leaves the state untouched) if the write would route through an absent element.
  bool set_attr(const AttributePath& a, Value v) {
    if (absent_prefix(a.element)) return false;
    attrs_[a] = std::move(v);
    return true;
  }
  void set_elem(const ElementPath& e, Presence p) {
    elems_[e] = p;
    if (p == Presence::Absent) erase_beneath(e);
  }
  void erase_attr(const AttributePath& a) { attrs_.erase(a); }
  void erase_elem(const ElementPath& e) { elems_.erase(e); }

  /// Drops every attribute under `e` and every element strictly below `e`.
  void erase_beneath(const ElementPath& e) {
    for (auto it = attrs_.begin(); it != attrs_.end();) {
      if (e.is_prefix_of(it->first.element)) it = attrs_.erase(it);
      else ++it;
    }
    for (auto it = elems_.begin(); it != elems_.end();) {
      if (e.is_prefix_of(it->first) && !(it->first == e)) it = elems_.erase(it);
      else ++it;
    }
  }

  bool well_formed() const {
    for (const auto& [path, v] : attrs_)
      if (absent_prefix(path.element)) return false;
    for (const auto& [path, p] : elems_)
      for (std::size_t n = 1; n < path.size(); ++n)
        if (auto q = find_elem(path.prefix(n)); q && *q == Presence::Absent) return false;
    return true;
  }

  friend bool operator==(const AbstractState&, const AbstractState&) = default;

  /// Stable line-oriented debug form: elements first, then attributes, each in key order.
  void print(std::ostream& os, const std::string& indent = "") const {
    for (const auto& [path, p] : elems_) os << indent << path << " = " << (p == Presence::Present ? "present" : "absent") << '\n';
    for (const auto& [path, v] : attrs_) os << indent << path << " = " << v << '\n';
  }
  std::string to_string() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }

 private:
  AttrMap attrs_;
  ElemMap elems_;
};

}  // namespace intentcheck::calculus
