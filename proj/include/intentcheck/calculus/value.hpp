#pragma once

#include <cctype>
#include <compare>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "intentcheck/error.hpp"

namespace intentcheck::calculus {

using SymbolId = std::int64_t;

/// Program-run symbols are minted below this id, query-run symbols at or above it.
inline constexpr SymbolId kQuerySymbolBase = SymbolId{1} << 40;

inline bool is_query_symbol(SymbolId id) { return id >= kQuerySymbolBase; }

enum class ValueKind : std::uint8_t {
  Unit,
  String,
  Int,
  Bool,
  Path,
  Enum,
  Pair,
  List,
  Left,
  Right,
  Symbolic,
  Stuck,
};

/// Collapses repeated separators and "." segments. A trailing separator is kept
/// because modules distinguish "copy into directory" from "copy to file".
inline std::string normalize_path(const std::string& raw) {
  if (raw.empty()) return raw;
  std::vector<std::string> parts;
  std::string cur;
  for (char c : raw) {
    if (c == '/') {
      if (!cur.empty() && cur != ".") parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty() && cur != ".") parts.push_back(cur);
  std::string out = raw.front() == '/' ? "/" : "";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += '/';
    out += parts[i];
  }
  if (raw.size() > 1 && raw.back() == '/' && out != "/" && !out.empty()) out += '/';
  if (out.empty()) out = ".";
  return out;
}

class Value {
 public:
  Value() = default;

  static Value unit() { return Value(ValueKind::Unit); }
  static Value string(std::string s) {
    Value v(ValueKind::String);
    v.text_ = std::move(s);
    return v;
  }
  static Value integer(std::int64_t n) {
    Value v(ValueKind::Int);
    v.num_ = n;
    return v;
  }
  static Value boolean(bool b) {
    Value v(ValueKind::Bool);
    v.num_ = b ? 1 : 0;
    return v;
  }
  static Value path(const std::string& p) {
    Value v(ValueKind::Path);
    v.text_ = normalize_path(p);
    return v;
  }
  static Value enum_member(std::string type, std::string member) {
    Value v(ValueKind::Enum);
    v.aux_ = std::move(type);
    v.text_ = std::move(member);
    return v;
  }
  static Value pair(Value a, Value b) {
    Value v(ValueKind::Pair);
    v.items_.push_back(std::move(a));
    v.items_.push_back(std::move(b));
    return v;
  }
  static Value list(std::vector<Value> items) {
    Value v(ValueKind::List);
    v.items_ = std::move(items);
    return v;
  }
  static Value left(Value payload) {
    Value v(ValueKind::Left);
    v.items_.push_back(std::move(payload));
    return v;
  }
  static Value right(Value payload) {
    Value v(ValueKind::Right);
    v.items_.push_back(std::move(payload));
    return v;
  }
  static Value symbolic(SymbolId id, bool universal = false, bool existential = false) {
    Value v(ValueKind::Symbolic);
    v.num_ = id;
    v.flags_ = static_cast<std::uint8_t>((universal ? 1 : 0) | (existential ? 2 : 0));
    return v;
  }
  /// Universal symbol standing for every member of `list`; the list is kept so
  /// two loops only match when they range over matching lists.
  static Value member_of(SymbolId id, Value list) {
    Value v = symbolic(id, true, false);
    v.items_.push_back(std::move(list));
    return v;
  }
  /// Builds an unevaluated application; callers go through eval_pure normally.
  static Value stuck(std::string fn, std::vector<Value> args) {
    Value v(ValueKind::Stuck);
    v.text_ = std::move(fn);
    v.items_ = std::move(args);
    return v;
  }

  ValueKind kind() const { return kind_; }
  bool is(ValueKind k) const { return kind_ == k; }

  const std::string& text() const { return text_; }
  const std::string& enum_type() const { return aux_; }
  const std::string& fn_name() const { return text_; }
  std::int64_t int_value() const { return num_; }
  bool bool_value() const { return num_ != 0; }
  SymbolId symbol_id() const { return num_; }
  bool universal() const { return (flags_ & 1) != 0; }
  bool existential() const { return (flags_ & 2) != 0; }
  const std::vector<Value>& items() const { return items_; }
  std::vector<Value>& mutable_items() { return items_; }
  const Value& first() const { return items_.at(0); }
  const Value& second() const { return items_.at(1); }
  const Value& payload() const { return items_.at(0); }
  const Value* origin() const { return kind_ == ValueKind::Symbolic && !items_.empty() ? &items_[0] : nullptr; }

  bool is_textual() const { return kind_ == ValueKind::String || kind_ == ValueKind::Path; }

  /// No symbolic value or stuck application anywhere inside.
  bool is_concrete() const {
    if (kind_ == ValueKind::Symbolic || kind_ == ValueKind::Stuck) return false;
    for (const auto& item : items_)
      if (!item.is_concrete()) return false;
    return true;
  }

  bool contains_symbol(SymbolId id) const {
    if (kind_ == ValueKind::Symbolic && num_ == id) return true;
    for (const auto& item : items_)
      if (item.contains_symbol(id)) return true;
    return false;
  }

  template <typename F>
  void for_each_symbol(F&& f) const {
    if (kind_ == ValueKind::Symbolic) f(*this);
    for (const auto& item : items_) item.for_each_symbol(f);
  }

  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    if (auto c = a.num_ <=> b.num_; c != 0) return c;
    if (auto c = a.flags_ <=> b.flags_; c != 0) return c;
    if (auto c = a.text_.compare(b.text_); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = a.aux_.compare(b.aux_); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = a.items_.size() <=> b.items_.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.items_.size(); ++i)
      if (auto c = a.items_[i] <=> b.items_[i]; c != 0) return c;
    return std::strong_ordering::equal;
  }
  friend bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

  void print(std::ostream& os) const {
    switch (kind_) {
      case ValueKind::Unit: os << "()"; break;
      case ValueKind::String: print_quoted(os, text_); break;
      case ValueKind::Int: os << num_; break;
      case ValueKind::Bool: os << (num_ ? "true" : "false"); break;
      case ValueKind::Path:
        if (bare_path_ok(text_)) os << text_;
        else {
          os << "path(";
          print_quoted(os, text_);
          os << ')';
        }
        break;
      case ValueKind::Enum: os << aux_ << "::" << text_; break;
      case ValueKind::Pair: os << '<' << items_[0] << ", " << items_[1] << '>'; break;
      case ValueKind::List:
        os << '[';
        for (std::size_t i = 0; i < items_.size(); ++i) os << (i ? ", " : "") << items_[i];
        os << ']';
        break;
      case ValueKind::Left: os << "L(" << items_[0] << ')'; break;
      case ValueKind::Right: os << "R(" << items_[0] << ')'; break;
      case ValueKind::Symbolic:
        os << '?' << (is_query_symbol(num_) ? "q" : "") << (is_query_symbol(num_) ? num_ - kQuerySymbolBase : num_);
        if (universal()) os << '*';
        if (existential()) os << '~';
        break;
      case ValueKind::Stuck:
        os << text_ << '(';
        for (std::size_t i = 0; i < items_.size(); ++i) os << (i ? ", " : "") << items_[i];
        os << ')';
        break;
    }
  }

  std::string to_string() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Value& v) {
    v.print(os);
    return os;
  }

 private:
  explicit Value(ValueKind k) : kind_(k) {}

  static bool bare_path_ok(const std::string& p) {
    if (p.empty() || (p.front() != '/' && p.front() != '~')) return false;
    for (char c : p) {
      bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '/' || c == '.' || c == '_' || c == '-' ||
                c == '*' || c == '~' || c == '+';
      if (!ok) return false;
    }
    return true;
  }

  static void print_quoted(std::ostream& os, const std::string& s) {
    os << '"';
    for (char c : s) {
      if (c == '"' || c == '\\') os << '\\';
      if (c == '\n') {
        os << "\\n";
        continue;
      }
      os << c;
    }
    os << '"';
  }

  ValueKind kind_ = ValueKind::Unit;
  std::uint8_t flags_ = 0;
  std::int64_t num_ = 0;
  std::string text_;
  std::string aux_;
  std::vector<Value> items_;
};

/// Textual equality that treats a path and a string with the same normalized text as equal.
inline bool literal_equal(const Value& a, const Value& b) {
  if (a.is_textual() && b.is_textual() && a.kind() != b.kind())
    return normalize_path(a.text()) == normalize_path(b.text());
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueKind::Pair:
    case ValueKind::List:
    case ValueKind::Left:
    case ValueKind::Right:
    case ValueKind::Stuck:
      if (a.items().size() != b.items().size() || a.text() != b.text()) return false;
      for (std::size_t i = 0; i < a.items().size(); ++i)
        if (!literal_equal(a.items()[i], b.items()[i])) return false;
      return true;
    default:
      return a == b;
  }
}

/// Mints run-scoped symbolic ids from a fixed base so query and program runs never overlap.
class SymbolSource {
 public:
  explicit SymbolSource(SymbolId base = 0) : next_(base) {}
  static SymbolSource for_program() { return SymbolSource(0); }
  static SymbolSource for_query() { return SymbolSource(kQuerySymbolBase); }

  Value fresh(bool universal = false, bool existential = false) {
    return Value::symbolic(next_++, universal, existential);
  }
  SymbolId peek() const { return next_; }

 private:
  SymbolId next_;
};

}  // namespace intentcheck::calculus
