#pragma once

#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "intentcheck/calculus/value.hpp"

namespace intentcheck::calculus {

struct PureFn {
  int arity = 0;  // -1: variadic
  std::function<Value(const std::vector<Value>&)> eval;
};

/// Name -> evaluator over concrete values. Read-only once built.
class PureFnTable {
 public:
  void define(const std::string& name, int arity, std::function<Value(const std::vector<Value>&)> eval) {
    fns_[name] = PureFn{arity, std::move(eval)};
  }
  const PureFn* find(const std::string& name) const {
    auto it = fns_.find(name);
    return it == fns_.end() ? nullptr : &it->second;
  }
  bool contains(const std::string& name) const { return fns_.count(name) != 0; }

  static const PureFnTable& builtin();

 private:
  std::map<std::string, PureFn> fns_;
};

namespace detail {

inline const Value& want(const Value& v, ValueKind k, const char* fn) {
  if (!v.is(k)) raise(ErrorCode::TypeMismatch, std::string(fn) + ": unexpected argument " + v.to_string());
  return v;
}
inline const std::string& want_text(const Value& v, const char* fn) {
  if (!v.is_textual() && !v.is(ValueKind::Enum)) raise(ErrorCode::TypeMismatch, std::string(fn) + ": expected text, got " + v.to_string());
  return v.text();
}
inline bool want_bool(const Value& v, const char* fn) { return want(v, ValueKind::Bool, fn).bool_value(); }

inline std::string strip_trailing_slash(std::string s) {
  while (s.size() > 1 && s.back() == '/') s.pop_back();
  return s;
}

inline std::regex compile_regex(const std::string& re, const char* fn) {
  try {
    return std::regex(re, std::regex::ECMAScript);
  } catch (const std::regex_error&) {
    raise(ErrorCode::TypeMismatch, std::string(fn) + ": invalid regular expression '" + re + "'");
  }
}

/// Line-set model of a lineinfile edit: replace the last line matching `regexp`,
/// else keep an exact duplicate, else insert at EOF, BOF, or after the last line
/// matching `position`.
inline Value as_lines(const Value& v, const char* fn) {
  if (!v.is(ValueKind::String)) return want(v, ValueKind::List, fn);
  std::vector<Value> out;
  std::string cur;
  for (char c : v.text()) {
    if (c == '\n') {
      out.push_back(Value::string(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(Value::string(cur));
  return Value::list(std::move(out));
}

inline Value line_in_file(const std::vector<Value>& a) {
  const Value held = as_lines(a[0], "line_in_file");
  const auto& lines = held.items();
  const std::string& regexp = want_text(a[1], "line_in_file");
  const std::string& line = want_text(a[2], "line_in_file");
  const std::string& position = want_text(a[3], "line_in_file");
  std::vector<Value> out = lines;
  if (!regexp.empty()) {
    auto re = compile_regex(regexp, "line_in_file");
    for (std::size_t i = out.size(); i-- > 0;) {
      if (std::regex_search(want_text(out[i], "line_in_file"), re)) {
        out[i] = Value::string(line);
        return Value::list(std::move(out));
      }
    }
  }
  for (const auto& l : out)
    if (want_text(l, "line_in_file") == line) return Value::list(std::move(out));
  if (position == "BOF") {
    out.insert(out.begin(), Value::string(line));
  } else if (position == "EOF" || position.empty()) {
    out.push_back(Value::string(line));
  } else {
    auto re = compile_regex(position, "line_in_file");
    std::size_t at = out.size();
    for (std::size_t i = out.size(); i-- > 0;)
      if (std::regex_search(out[i].text(), re)) {
        at = i + 1;
        break;
      }
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), Value::string(line));
  }
  return Value::list(std::move(out));
}

inline Value line_absent(const std::vector<Value>& a) {
  const Value held = as_lines(a[0], "line_absent");
  const auto& lines = held.items();
  const std::string& regexp = want_text(a[1], "line_absent");
  const std::string& line = want_text(a[2], "line_absent");
  std::vector<Value> out;
  std::optional<std::regex> re;
  if (!regexp.empty()) re = compile_regex(regexp, "line_absent");
  for (const auto& l : lines) {
    const auto& t = want_text(l, "line_absent");
    bool drop = re ? std::regex_search(t, *re) : t == line;
    if (!drop) out.push_back(l);
  }
  return Value::list(std::move(out));
}

}  // namespace detail

inline const PureFnTable& PureFnTable::builtin() {
  static const PureFnTable table = [] {
    using detail::want;
    using detail::want_bool;
    using detail::want_text;
    PureFnTable t;
    t.define("eq", 2, [](const auto& a) { return Value::boolean(literal_equal(a[0], a[1])); });
    t.define("neq", 2, [](const auto& a) { return Value::boolean(!literal_equal(a[0], a[1])); });
    t.define("not", 1, [](const auto& a) { return Value::boolean(!want_bool(a[0], "not")); });
    t.define("and", -1, [](const auto& a) {
      for (const auto& v : a)
        if (!want_bool(v, "and")) return Value::boolean(false);
      return Value::boolean(true);
    });
    t.define("or", -1, [](const auto& a) {
      for (const auto& v : a)
        if (want_bool(v, "or")) return Value::boolean(true);
      return Value::boolean(false);
    });
    t.define("concat", 2, [](const auto& a) {
      if (a[0].is(ValueKind::List) && a[1].is(ValueKind::List)) {
        auto items = a[0].items();
        items.insert(items.end(), a[1].items().begin(), a[1].items().end());
        return Value::list(std::move(items));
      }
      std::string s = want_text(a[0], "concat") + want_text(a[1], "concat");
      return a[0].is(ValueKind::Path) ? Value::path(s) : Value::string(s);
    });
    t.define("path_join", 2, [](const auto& a) {
      const std::string& base = want_text(a[0], "path_join");
      const std::string& rest = want_text(a[1], "path_join");
      if (!rest.empty() && rest.front() == '/') return Value::path(rest);
      return Value::path(detail::strip_trailing_slash(base) + "/" + rest);
    });
    t.define("basename", 1, [](const auto& a) {
      std::string p = detail::strip_trailing_slash(want_text(a[0], "basename"));
      auto pos = p.rfind('/');
      return Value::string(pos == std::string::npos ? p : p.substr(pos + 1));
    });
    t.define("dirname", 1, [](const auto& a) {
      std::string p = detail::strip_trailing_slash(want_text(a[0], "dirname"));
      auto pos = p.rfind('/');
      if (pos == std::string::npos) return Value::path(".");
      return Value::path(pos == 0 ? "/" : p.substr(0, pos));
    });
    t.define("list", -1, [](const auto& a) { return Value::list(a); });
    t.define("list_append", 2, [](const auto& a) {
      auto items = want(a[0], ValueKind::List, "list_append").items();
      items.push_back(a[1]);
      return Value::list(std::move(items));
    });
    t.define("list_contains", 2, [](const auto& a) {
      for (const auto& v : want(a[0], ValueKind::List, "list_contains").items())
        if (literal_equal(v, a[1])) return Value::boolean(true);
      return Value::boolean(false);
    });
    t.define("nth", 2, [](const auto& a) {
      const auto& items = want(a[0], ValueKind::List, "nth").items();
      auto i = want(a[1], ValueKind::Int, "nth").int_value();
      if (i < 0 || static_cast<std::size_t>(i) >= items.size()) raise(ErrorCode::TypeMismatch, "nth: index out of range");
      return items[static_cast<std::size_t>(i)];
    });
    t.define("pair", 2, [](const auto& a) { return Value::pair(a[0], a[1]); });
    t.define("fst", 1, [](const auto& a) { return want(a[0], ValueKind::Pair, "fst").first(); });
    t.define("snd", 1, [](const auto& a) { return want(a[0], ValueKind::Pair, "snd").second(); });
    t.define("starts_with", 2, [](const auto& a) {
      const auto& s = want_text(a[0], "starts_with");
      const auto& p = want_text(a[1], "starts_with");
      return Value::boolean(s.compare(0, p.size(), p) == 0);
    });
    t.define("ends_with", 2, [](const auto& a) {
      const auto& s = want_text(a[0], "ends_with");
      const auto& p = want_text(a[1], "ends_with");
      return Value::boolean(s.size() >= p.size() && s.compare(s.size() - p.size(), p.size(), p) == 0);
    });
    t.define("inl", 1, [](const auto& a) { return Value::left(a[0]); });
    t.define("inr", 1, [](const auto& a) { return Value::right(a[0]); });
    t.define("is_inl", 1, [](const auto& a) {
      if (!a[0].is(ValueKind::Left) && !a[0].is(ValueKind::Right)) raise(ErrorCode::TypeMismatch, "is_inl: expected a sum");
      return Value::boolean(a[0].is(ValueKind::Left));
    });
    t.define("unl", 1, [](const auto& a) { return want(a[0], ValueKind::Left, "unl").payload(); });
    t.define("unr", 1, [](const auto& a) { return want(a[0], ValueKind::Right, "unr").payload(); });
    t.define("line_in_file", 4, detail::line_in_file);
    t.define("line_absent", 3, detail::line_absent);
    return t;
  }();
  return table;
}

namespace detail {

inline bool is_bool(const Value& v, bool b) { return v.is(ValueKind::Bool) && v.bool_value() == b; }

/// Partial evaluation for applications that still hold symbols. Only rules
/// that hold for every instantiation of the symbols are applied.
inline std::optional<Value> simplify_partial(const std::string& fn, const std::vector<Value>& args) {
  if (fn == "and" || fn == "or") {
    const bool absorbing = fn == "or";  // or: true absorbs, and: false absorbs
    std::vector<Value> rest;
    for (const auto& a : args) {
      if (is_bool(a, absorbing)) return Value::boolean(absorbing);
      if (is_bool(a, !absorbing)) continue;
      rest.push_back(a);
    }
    if (rest.empty()) return Value::boolean(!absorbing);
    if (rest.size() == 1) return rest.front();
    if (rest.size() != args.size()) return Value::stuck(fn, std::move(rest));
    return std::nullopt;
  }
  if ((fn == "eq" || fn == "neq") && args[0] == args[1]) return Value::boolean(fn == "eq");
  if (fn == "not" && args[0].is(ValueKind::Stuck) && args[0].fn_name() == "not") return args[0].items()[0];
  if (fn == "fst" && args[0].is(ValueKind::Pair)) return args[0].first();
  if (fn == "snd" && args[0].is(ValueKind::Pair)) return args[0].second();
  if (fn == "is_inl" && (args[0].is(ValueKind::Left) || args[0].is(ValueKind::Right))) return Value::boolean(args[0].is(ValueKind::Left));
  if (fn == "unl" && args[0].is(ValueKind::Left)) return args[0].payload();
  if (fn == "unr" && args[0].is(ValueKind::Right)) return args[0].payload();
  if (fn == "nth" && args[0].is(ValueKind::List) && args[1].is(ValueKind::Int)) {
    auto i = args[1].int_value();
    if (i >= 0 && static_cast<std::size_t>(i) < args[0].items().size()) return args[0].items()[static_cast<std::size_t>(i)];
  }
  if (fn == "concat") {
    auto empty_list = [](const Value& v) { return v.is(ValueKind::List) && v.items().empty(); };
    if (empty_list(args[0])) return args[1];
    if (empty_list(args[1])) return args[0];
  }
  if (fn == "list" || fn == "pair" || fn == "inl" || fn == "inr") return PureFnTable::builtin().find(fn)->eval(args);
  return std::nullopt;
}

}  // namespace detail

/// Applies `fn` to `args`. Fully concrete arguments evaluate; otherwise the
/// application is returned stuck, after re-evaluating any stuck argument whose
/// own arguments have since become concrete.
inline Value eval_pure(const PureFnTable& table, const std::string& fn, std::vector<Value> args) {
  const PureFn* f = table.find(fn);
  if (!f) raise(ErrorCode::UnknownFunction, "pure function '" + fn + "' is not registered");
  if (f->arity >= 0 && static_cast<std::size_t>(f->arity) != args.size())
    raise(ErrorCode::ArityMismatch, fn + " expects " + std::to_string(f->arity) + " arguments, got " + std::to_string(args.size()));
  if (f->arity < 0 && args.empty() && fn != "list") raise(ErrorCode::ArityMismatch, fn + " expects at least one argument");

  for (auto& a : args) {
    if (a.is(ValueKind::Stuck)) {
      std::vector<Value> inner = a.items();
      a = eval_pure(table, a.fn_name(), std::move(inner));
    }
  }
  bool concrete = true;
  for (const auto& a : args) concrete = concrete && a.is_concrete();
  if (concrete) return f->eval(args);

  if (fn == "path_join" && args[0].is_textual()) args[0] = Value::path(detail::strip_trailing_slash(args[0].text()));
  if (auto simplified = detail::simplify_partial(fn, args)) return *simplified;
  return Value::stuck(fn, std::move(args));
}

inline Value eval_pure(const std::string& fn, std::vector<Value> args) { return eval_pure(PureFnTable::builtin(), fn, std::move(args)); }

}  // namespace intentcheck::calculus
