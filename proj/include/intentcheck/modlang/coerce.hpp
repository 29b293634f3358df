#pragma once

#include <algorithm>
#include <cctype>
#include <string>

#include "intentcheck/calculus/value.hpp"
#include "intentcheck/error.hpp"
#include "intentcheck/modlang/decls.hpp"

namespace intentcheck::modlang {

using calculus::Value;
using calculus::ValueKind;

inline std::string lower_case(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

/// Gives a playbook-style literal (mostly strings) its declared type.
inline Value coerce(const Value& v, const Type& t, const DeclTable& decls, const std::string& what) {
  auto fail = [&](const std::string& why) -> Value {
    raise(ErrorCode::TypeCoercionFailure, what + ": cannot use " + v.to_string() + " as " + t.to_string() + (why.empty() ? "" : " (" + why + ")"));
  };
  switch (t.kind) {
    case Type::Kind::Any:
      return v;
    case Type::Kind::Unit:
      if (v.is(ValueKind::Unit)) return v;
      return fail("");
    case Type::Kind::Path:
      if (v.is_textual()) return Value::path(v.text());
      return fail("");
    case Type::Kind::String:
      if (v.is_textual()) return Value::string(v.text());
      if (v.is(ValueKind::Int)) return Value::string(std::to_string(v.int_value()));
      if (v.is(ValueKind::Bool)) return Value::string(v.bool_value() ? "true" : "false");
      return fail("");
    case Type::Kind::Bool: {
      if (v.is(ValueKind::Bool)) return v;
      if (v.is(ValueKind::Int) && (v.int_value() == 0 || v.int_value() == 1)) return Value::boolean(v.int_value() == 1);
      if (!v.is_textual()) return fail("");
      auto s = lower_case(v.text());
      if (s == "yes" || s == "true" || s == "on" || s == "1" || s == "y") return Value::boolean(true);
      if (s == "no" || s == "false" || s == "off" || s == "0" || s == "n") return Value::boolean(false);
      return fail("not a boolean word");
    }
    case Type::Kind::Int: {
      if (v.is(ValueKind::Int)) return v;
      if (!v.is_textual() || v.text().empty()) return fail("");
      std::size_t i = v.text()[0] == '-' ? 1 : 0;
      if (i == v.text().size()) return fail("");
      for (; i < v.text().size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(v.text()[i]))) return fail("");
      return Value::integer(std::stoll(v.text()));
    }
    case Type::Kind::Enum: {
      if (!decls.enum_members(t.name)) raise(ErrorCode::UndeclaredEnum, "enum '" + t.name + "' is not declared");
      std::string m;
      if (v.is(ValueKind::Enum)) {
        if (v.enum_type() != t.name) return fail("wrong enum");
        m = v.text();
      } else if (v.is_textual()) {
        m = v.text();
      } else if (v.is(ValueKind::Bool)) {
        m = v.bool_value() ? "yes" : "no";
      } else {
        return fail("");
      }
      if (!decls.has_enum_member(t.name, m)) {
        std::string allowed;
        for (const auto& x : *decls.enum_members(t.name)) allowed += (allowed.empty() ? "" : ", ") + x;
        raise(ErrorCode::InvalidEnumValue, what + ": '" + m + "' is not one of " + allowed);
      }
      return Value::enum_member(t.name, m);
    }
    case Type::Kind::List: {
      std::vector<Value> items;
      if (v.is(ValueKind::List)) {
        for (const auto& x : v.items()) items.push_back(coerce(x, *t.elem, decls, what));
      } else if (v.is_textual()) {
        // comma-separated scalars are accepted for list arguments
        std::string cur;
        auto flush = [&] {
          auto b = cur.find_first_not_of(' ');
          auto e = cur.find_last_not_of(' ');
          if (b != std::string::npos) items.push_back(coerce(Value::string(cur.substr(b, e - b + 1)), *t.elem, decls, what));
          cur.clear();
        };
        for (char c : v.text()) {
          if (c == ',') flush();
          else cur += c;
        }
        flush();
      } else {
        items.push_back(coerce(v, *t.elem, decls, what));
      }
      return Value::list(std::move(items));
    }
  }
  return fail("");
}

}  // namespace intentcheck::modlang
