#pragma once

#include <string>

#include "intentcheck/fql/ast.hpp"

namespace intentcheck::fql {

inline std::string print(const ValueToken& t) {
  if (t.kind != ValueToken::Kind::String) return t.text;
  std::string out = "\"";
  for (char c : t.text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

inline std::string print(const TokenList& ts) {
  std::string out;
  for (const auto& t : ts) out += (out.empty() ? "" : " ") + print(t);
  return out;
}

inline std::string print(const Arg& a) {
  std::string out = a.sep;
  std::string payload;
  if (a.has_binds) {
    for (const auto& b : a.binds) payload += (payload.empty() ? "" : ", ") + b.key + "=" + print(b.value);
  } else {
    payload = print(a.value);
  }
  return out.empty() ? payload : out + " " + payload;
}

inline std::string print_subject(const Atom& a) {
  std::string out;
  auto put = [&](const std::string& s) { out += (out.empty() ? "" : " ") + s; };
  if (!a.verb.empty()) put(a.verb);
  for (const auto& w : a.desc) put(w);
  for (const auto& arg : a.args) put(print(arg));
  return out;
}

inline std::string print(const Atom& a) { return print_subject(a); }

inline std::string print(const Cond& c) {
  switch (c.kind) {
    case Cond::Kind::Or:
    case Cond::Kind::And: {
      std::string out;
      const char* op = c.kind == Cond::Kind::Or ? " or " : " and ";
      for (const auto& k : c.kids) out += (out.empty() ? "" : op) + print(k);
      return out;
    }
    case Cond::Kind::OsIs:
      return "os is " + print(c.os) + (c.based ? " based" : "");
    case Cond::Kind::RebootRequired:
      return "reboot required";
    case Cond::Kind::Exists:
      return print_subject(c.subject) + (c.negated ? " not exists" : " exists");
  }
  return "";
}

std::string print(const Sentence& s);

inline std::string print(const Item& it) {
  if (it.atom) return print(*it.atom);
  std::string out = "if " + print(it.cond->cond) + " then " + print(it.cond->then_branch);
  if (it.cond->otherwise) out += " otherwise " + print(*it.cond->otherwise);
  return out;
}

inline std::string print(const Sentence& s) {
  std::string out;
  for (const auto& it : s) out += (out.empty() ? "" : "; ") + print(it);
  return out;
}

inline std::string print(const Query& q) {
  std::string out;
  for (const auto& s : q.sentences) out += (out.empty() ? "" : ". ") + print(s);
  return out;
}

}  // namespace intentcheck::fql
