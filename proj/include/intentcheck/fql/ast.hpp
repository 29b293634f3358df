#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace intentcheck::fql {

struct ValueToken {
  enum class Kind { Word, String, Int };
  Kind kind = Kind::Word;
  std::string text;

  friend bool operator==(const ValueToken&, const ValueToken&) = default;
};

using TokenList = std::vector<ValueToken>;

struct Binding {
  std::string key;  // may span several words, joined by single spaces
  TokenList value;

  friend bool operator==(const Binding&, const Binding&) = default;
};

struct Arg {
  std::string sep;  // empty for a bare positional value
  bool has_binds = false;
  std::vector<Binding> binds;
  TokenList value;

  friend bool operator==(const Arg&, const Arg&) = default;
};

struct Atom {
  std::string verb;
  std::vector<std::string> desc;
  std::vector<Arg> args;

  std::string desc_text() const {
    std::string out;
    for (const auto& w : desc) out += (out.empty() ? "" : " ") + w;
    return out;
  }
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Cond {
  enum class Kind { Or, And, OsIs, RebootRequired, Exists };
  Kind kind = Kind::OsIs;
  std::vector<Cond> kids;   // Or / And
  ValueToken os;            // OsIs
  bool based = false;       // "os is X based"
  Atom subject;             // Exists: verb empty, desc + args
  bool negated = false;     // Exists: "not exists"

  friend bool operator==(const Cond&, const Cond&) = default;
};

struct Conditional;

/// One step of a sentence: an atom, or a conditional that swallows the rest of the sentence.
struct Item {
  std::optional<Atom> atom;
  std::shared_ptr<Conditional> cond;

  friend bool operator==(const Item& a, const Item& b);
};

using Sentence = std::vector<Item>;

struct Conditional {
  Cond cond;
  Sentence then_branch;
  std::optional<Sentence> otherwise;

  friend bool operator==(const Conditional&, const Conditional&) = default;
};

inline bool operator==(const Item& a, const Item& b) {
  if (a.atom != b.atom) return false;
  if (!a.cond || !b.cond) return !a.cond && !b.cond;
  return *a.cond == *b.cond;
}

struct Query {
  std::vector<Sentence> sentences;

  friend bool operator==(const Query&, const Query&) = default;
};

}  // namespace intentcheck::fql
