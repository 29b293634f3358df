#pragma once

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "intentcheck/error.hpp"
#include "intentcheck/fql/ast.hpp"

namespace intentcheck::fql {

struct Token {
  enum class Kind { Word, String, Int, Dot, Semi, Comma, Eq, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int col = 1;
};

inline const char* describe(Token::Kind k) {
  switch (k) {
    case Token::Kind::Word: return "word";
    case Token::Kind::String: return "string";
    case Token::Kind::Int: return "integer";
    case Token::Kind::Dot: return "'.'";
    case Token::Kind::Semi: return "';'";
    case Token::Kind::Comma: return "','";
    case Token::Kind::Eq: return "'='";
    case Token::Kind::End: return "end of query";
  }
  return "?";
}

inline const std::set<std::string>& verbs() {
  static const std::set<std::string> v{"create", "delete", "remove", "copy", "move", "clone", "install", "uninstall", "start",
                                       "stop", "restart", "enable", "disable", "set", "write", "download", "reboot", "backup",
                                       "generate"};
  return v;
}

inline const std::set<std::string>& separators() {
  static const std::set<std::string> s{"to", "from", "at", "with", "in", "into", "for", "via", "on"};
  return s;
}

[[noreturn]] inline void syntax_error(const Token& t, const std::string& expected) {
  std::string got = t.kind == Token::Kind::End ? "end of query" : "'" + t.text + "'";
  raise(ErrorCode::SyntaxError, std::to_string(t.line) + ":" + std::to_string(t.col) + ": expected " + expected + ", got " + got);
}

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '/' || c == '_' || c == '-' || c == '*' || c == '?' || c == '~' ||
           c == '+' || c == ':' || c == '@' || c == '%';
  };
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (c == '"') {
      t.kind = Token::Kind::String;
      advance();
      while (true) {
        if (i >= src.size()) syntax_error(Token{Token::Kind::End, "", line, col}, "closing '\"'");
        char d = src[i];
        if (d == '"') break;
        if (d == '\\' && i + 1 < src.size()) {
          advance();
          d = src[i];
          if (d == 'n') d = '\n';
        }
        t.text += d;
        advance();
      }
      advance();
      out.push_back(std::move(t));
      continue;
    }
    if (c == ';' || c == ',' || c == '=') {
      t.kind = c == ';' ? Token::Kind::Semi : c == ',' ? Token::Kind::Comma : Token::Kind::Eq;
      t.text = std::string(1, c);
      advance();
      out.push_back(std::move(t));
      continue;
    }
    if (c == '.' && !(i + 1 < src.size() && word_char(src[i + 1]))) {
      t.kind = Token::Kind::Dot;
      t.text = ".";
      advance();
      out.push_back(std::move(t));
      continue;
    }
    if (word_char(c) || c == '.') {
      while (i < src.size() && (word_char(src[i]) || (src[i] == '.' && i + 1 < src.size() && word_char(src[i + 1])))) {
        t.text += src[i];
        advance();
      }
      bool digits = !t.text.empty();
      for (char d : t.text) digits = digits && std::isdigit(static_cast<unsigned char>(d));
      t.kind = digits ? Token::Kind::Int : Token::Kind::Word;
      out.push_back(std::move(t));
      continue;
    }
    t.text = std::string(1, c);
    syntax_error(t, "word, string, or punctuation");
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

/// Recursive-descent parser for the query grammar.
class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

  Query parse() {
    Query q;
    while (peek().kind == Token::Kind::Dot) next();
    while (peek().kind != Token::Kind::End) {
      q.sentences.push_back(sentence(/*in_then=*/false));
      if (peek().kind == Token::Kind::Dot) {
        while (peek().kind == Token::Kind::Dot) next();
      } else if (peek().kind != Token::Kind::End) {
        syntax_error(peek(), "'.', ';' or end of query");
      }
    }
    return q;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool is_word(const char* w, std::size_t k = 0) const { return peek(k).kind == Token::Kind::Word && peek(k).text == w; }

  Sentence sentence(bool in_then) {
    Sentence s;
    while (true) {
      if (is_word("if")) {
        s.push_back(conditional());
        return s;  // the conditional's branches absorb the rest of the sentence
      }
      Item it;
      it.atom = atom(in_then);
      s.push_back(std::move(it));
      if (peek().kind != Token::Kind::Semi) return s;
      next();
      if (is_word("and")) next();
    }
  }

  Item conditional() {
    next();  // if
    auto c = std::make_shared<Conditional>();
    c->cond = cond_or();
    if (!is_word("then")) syntax_error(peek(), "'then'");
    next();
    c->then_branch = sentence(/*in_then=*/true);
    if (is_word("otherwise")) {
      next();
      c->otherwise = sentence(false);
    }
    Item it;
    it.cond = std::move(c);
    return it;
  }

  Cond cond_or() {
    Cond first = cond_and();
    if (!is_word("or")) return first;
    Cond c;
    c.kind = Cond::Kind::Or;
    c.kids.push_back(std::move(first));
    while (is_word("or")) {
      next();
      c.kids.push_back(cond_and());
    }
    return c;
  }

  Cond cond_and() {
    Cond first = cond_base();
    if (!is_word("and")) return first;
    Cond c;
    c.kind = Cond::Kind::And;
    c.kids.push_back(std::move(first));
    while (is_word("and")) {
      next();
      c.kids.push_back(cond_base());
    }
    return c;
  }

  Cond cond_base() {
    Cond c;
    if (is_word("os") && is_word("is", 1)) {
      next();
      next();
      const Token& t = peek();
      if (t.kind != Token::Kind::Word && t.kind != Token::Kind::String) syntax_error(t, "operating system name");
      c.kind = Cond::Kind::OsIs;
      c.os = to_value(next());
      if (is_word("based")) {
        next();
        c.based = true;
      }
      return c;
    }
    if (is_word("reboot") && is_word("required", 1)) {
      next();
      next();
      c.kind = Cond::Kind::RebootRequired;
      return c;
    }
    c.kind = Cond::Kind::Exists;
    c.subject.desc = desc(/*in_cond=*/true);
    c.subject.args = args(/*in_cond=*/true, false);
    if (c.subject.desc.empty() && c.subject.args.empty()) syntax_error(peek(), "condition");
    if (is_word("not")) {
      next();
      c.negated = true;
    }
    if (!is_word("exists")) syntax_error(peek(), "'exists'");
    next();
    return c;
  }

  Atom atom(bool in_then) {
    const Token& v = peek();
    if (v.kind != Token::Kind::Word || !verbs().count(v.text)) syntax_error(v, "verb");
    Atom a;
    a.verb = next().text;
    a.desc = desc(false);
    a.args = args(false, in_then);
    return a;
  }

  bool stops_desc(bool in_cond) const {
    const Token& t = peek();
    if (t.kind != Token::Kind::Word) return true;
    if (separators().count(t.text)) return true;
    if (!t.text.empty() && (t.text[0] == '/' || t.text[0] == '?')) return true;
    if (peek(1).kind == Token::Kind::Eq) return true;
    if (in_cond && (t.text == "not" || t.text == "exists")) return true;
    if (t.text == "then" || t.text == "otherwise") return true;
    return false;
  }

  std::vector<std::string> desc(bool in_cond) {
    std::vector<std::string> out;
    while (!stops_desc(in_cond)) out.push_back(next().text);
    return out;
  }

  bool ends_payload(bool in_cond, bool in_then) const {
    const Token& t = peek();
    if (t.kind == Token::Kind::Dot || t.kind == Token::Kind::Semi || t.kind == Token::Kind::End) return true;
    if (t.kind != Token::Kind::Word) return false;
    if (separators().count(t.text)) return true;
    if (in_cond && (t.text == "not" || t.text == "exists" || t.text == "then" || t.text == "and" || t.text == "or")) return true;
    if (in_then && t.text == "otherwise") return true;
    return false;
  }

  std::vector<Arg> args(bool in_cond, bool in_then) {
    std::vector<Arg> out;
    while (true) {
      const Token& t = peek();
      bool sep = t.kind == Token::Kind::Word && separators().count(t.text);
      bool bare = !sep && !ends_payload(in_cond, in_then);
      if (!sep && !bare) return out;
      Arg a;
      if (sep) a.sep = next().text;
      std::size_t start = pos_;
      bool has_eq = false;
      while (!ends_payload(in_cond, in_then)) {
        has_eq = has_eq || peek().kind == Token::Kind::Eq;
        next();
      }
      std::size_t end = pos_;
      if (start == end) syntax_error(peek(), "argument value");
      pos_ = start;
      if (has_eq) {
        a.has_binds = true;
        while (pos_ < end) {
          Binding b;
          while (pos_ < end && peek().kind == Token::Kind::Word && peek().kind != Token::Kind::Eq) b.key += (b.key.empty() ? "" : " ") + next().text;
          if (b.key.empty() || peek().kind != Token::Kind::Eq) syntax_error(peek(), "binding name followed by '='");
          next();
          while (pos_ < end && peek().kind != Token::Kind::Comma) b.value.push_back(value_token(next()));
          if (b.value.empty()) syntax_error(peek(), "binding value");
          a.binds.push_back(std::move(b));
          if (pos_ < end) next();  // ','
        }
      } else {
        while (pos_ < end) a.value.push_back(value_token(next()));
      }
      out.push_back(std::move(a));
    }
  }

  static ValueToken to_value(const Token& t) {
    ValueToken v;
    v.text = t.text;
    v.kind = t.kind == Token::Kind::String ? ValueToken::Kind::String
             : t.kind == Token::Kind::Int  ? ValueToken::Kind::Int
                                           : ValueToken::Kind::Word;
    return v;
  }

  static ValueToken value_token(const Token& t) {
    if (t.kind != Token::Kind::Word && t.kind != Token::Kind::String && t.kind != Token::Kind::Int) syntax_error(t, "value");
    return to_value(t);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline Query parse_query(const std::string& text) { return Parser(text).parse(); }

}  // namespace intentcheck::fql
