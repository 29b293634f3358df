#pragma once

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "intentcheck/calculus/pure.hpp"
#include "intentcheck/error.hpp"
#include "intentcheck/modlang/ast.hpp"
#include "intentcheck/modlang/coerce.hpp"

namespace intentcheck::modlang {

struct MToken {
  enum class Kind { Ident, String, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int col = 1;
};

inline std::vector<MToken> lex_mdl(const std::string& src, const std::string& source) {
  std::vector<MToken> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto bump = [&] {
    if (src[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  auto error = [&](const std::string& msg) {
    raise(ErrorCode::SyntaxError, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  };
  static const std::vector<std::string> multi{"::", "==", "!=", "&&", "||", "->"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      bump();
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') bump();
      continue;
    }
    MToken t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = MToken::Kind::Ident;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        t.text += src[i];
        bump();
      }
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = MToken::Kind::Int;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        t.text += src[i];
        bump();
      }
    } else if (c == '"') {
      t.kind = MToken::Kind::String;
      bump();
      while (true) {
        if (i >= src.size()) error("unterminated string");
        if (src[i] == '"') break;
        if (src[i] == '\\' && i + 1 < src.size()) {
          bump();
          t.text += src[i] == 'n' ? '\n' : src[i] == 't' ? '\t' : src[i];
        } else {
          t.text += src[i];
        }
        bump();
      }
      bump();
    } else {
      t.kind = MToken::Kind::Punct;
      for (const auto& m : multi)
        if (src.compare(i, m.size(), m) == 0) t.text = m;
      if (t.text.empty()) {
        if (std::string("{}()[],;:=!?|.<>").find(c) == std::string::npos) error(std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
      }
      for (std::size_t k = 0; k < t.text.size(); ++k) bump();
    }
    out.push_back(std::move(t));
  }
  MToken end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

/// Parses declarations and module definitions; declarations go straight into `decls`
/// so later text in the same file can use them.
class MdlParser {
 public:
  MdlParser(const std::string& text, DeclTable& decls, std::string source = "<module>")
      : decls_(decls), source_(std::move(source)), toks_(lex_mdl(text, source_)) {}

  std::vector<SModule> parse() {
    std::vector<SModule> out;
    while (peek().kind != MToken::Kind::End) {
      if (word("enum")) parse_enum();
      else if (word("element")) parse_element();
      else if (word("attribute")) parse_attribute();
      else if (word("module")) out.push_back(parse_module());
      else error(peek(), "'enum', 'element', 'attribute' or 'module'");
    }
    return out;
  }

 private:
  const MToken& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  MToken next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool punct(const char* p, std::size_t k = 0) const { return peek(k).kind == MToken::Kind::Punct && peek(k).text == p; }
  bool word(const char* w, std::size_t k = 0) const { return peek(k).kind == MToken::Kind::Ident && peek(k).text == w; }

  [[noreturn]] void error(const MToken& t, const std::string& expected) const {
    std::string got = t.kind == MToken::Kind::End ? "end of file" : "'" + t.text + "'";
    raise(ErrorCode::SyntaxError, source_ + ":" + std::to_string(t.line) + ":" + std::to_string(t.col) + ": expected " + expected + ", got " + got);
  }
  [[noreturn]] void fail_at(const MToken& t, ErrorCode code, const std::string& msg) const {
    raise(code, source_ + ":" + std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + msg);
  }

  void expect(const char* p) {
    if (!punct(p)) error(peek(), std::string("'") + p + "'");
    next();
  }
  std::string ident(const char* what = "identifier") {
    if (peek().kind != MToken::Kind::Ident) error(peek(), what);
    return next().text;
  }

  static const std::set<std::string>& keywords() {
    static const std::set<std::string> k{"let", "if", "else", "for", "in", "touch", "delete", "return", "fail", "provided", "exists", "true", "false"};
    return k;
  }

  // ---- declarations ------------------------------------------------------

  Type parse_type() {
    const MToken& t = peek();
    std::string n = ident("type");
    if (n == "path") return Type::of(Type::Kind::Path);
    if (n == "string") return Type::of(Type::Kind::String);
    if (n == "bool") return Type::of(Type::Kind::Bool);
    if (n == "int") return Type::of(Type::Kind::Int);
    if (n == "unit") return Type::of(Type::Kind::Unit);
    if (n == "any") return Type::of(Type::Kind::Any);
    if (n == "list") {
      expect("<");
      Type e = parse_type();
      expect(">");
      return Type::list_of(std::move(e));
    }
    if (!decls_.enum_members(n)) fail_at(t, ErrorCode::UndeclaredEnum, "type '" + n + "' is not a declared enum");
    return Type::enum_type(n);
  }

  void parse_enum() {
    next();
    std::string name = ident("enum name");
    expect("{");
    std::vector<std::string> members;
    while (!punct("}")) {
      members.push_back(ident("enum member"));
      if (!punct(",")) break;
      next();
    }
    expect("}");
    decls_.add_enum(name, std::move(members));
  }

  void parse_element() {
    next();
    ElementDecl d;
    d.label = ident("element label");
    expect("(");
    while (!punct(")")) {
      d.keys.push_back(parse_type());
      if (!punct(",")) break;
      next();
    }
    expect(")");
    if (punct("{")) {
      next();
      while (!punct("}")) {
        std::string a = ident("attribute name");
        expect(":");
        d.attrs[a] = parse_type();
        if (!punct(",") && !punct(";")) break;
        next();
      }
      expect("}");
    } else if (punct(";")) {
      next();
    }
    decls_.add_element(std::move(d));
  }

  void parse_attribute() {
    next();
    std::string n = ident("attribute name");
    expect(":");
    Type t = parse_type();
    if (punct(";")) next();
    decls_.add_attribute(n, std::move(t));
  }

  std::string qualified_name() {
    std::string n = ident("module name");
    while (punct(".")) {
      next();
      n += "." + ident("module name");
    }
    return n;
  }

  SModule parse_module() {
    SModule m;
    m.line = next().line;
    m.name = qualified_name();
    if (punct("->")) {
      next();
      m.ret = parse_type();
    }
    current_ = &m;
    m.body = block();
    current_ = nullptr;
    return m;
  }

  // ---- argument clauses ----------------------------------------------------

  ArgDecl arg_decl(bool allow_default) {
    ArgDecl a;
    const MToken& at = peek();
    a.name = ident("argument name");
    if (keywords().count(a.name)) error(at, "argument name");
    expect(":");
    a.type = parse_type();
    if (punct("=")) {
      if (!allow_default) error(peek(), "']'");
      next();
      auto e = expr();
      if (e->kind != SExpr::Kind::Lit && e->kind != SExpr::Kind::List) error(at, "literal default value");
      a.default_value = coerce(literal_of(*e, at), a.type, decls_, "default of " + a.name);
    }
    return a;
  }

  calculus::Value literal_of(const SExpr& e, const MToken& at) const {
    if (e.kind == SExpr::Kind::Lit) return e.value;
    if (e.kind != SExpr::Kind::List) error(at, "literal");
    std::vector<calculus::Value> items;
    for (const auto& k : e.kids) items.push_back(literal_of(*k, at));
    return calculus::Value::list(std::move(items));
  }

  void clause() {
    ArgClause c;
    if (punct("[")) {
      next();
      c.kind = ArgClause::Kind::Optional;
      c.members.push_back(arg_decl(true));
      expect("]");
    } else {
      expect("(");
      c.members.push_back(arg_decl(false));
      while (punct("|")) {
        next();
        c.members.push_back(arg_decl(false));
      }
      expect(")");
      c.kind = c.members.size() > 1 ? ArgClause::Kind::Choice : ArgClause::Kind::Required;
    }
    for (const auto& m : c.members)
      for (const auto& other : current_->clauses)
        for (const auto& o : other.members)
          if (o.name == m.name) raise(ErrorCode::DuplicateArgument, source_ + ": argument '" + m.name + "' declared twice in " + current_->name);
    for (std::size_t i = 0; i < c.members.size(); ++i)
      for (std::size_t j = i + 1; j < c.members.size(); ++j)
        if (c.members[i].name == c.members[j].name)
          raise(ErrorCode::DuplicateArgument, source_ + ": argument '" + c.members[i].name + "' declared twice in " + current_->name);
    current_->clauses.push_back(std::move(c));
  }

  // ---- statements ----------------------------------------------------------

  std::vector<SStmt> block() {
    expect("{");
    std::vector<SStmt> out;
    while (!punct("}")) {
      if (punct("(") || punct("[")) {
        clause();
        continue;
      }
      out.push_back(statement());
    }
    expect("}");
    return out;
  }

  SStmt statement() {
    SStmt s;
    const MToken& t = peek();
    s.line = t.line;
    s.col = t.col;
    if (word("let")) {
      next();
      s.kind = SStmt::Kind::Let;
      s.name = ident("variable name");
      expect("=");
      s.expr = expr();
      expect(";");
      return s;
    }
    if (word("if")) return if_statement();
    if (word("for")) {
      next();
      s.kind = SStmt::Kind::For;
      s.name = ident("loop variable");
      if (!word("in")) error(peek(), "'in'");
      next();
      s.expr = expr();
      s.then_branch = block();
      return s;
    }
    if (word("touch") || word("delete")) {
      s.kind = next().text == "touch" ? SStmt::Kind::Touch : SStmt::Kind::Delete;
      s.ref = elem_ref();
      expect(";");
      return s;
    }
    if (word("return")) {
      next();
      s.kind = SStmt::Kind::Return;
      if (!punct(";")) s.expr = expr();
      expect(";");
      return s;
    }
    if (word("fail")) {
      next();
      s.kind = SStmt::Kind::Fail;
      expect(";");
      return s;
    }
    if (t.kind == MToken::Kind::Ident && decls_.element(t.text) && punct("(", 1)) {
      s.kind = SStmt::Kind::Write;
      s.ref = elem_ref();
      if (!punct(".")) error(peek(), "'.attribute'");
      next();
      const MToken& at = peek();
      s.name = ident("attribute name");
      check_attribute(*s.ref, s.name, at);
      expect("=");
      s.expr = expr();
      expect(";");
      return s;
    }
    if (t.kind == MToken::Kind::Ident && punct("=", 1)) {
      s.kind = SStmt::Kind::Assign;  // resolved to a global write during lowering if not a local
      s.name = next().text;
      next();
      s.expr = expr();
      expect(";");
      return s;
    }
    error(t, "statement");
  }

  SStmt if_statement() {
    SStmt s;
    const MToken& t = next();  // if
    s.line = t.line;
    s.col = t.col;
    if (word("provided")) {
      next();
      s.kind = SStmt::Kind::IfProvided;
      s.name = ident("argument name");
    } else if (word("exists") || (punct("!") && word("exists", 1))) {
      s.negated = punct("!");
      if (s.negated) next();
      next();
      s.kind = SStmt::Kind::IfExists;
      s.ref = elem_ref();
    } else {
      s.kind = SStmt::Kind::If;
      s.expr = expr();
    }
    if (!punct("{")) error(peek(), "'{'");
    s.then_branch = block();
    if (word("else")) {
      next();
      if (word("if")) s.else_branch.push_back(if_statement());
      else s.else_branch = block();
    }
    return s;
  }

  void check_attribute(const SElemRef& ref, const std::string& attr, const MToken& at) const {
    const ElementDecl* d = decls_.element(ref.segments.back().label);
    if (!d->attrs.count(attr))
      fail_at(at, ErrorCode::UndeclaredAttribute, "element '" + d->label + "' has no attribute '" + attr + "'");
  }

  SElemRef elem_ref() {
    SElemRef r;
    while (true) {
      const MToken& t = peek();
      std::string label = ident("element label");
      const ElementDecl* d = decls_.element(label);
      if (!d) fail_at(t, ErrorCode::UndeclaredElement, "element '" + label + "' is not declared");
      SElemRef::Segment seg{label, {}};
      expect("(");
      while (!punct(")")) {
        seg.keys.push_back(expr());
        if (!punct(",")) break;
        next();
      }
      expect(")");
      if (seg.keys.size() != d->keys.size())
        fail_at(t, ErrorCode::TypeMismatch,
                "element '" + label + "' takes " + std::to_string(d->keys.size()) + " key(s), got " + std::to_string(seg.keys.size()));
      r.segments.push_back(std::move(seg));
      if (punct(".") && peek(1).kind == MToken::Kind::Ident && decls_.element(peek(1).text) && punct("(", 2)) {
        next();
        continue;
      }
      return r;
    }
  }

  // ---- expressions ---------------------------------------------------------

  static SExprPtr make(SExpr e) { return std::make_shared<const SExpr>(std::move(e)); }
  static SExpr at(SExpr::Kind k, const MToken& t) {
    SExpr e;
    e.kind = k;
    e.line = t.line;
    e.col = t.col;
    return e;
  }

  SExprPtr expr() {
    const MToken& t = peek();
    auto c = or_expr();
    if (!punct("?")) return c;
    next();
    auto a = or_expr();
    if (punct("?")) fail_at(peek(), ErrorCode::SyntaxError, "nested conditional expressions need parentheses");
    expect(":");
    auto b = or_expr();
    if (punct("?")) fail_at(peek(), ErrorCode::SyntaxError, "nested conditional expressions need parentheses");
    SExpr e = at(SExpr::Kind::Ternary, t);
    e.kids = {c, a, b};
    return make(std::move(e));
  }

  SExprPtr or_expr() {
    auto l = and_expr();
    while (punct("||")) {
      const MToken& t = next();
      SExpr e = at(SExpr::Kind::Or, t);
      e.kids = {l, and_expr()};
      l = make(std::move(e));
    }
    return l;
  }

  SExprPtr and_expr() {
    auto l = eq_expr();
    while (punct("&&")) {
      const MToken& t = next();
      SExpr e = at(SExpr::Kind::And, t);
      e.kids = {l, eq_expr()};
      l = make(std::move(e));
    }
    return l;
  }

  SExprPtr eq_expr() {
    auto l = unary();
    if (punct("==") || punct("!=")) {
      const MToken& t = next();
      SExpr e = at(t.text == "==" ? SExpr::Kind::Eq : SExpr::Kind::Neq, t);
      e.kids = {l, unary()};
      return make(std::move(e));
    }
    return l;
  }

  SExprPtr unary() {
    if (punct("!")) {
      const MToken& t = next();
      SExpr e = at(SExpr::Kind::Not, t);
      e.kids = {unary()};
      return make(std::move(e));
    }
    return primary();
  }

  SExprPtr primary() {
    const MToken t = peek();
    if (t.kind == MToken::Kind::String) {
      next();
      SExpr e = at(SExpr::Kind::Lit, t);
      e.value = calculus::Value::string(t.text);
      return make(std::move(e));
    }
    if (t.kind == MToken::Kind::Int) {
      next();
      SExpr e = at(SExpr::Kind::Lit, t);
      e.value = calculus::Value::integer(std::stoll(t.text));
      return make(std::move(e));
    }
    if (punct("(")) {
      next();
      if (punct(")")) {
        next();
        SExpr e = at(SExpr::Kind::Lit, t);
        e.value = calculus::Value::unit();
        return make(std::move(e));
      }
      auto inner = expr();
      expect(")");
      return inner;
    }
    if (punct("[")) {
      next();
      SExpr e = at(SExpr::Kind::List, t);
      while (!punct("]")) {
        e.kids.push_back(expr());
        if (!punct(",")) break;
        next();
      }
      expect("]");
      return make(std::move(e));
    }
    if (t.kind != MToken::Kind::Ident) error(t, "expression");
    if (t.text == "true" || t.text == "false") {
      next();
      SExpr e = at(SExpr::Kind::Lit, t);
      e.value = calculus::Value::boolean(t.text == "true");
      return make(std::move(e));
    }
    if (t.text == "provided") {
      next();
      SExpr e = at(SExpr::Kind::Provided, t);
      e.name = ident("argument name");
      return make(std::move(e));
    }
    if (t.text == "exists") {
      next();
      SExpr e = at(SExpr::Kind::Exists, t);
      e.ref = elem_ref();
      return make(std::move(e));
    }
    if (punct("::", 1)) {
      next();
      next();
      const MToken& mt = peek();
      std::string m = ident("enum member");
      if (!decls_.enum_members(t.text)) fail_at(t, ErrorCode::UndeclaredEnum, "enum '" + t.text + "' is not declared");
      if (!decls_.has_enum_member(t.text, m)) fail_at(mt, ErrorCode::InvalidEnumValue, "'" + m + "' is not a member of " + t.text);
      SExpr e = at(SExpr::Kind::Lit, t);
      e.value = calculus::Value::enum_member(t.text, m);
      return make(std::move(e));
    }
    if (punct("(", 1) && decls_.element(t.text)) {
      SElemRef r = elem_ref();
      if (!punct(".")) error(peek(), "'.attribute' after element reference");
      next();
      const MToken& an = peek();
      SExpr e = at(SExpr::Kind::Read, t);
      e.name = ident("attribute name");
      check_attribute(r, e.name, an);
      e.ref = std::move(r);
      return make(std::move(e));
    }
    if (punct("(", 1)) {
      next();
      if (!calculus::PureFnTable::builtin().contains(t.text))
        fail_at(t, ErrorCode::UndeclaredElement, "'" + t.text + "' is neither a declared element nor a pure function");
      SExpr e = at(SExpr::Kind::Call, t);
      e.name = t.text;
      expect("(");
      while (!punct(")")) {
        e.kids.push_back(expr());
        if (!punct(",")) break;
        next();
      }
      expect(")");
      return make(std::move(e));
    }
    next();
    if (keywords().count(t.text)) error(t, "expression");
    SExpr e = at(SExpr::Kind::Name, t);
    e.name = t.text;
    return make(std::move(e));
  }

  DeclTable& decls_;
  std::string source_;
  std::vector<MToken> toks_;
  std::size_t pos_ = 0;
  SModule* current_ = nullptr;
};

}  // namespace intentcheck::modlang
