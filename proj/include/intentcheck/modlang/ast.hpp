#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "intentcheck/calculus/value.hpp"
#include "intentcheck/modlang/decls.hpp"

namespace intentcheck::modlang {

struct SExpr;
using SExprPtr = std::shared_ptr<const SExpr>;

/// `file(dest, file_system::remote)` or `virtualenv(v).package(n)`.
struct SElemRef {
  struct Segment {
    std::string label;
    std::vector<SExprPtr> keys;
  };
  std::vector<Segment> segments;
};

struct SExpr {
  enum class Kind { Lit, Name, Call, List, Provided, Exists, Read, Not, And, Or, Eq, Neq, Ternary };
  Kind kind = Kind::Lit;
  calculus::Value value;       // Lit
  std::string name;            // Name / Call / Provided / Read attribute
  std::vector<SExprPtr> kids;  // Call args, List items, operands, Ternary (cond, then, else)
  std::optional<SElemRef> ref; // Exists / Read (absent for a global attribute)
  int line = 0;
  int col = 0;
};

struct SStmt {
  enum class Kind { Let, Assign, If, IfProvided, IfExists, For, Touch, Delete, Write, Return, Fail };
  Kind kind = Kind::Fail;
  std::string name;  // Let/Assign/For variable, IfProvided argument, Write attribute
  SExprPtr expr;     // value, condition, iterable, return value (may be null for `return;`)
  std::optional<SElemRef> ref;  // IfExists / Touch / Delete / Write (absent for a global attribute write)
  bool negated = false;         // IfExists: `if !exists`
  std::vector<SStmt> then_branch;
  std::vector<SStmt> else_branch;
  int line = 0;
  int col = 0;
};

struct ArgDecl {
  std::string name;
  Type type;
  std::optional<calculus::Value> default_value;  // optional clause with `= literal`
};

struct ArgClause {
  enum class Kind { Required, Choice, Optional };
  Kind kind = Kind::Required;
  std::vector<ArgDecl> members;  // Choice has two or more, others exactly one
};

struct SModule {
  std::string name;
  Type ret = Type::of(Type::Kind::Unit);
  std::vector<ArgClause> clauses;
  std::vector<SStmt> body;
  int line = 0;
};

}  // namespace intentcheck::modlang
