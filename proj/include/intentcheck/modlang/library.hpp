#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "intentcheck/interp/module_table.hpp"
#include "intentcheck/modlang/lower.hpp"
#include "intentcheck/modlang/parser.hpp"

namespace intentcheck::modlang {

/// A task argument: a literal from the playbook, or an expression computed at run time
/// (registered results, loop items, facts).
struct ArgInput {
  std::optional<Value> literal;
  std::optional<Expr> dynamic;

  static ArgInput of(Value v) { return {std::move(v), std::nullopt}; }
  static ArgInput expr(Expr e) { return {std::nullopt, std::move(e)}; }
};

/// Validates an invocation against a signature and builds the record expression
/// passed to the stateful call.
inline Expr check_args(const std::map<std::string, ArgInput>& args, const Signature& sig, const DeclTable& decls) {
  using namespace calculus;
  for (const auto& [k, v] : args)
    if (!sig.find(k)) raise(ErrorCode::UnknownArgument, sig.module + ": unknown argument '" + k + "'");

  std::map<int, std::vector<std::string>> groups;
  for (const auto& p : sig.params)
    if (p.kind == Param::Kind::ChoiceMember && args.count(p.name)) groups[p.group].push_back(p.name);
  std::map<int, std::vector<std::string>> members;
  for (const auto& p : sig.params)
    if (p.kind == Param::Kind::ChoiceMember) members[p.group].push_back(p.name);
  for (const auto& [g, names] : members) {
    auto given = groups[g];
    if (given.size() != 1) {
      std::string all;
      for (const auto& n : names) all += (all.empty() ? "" : " | ") + n;
      raise(ErrorCode::ChoiceViolation, sig.module + ": exactly one of (" + all + ") is required, got " + std::to_string(given.size()));
    }
  }

  std::vector<Expr> fields;
  bool all_literal = true;
  for (const auto& p : sig.params) {
    auto it = args.find(p.name);
    Expr value;
    if (it == args.end()) {
      if (p.kind == Param::Kind::Required) raise(ErrorCode::MissingRequired, sig.module + ": missing required argument '" + p.name + "'");
      if (p.kind == Param::Kind::Defaulted) value = lit(*p.default_value);
      else value = lit(Value::left(Value::unit()));
    } else {
      const ArgInput& in = it->second;
      Expr v = in.literal ? lit(coerce(*in.literal, p.type, decls, sig.module + "." + p.name)) : *in.dynamic;
      value = p.sum() ? (v.kind == Expr::Kind::Lit ? lit(Value::right(v.literal)) : fn("inr", {v})) : v;
    }
    all_literal = all_literal && value.kind == Expr::Kind::Lit;
    fields.push_back(value.kind == Expr::Kind::Lit ? lit(Value::pair(Value::string(p.name), value.literal))
                                                   : fn("pair", {lit(Value::string(p.name)), value}));
  }
  if (all_literal) {
    std::vector<Value> vs;
    for (const auto& f : fields) vs.push_back(f.literal);
    return lit(Value::list(std::move(vs)));
  }
  return fn("list", std::move(fields));
}

/// Declarations plus every lowered module, loaded from .mdl text.
class ModuleLibrary {
 public:
  void load_text(const std::string& text, const std::string& source = "<module>") {
    MdlParser parser(text, decls_, source);
    for (const auto& m : parser.parse()) {
      auto lowered = lower_module(m, decls_);
      signatures_[m.name] = lowered.signature;
      table_.add(std::move(lowered.def));
    }
  }

  void load_file(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) raise(ErrorCode::Io, "cannot read module file " + p.string());
    std::stringstream ss;
    ss << f.rdbuf();
    load_text(ss.str(), p.string());
  }

  /// Loads every .mdl file of a directory; files sort by name so declarations
  /// in a "00-..." prelude come first.
  void load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) raise(ErrorCode::Io, "module directory " + dir.string() + " not found");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".mdl") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load_file(f);
  }

  static ModuleLibrary from_dir(const std::filesystem::path& dir) {
    ModuleLibrary lib;
    lib.load_dir(dir);
    return lib;
  }

  const DeclTable& decls() const { return decls_; }
  const interp::ModuleTable& table() const { return table_; }
  const Signature* signature(const std::string& name) const {
    auto it = signatures_.find(name);
    return it == signatures_.end() ? nullptr : &it->second;
  }
  const std::map<std::string, Signature>& signatures() const { return signatures_; }

  Expr check(const std::string& module, const std::map<std::string, ArgInput>& args) const {
    const Signature* s = signature(module);
    if (!s) raise(ErrorCode::UnknownModule, "module '" + module + "' is not defined");
    return check_args(args, *s, decls_);
  }

 private:
  DeclTable decls_;
  interp::ModuleTable table_;
  std::map<std::string, Signature> signatures_;
};

}  // namespace intentcheck::modlang
