#pragma once

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "intentcheck/ansible/compile.hpp"
#include "intentcheck/fql/compiler.hpp"
#include "intentcheck/fql/parser.hpp"
#include "intentcheck/interp/interpreter.hpp"
#include "intentcheck/kb/knowledge_base.hpp"
#include "intentcheck/modlang/library.hpp"
#include "intentcheck/unify/unifier.hpp"

namespace intentcheck::report {

using interp::Outcome;

struct VerifyOptions {
  bool strict = false;
  interp::Limits limits;
};

/// Everything one verification produced, kept so reports can be built from it.
struct VerifyRun {
  std::vector<Outcome> query;
  std::vector<Outcome> program;
  unify::Verdict verdict;
  ansible::CompiledPlaybook playbook;
  double millis = 0;
};

inline std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) raise(ErrorCode::Io, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::vector<Outcome> interpret_query(const std::string& text, const kb::KnowledgeBase& kb, const interp::Limits& limits = {}) {
  auto prog = fql::compile_query(fql::parse_query(text), kb);
  return interp::interpret(prog, {}, nullptr, calculus::SymbolSource::for_query(), limits);
}

inline VerifyRun verify_texts(const std::string& query_text, const std::string& playbook_text, const kb::KnowledgeBase& kb,
                              const modlang::ModuleLibrary& lib, const VerifyOptions& opts = {}) {
  auto start = std::chrono::steady_clock::now();
  VerifyRun run;
  run.query = interpret_query(query_text, kb, opts.limits);
  run.playbook = ansible::compile_playbook(ansible::parse_playbook(playbook_text), lib);
  run.program = interp::interpret(run.playbook.program, {}, &lib.table(), calculus::SymbolSource::for_program(), opts.limits);
  run.verdict = unify::verify(run.query, run.program, {opts.strict});
  run.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace intentcheck::report
