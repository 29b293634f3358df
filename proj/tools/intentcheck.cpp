#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "intentcheck/bench/bench.hpp"
#include "intentcheck/report/report.hpp"

using namespace intentcheck;

namespace {

struct Common {
  std::string kb = std::string(INTENTCHECK_DATA_DIR) + "/kb/default.kb";
  std::string modules = std::string(INTENTCHECK_DATA_DIR) + "/modules";
  std::size_t max_branches = interp::Limits{}.max_branches;
  std::size_t max_steps = interp::Limits{}.max_steps;
  bool strict = false;

  void add(CLI::App* app, bool with_kb, bool with_modules) {
    if (with_kb) app->add_option("--kb", kb, "knowledge base file")->capture_default_str();
    if (with_modules) app->add_option("--modules", modules, "module definition directory")->capture_default_str();
    app->add_option("--max-branches", max_branches, "branch cap per interpretation")->capture_default_str();
    app->add_option("--max-steps", max_steps, "step cap per interpretation")->capture_default_str();
    app->add_flag("--strict-conditionals", strict, "reject extra actions on elements the query mentions");
  }
  report::VerifyOptions options() const { return {strict, {max_branches, max_steps}}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intentcheck: check Ansible playbooks against FQL intent queries"};
  app.require_subcommand(1);
  Common common;

  std::string query_file, playbook_file, report_out;
  bool json_stdout = false;
  auto* verify = app.add_subcommand("verify", "verify a playbook against a query");
  verify->add_option("query", query_file, "query (.fql)")->required();
  verify->add_option("playbook", playbook_file, "playbook (.yml)")->required();
  verify->add_option("--report-out", report_out, "write the JSON report here");
  verify->add_flag("--json", json_stdout, "print the JSON report instead of the human one");
  common.add(verify, true, true);

  std::string suite_dir, mutate_out;
  std::size_t mutants = 0;
  std::uint32_t seed = bench::BenchOptions{}.seed;
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark suite");
  bench_cmd->add_option("suite", suite_dir, "suite directory (NN/query.fql, NN/accept/*.yml, NN/reject/*.yml)")->required();
  bench_cmd->add_option("--mutants", mutants, "seeded mutants per reference playbook (reported, not expected)");
  bench_cmd->add_option("--seed", seed, "mutation seed")->capture_default_str();
  bench_cmd->add_option("--write-mutants", mutate_out, "also write the mutants as YAML under this directory");
  common.add(bench_cmd, true, true);

  std::string kb_file;
  auto* kb_cmd = app.add_subcommand("kb", "knowledge base tools");
  kb_cmd->require_subcommand(1);
  auto* lint = kb_cmd->add_subcommand("lint", "validate a knowledge base file");
  lint->add_option("file", kb_file, "knowledge base")->required();

  std::string fql_file;
  auto* fql_cmd = app.add_subcommand("fql", "query tools");
  fql_cmd->require_subcommand(1);
  auto* check = fql_cmd->add_subcommand("check", "parse and compile a query");
  check->add_option("query", fql_file, "query (.fql)")->required();
  bool show_outcomes = false;
  check->add_flag("--outcomes", show_outcomes, "also interpret and print the outcomes");
  common.add(check, true, false);

  std::string compile_file;
  auto* compile = app.add_subcommand("compile", "dump the state program of a playbook");
  compile->add_option("playbook", compile_file, "playbook (.yml)")->required();
  bool compile_outcomes = false;
  compile->add_flag("--outcomes", compile_outcomes, "also interpret and print the outcomes");
  common.add(compile, false, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      auto kb = kb::KnowledgeBase::load(common.kb);
      auto lib = modlang::ModuleLibrary::from_dir(common.modules);
      auto run = report::verify_texts(report::read_file(query_file), report::read_file(playbook_file), kb, lib, common.options());
      auto rep = report::make_report(run);
      if (json_stdout) std::cout << report::to_json(rep).dump(2) << '\n';
      else std::cout << report::to_human(rep);
      if (!report_out.empty()) {
        std::ofstream out(report_out);
        if (!out) raise(ErrorCode::Io, "cannot write " + report_out);
        out << report::to_json(rep).dump(2) << '\n';
      }
      return rep.accepted ? 0 : 1;
    }
    if (*bench_cmd) {
      auto kb = kb::KnowledgeBase::load(common.kb);
      auto lib = modlang::ModuleLibrary::from_dir(common.modules);
      bench::BenchOptions opts{common.options(), mutants, seed};
      auto summary = bench::run_bench(suite_dir, kb, lib, opts);
      std::cout << bench::format_table(summary, mutants > 0);
      if (!mutate_out.empty() && mutants > 0) {
        for (const auto& row : summary.rows) {
          auto f = std::filesystem::path(suite_dir) / row.id / "accept" / "reference.yml";
          if (!std::filesystem::exists(f)) continue;
          {
            auto ast = ansible::parse_playbook(report::read_file(f.string()));
            auto dir = std::filesystem::path(mutate_out) / row.id;
            std::filesystem::create_directories(dir);
            std::size_t i = 0;
            for (const auto& m : bench::mutate(ast, lib, seed, mutants)) {
              std::ofstream out(dir / (f.stem().string() + "-" + bench::to_string(m.kind) + "-" + std::to_string(i++) + ".yml"));
              out << "# " << m.note << '\n' << bench::to_yaml(m.ast);
            }
          }
        }
      }
      return summary.ok() ? 0 : 1;
    }
    if (*lint) {
      auto kb = kb::KnowledgeBase::load(kb_file);
      std::cout << kb_file << ": " << kb.entries().size() << " entries ok\n";
      return 0;
    }
    if (*check) {
      auto kb = kb::KnowledgeBase::load(common.kb);
      auto q = fql::parse_query(report::read_file(fql_file));
      auto prog = fql::compile_query(q, kb);
      std::cout << fql::print(q) << "\n\n" << calculus::to_string(prog);
      if (show_outcomes)
        for (const auto& o : interp::interpret(prog, {}, nullptr, calculus::SymbolSource::for_query(), common.options().limits))
          std::cout << '\n' << o.to_string();
      return 0;
    }
    if (*compile) {
      auto lib = modlang::ModuleLibrary::from_dir(common.modules);
      auto c = ansible::compile_playbook(ansible::parse_playbook(report::read_file(compile_file)), lib);
      std::cout << calculus::to_string(c.program);
      if (compile_outcomes)
        for (const auto& o : interp::interpret(c.program, {}, &lib.table(), calculus::SymbolSource::for_program(), common.options().limits))
          std::cout << '\n' << o.to_string();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
