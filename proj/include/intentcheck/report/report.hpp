#pragma once

#include <json.hpp>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "intentcheck/report/verify.hpp"

namespace intentcheck::report {

struct PlayInfo {
  std::string name;
  std::string hosts;
  std::string become;  // "", "true", "false"
  std::string become_user;
};

struct Report {
  bool accepted = false;
  std::vector<std::string> residual_assumptions;
  std::vector<std::string> residual_actions;
  std::vector<std::string> residual_constraints;
  std::vector<std::string> diagnostics;
  std::vector<PlayInfo> plays;
  std::size_t query_outcomes = 0;
  std::size_t program_outcomes = 0;
  std::size_t failed_program_outcomes = 0;
  double millis = 0;
};

inline Report make_report(const VerifyRun& run) {
  Report r;
  r.accepted = run.verdict.accepted;
  std::set<std::string> assumptions, actions, constraints;
  for (const auto& res : run.verdict.results) {
    if (!res.selected || res.failed_query) continue;
    if (!res.match) {
      r.diagnostics.push_back("query outcome #" + std::to_string(res.query_index) + ": " + res.diagnostic);
      continue;
    }
    const auto& sub = res.match->sub;
    for (const auto& e : unify::detail::entries(res.match->residual.extra_assumptions)) assumptions.insert(unify::detail::apply(sub, e).to_string());
    for (const auto& e : unify::detail::entries(res.match->residual.extra_actions)) actions.insert(unify::detail::apply(sub, e).to_string());
    for (const auto& [form, val] : res.match->residual.extra_constraints)
      constraints.insert(sub.apply(form).to_string() + " = " + sub.apply(val).to_string());
  }
  r.residual_assumptions.assign(assumptions.begin(), assumptions.end());
  r.residual_actions.assign(actions.begin(), actions.end());
  r.residual_constraints.assign(constraints.begin(), constraints.end());
  for (const auto& p : run.playbook.plays)
    r.plays.push_back({p.name, p.hosts, p.become ? (*p.become ? "true" : "false") : "", p.become_user});
  r.query_outcomes = run.query.size();
  r.program_outcomes = run.program.size();
  for (const auto& o : run.program) r.failed_program_outcomes += o.failed();
  r.millis = run.millis;
  return r;
}

/// Stable machine form; `timing` is the only field that varies between runs.
inline nlohmann::ordered_json to_json(const Report& r, bool with_timing = true) {
  nlohmann::ordered_json j;
  j["verdict"] = r.accepted ? "accepted" : "rejected";
  j["residual_assumptions"] = r.residual_assumptions;
  j["residual_actions"] = r.residual_actions;
  j["residual_constraints"] = r.residual_constraints;
  j["diagnostics"] = r.diagnostics;
  auto plays = nlohmann::ordered_json::array();
  for (const auto& p : r.plays) {
    nlohmann::ordered_json pj;
    pj["name"] = p.name;
    pj["hosts"] = p.hosts;
    pj["become"] = p.become;
    pj["become_user"] = p.become_user;
    plays.push_back(pj);
  }
  nlohmann::ordered_json meta;
  meta["plays"] = plays;
  meta["query_outcomes"] = r.query_outcomes;
  meta["program_outcomes"] = r.program_outcomes;
  meta["failed_program_outcomes"] = r.failed_program_outcomes;
  if (with_timing) meta["timing_ms"] = r.millis;
  j["metadata"] = meta;
  return j;
}

inline std::string to_human(const Report& r) {
  std::ostringstream os;
  os << (r.accepted ? "ACCEPTED" : "REJECTED");
  if (r.accepted && r.residual_assumptions.empty() && r.residual_actions.empty() && r.residual_constraints.empty()) os << " (no residual)";
  os << '\n';
  auto section = [&](const char* title, const std::vector<std::string>& items) {
    if (items.empty()) return;
    os << title << ":\n";
    for (const auto& i : items) os << "  " << i << '\n';
  };
  section("assumes", r.residual_assumptions);
  section("also does", r.residual_actions);
  section("under conditions", r.residual_constraints);
  section("why", r.diagnostics);
  for (const auto& p : r.plays) {
    os << "play";
    if (!p.name.empty()) os << " '" << p.name << "'";
    os << " hosts=" << p.hosts;
    if (!p.become.empty()) os << " become=" << p.become;
    if (!p.become_user.empty()) os << " become_user=" << p.become_user;
    os << '\n';
  }
  os << r.query_outcomes << " query outcome(s), " << r.program_outcomes << " program outcome(s)";
  if (r.failed_program_outcomes) os << ", " << r.failed_program_outcomes << " failing";
  os << '\n';
  return os.str();
}

}  // namespace intentcheck::report
