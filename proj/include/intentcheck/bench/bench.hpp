#pragma once

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "intentcheck/report/verify.hpp"

namespace intentcheck::bench {

namespace fs = std::filesystem;
using calculus::Value;

// ---- mutation generator ----------------------------------------------------

enum class MutationKind { PathEdit, CopyDirection, ManagerSwap, PackageName, DropTask, RegexpAnchor, StateSwap, ArgEdit, ConditionEdit };

inline std::string to_string(MutationKind k) {
  switch (k) {
    case MutationKind::PathEdit: return "path-edit";
    case MutationKind::CopyDirection: return "copy-direction";
    case MutationKind::ManagerSwap: return "manager-swap";
    case MutationKind::PackageName: return "package-name";
    case MutationKind::DropTask: return "drop-task";
    case MutationKind::RegexpAnchor: return "regexp-anchor";
    case MutationKind::StateSwap: return "state-swap";
    case MutationKind::ArgEdit: return "arg-edit";
    case MutationKind::ConditionEdit: return "condition-edit";
  }
  return "?";
}

struct Mutant {
  MutationKind kind;
  std::string note;
  ansible::PlaybookAst ast;
  std::string site;  // what was edited; stacked edits go to different sites
};

namespace detail {

struct TaskRef {
  std::size_t play, task;
};

inline std::vector<TaskRef> all_tasks(const ansible::PlaybookAst& a) {
  std::vector<TaskRef> out;
  for (std::size_t p = 0; p < a.plays.size(); ++p)
    for (std::size_t t = 0; t < a.plays[p].tasks.size(); ++t) out.push_back({p, t});
  return out;
}

template <class T>
const T& pick(std::mt19937& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

inline std::size_t roll(std::mt19937& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

inline ansible::TaskAst& task_of(ansible::PlaybookAst& a, TaskRef r) { return a.plays[r.play].tasks[r.task]; }

inline std::string site_of(TaskRef r, const std::string& what) { return std::to_string(r.play) + "." + std::to_string(r.task) + ":" + what; }

inline void set_arg(ansible::TaskAst& t, const std::string& k, Value v) {
  for (auto& [n, x] : t.args)
    if (n == k) {
      x = std::move(v);
      return;
    }
  t.args.emplace_back(k, std::move(v));
}

inline void drop_arg(ansible::TaskAst& t, const std::string& k) {
  t.args.erase(std::remove_if(t.args.begin(), t.args.end(), [&](const auto& a) { return a.first == k; }), t.args.end());
}

inline bool is_package_module(const std::string& m) {
  static const std::set<std::string> s{"ansible.builtin.apt", "ansible.builtin.dnf", "ansible.builtin.yum", "ansible.builtin.pip",
                                       "ansible.builtin.package"};
  return s.count(m) > 0;
}

inline std::string edit_path(std::string p, std::mt19937& rng) {
  bool dir = p.size() > 1 && p.back() == '/';
  if (dir) p.pop_back();
  auto slash = p.rfind('/');
  std::string parent = p.substr(0, slash), base = p.substr(slash + 1);
  std::string out;
  switch (roll(rng, 5)) {
    case 0: out = parent + "/other_" + base; break;
    case 1: out = parent.empty() ? "/" + base + "_old" : parent; break;
    case 2: out = p + ".bak"; break;
    case 3: {
      auto second = p.find('/', 1);
      out = second == std::string::npos ? "/opt" + p : "/opt" + p.substr(second);
      if (out == p) out = "/var" + p.substr(second == std::string::npos ? 0 : second);
      break;
    }
    default: out = parent + "/old/" + base; break;
  }
  return out + (dir ? "/" : "");
}

// the literal parts of a templated path are still paths worth breaking
inline std::optional<Mutant> path_edit(const ansible::PlaybookAst& in, std::mt19937& rng) {
  struct Site {
    TaskRef t;
    std::size_t arg;  // npos: a loop item
    std::size_t item;
  };
  auto is_path = [](const Value& v) { return v.is_textual() && !v.text().empty() && v.text()[0] == '/'; };
  std::vector<Site> sites;
  for (auto r : all_tasks(in)) {
    const auto& t = in.plays[r.play].tasks[r.task];
    for (std::size_t i = 0; i < t.args.size(); ++i)
      if (is_path(t.args[i].second)) sites.push_back({r, i, 0});
    if (t.loop && t.loop->is(calculus::ValueKind::List))
      for (std::size_t i = 0; i < t.loop->items().size(); ++i)
        if (is_path(t.loop->items()[i])) sites.push_back({r, std::string::npos, i});
  }
  if (sites.empty()) return std::nullopt;
  const Site& s = pick(rng, sites);
  Mutant m{MutationKind::PathEdit, "", in, ""};
  auto& task = task_of(m.ast, s.t);
  if (s.arg == std::string::npos) {
    std::vector<Value> items = task.loop->items();
    std::string edited = edit_path(items[s.item].text(), rng);
    m.note = task.loop_kind + ": " + items[s.item].text() + " -> " + edited;
    m.site = site_of(s.t, "loop" + std::to_string(s.item));
    items[s.item] = Value::string(edited);
    task.loop = Value::list(std::move(items));
    return m;
  }
  auto& arg = task.args[s.arg];
  std::string edited = edit_path(arg.second.text(), rng);
  m.note = arg.first + ": " + arg.second.text() + " -> " + edited;
  m.site = site_of(s.t, arg.first);
  arg.second = Value::string(edited);
  return m;
}

inline std::optional<Mutant> copy_direction(const ansible::PlaybookAst& in, std::mt19937& rng) {
  std::vector<TaskRef> sites;
  for (auto r : all_tasks(in)) {
    const auto& t = in.plays[r.play].tasks[r.task];
    if ((t.module == "ansible.builtin.copy" && t.arg("src")) || t.module == "ansible.builtin.fetch") sites.push_back(r);
  }
  if (sites.empty()) return std::nullopt;
  TaskRef r = pick(rng, sites);
  Mutant m{MutationKind::CopyDirection, "", in, ""};
  m.site = site_of(r, "direction");
  auto& t = task_of(m.ast, r);
  if (t.module == "ansible.builtin.fetch") {
    // push instead of pull
    t.module = "ansible.builtin.copy";
    drop_arg(t, "flat");
    drop_arg(t, "fail_on_missing");
    m.note = "fetch -> copy";
    return m;
  }
  if (roll(rng, 2) == 0) {
    Value src = *t.arg("src"), dest = *t.arg("dest");
    set_arg(t, "src", dest);
    set_arg(t, "dest", src);
    m.note = "copy src <-> dest";
  } else {
    const Value* rs = t.arg("remote_src");
    bool remote = rs && modlang::lower_case(rs->text()) != "no" && modlang::lower_case(rs->text()) != "false";
    set_arg(t, "remote_src", Value::string(remote ? "no" : "yes"));
    m.note = std::string("copy remote_src -> ") + (remote ? "no" : "yes");
  }
  return m;
}

inline std::optional<Mutant> manager_swap(const ansible::PlaybookAst& in, const modlang::ModuleLibrary& lib, std::mt19937& rng) {
  static const std::vector<std::string> managers{"ansible.builtin.apt", "ansible.builtin.dnf", "ansible.builtin.pip"};
  std::vector<TaskRef> sites;
  for (auto r : all_tasks(in))
    if (is_package_module(in.plays[r.play].tasks[r.task].module)) sites.push_back(r);
  if (sites.empty()) return std::nullopt;
  TaskRef r = pick(rng, sites);
  Mutant m{MutationKind::ManagerSwap, "", in, ""};
  m.site = site_of(r, "module");
  auto& task = task_of(m.ast, r);
  std::vector<std::string> others;
  for (const auto& x : managers)
    if (x != task.module && !(task.module == "ansible.builtin.yum" && x == "ansible.builtin.dnf")) others.push_back(x);
  std::string next = pick(rng, others);
  m.note = task.module + " -> " + next;
  task.module = next;
  // keep only arguments the new module understands
  const auto* sig = lib.signature(next);
  std::vector<std::pair<std::string, Value>> kept;
  for (auto& a : task.args)
    if (sig && sig->find(a.first)) kept.push_back(a);
  task.args = std::move(kept);
  return m;
}

inline std::string wrong_name(const std::string& n, std::mt19937& rng) {
  switch (roll(rng, 3)) {
    case 0: return n + "-dev";
    // python3-x -> python-x would often land on a real alternative
    case 1: return "lib" + n;
    default: return n.size() > 2 ? n.substr(0, n.size() - 1) : n + "x";
  }
}

inline std::optional<Mutant> package_name(const ansible::PlaybookAst& in, std::mt19937& rng) {
  std::vector<TaskRef> sites;
  for (auto r : all_tasks(in)) {
    const auto& t = in.plays[r.play].tasks[r.task];
    if (is_package_module(t.module) && t.arg("name")) sites.push_back(r);
  }
  if (sites.empty()) return std::nullopt;
  TaskRef r = pick(rng, sites);
  Mutant m{MutationKind::PackageName, "", in, ""};
  m.site = site_of(r, "name");
  auto& t = task_of(m.ast, r);
  Value name = *t.arg("name");
  std::vector<std::string> items;
  if (name.is(calculus::ValueKind::List))
    for (const auto& x : name.items()) items.push_back(x.text());
  else {
    std::string cur;
    for (char c : name.text() + ",") {
      if (c == ',') {
        if (!cur.empty()) items.push_back(cur);
        cur.clear();
      } else if (c != ' ') {
        cur += c;
      }
    }
  }
  if (items.empty()) return std::nullopt;
  std::size_t i = roll(rng, items.size());
  std::string old = items[i];
  items[i] = wrong_name(old, rng);
  std::vector<Value> vs;
  for (const auto& x : items) vs.push_back(Value::string(x));
  set_arg(t, "name", Value::list(std::move(vs)));
  m.note = "package " + old + " -> " + items[i];
  return m;
}

inline std::optional<Mutant> regexp_anchor(const ansible::PlaybookAst& in, std::mt19937& rng) {
  std::vector<TaskRef> sites;
  for (auto r : all_tasks(in))
    if (in.plays[r.play].tasks[r.task].module == "ansible.builtin.lineinfile") sites.push_back(r);
  if (sites.empty()) return std::nullopt;
  TaskRef r = pick(rng, sites);
  Mutant m{MutationKind::RegexpAnchor, "", in, ""};
  m.site = site_of(r, "regexp");
  auto& t = task_of(m.ast, r);
  std::string re = t.arg("regexp") ? t.arg("regexp")->text() : "";
  std::string next;
  if (re.empty()) {
    // anchor on the line's first word
    std::string line = t.arg("line") ? t.arg("line")->text() : "x";
    next = "^" + line.substr(0, line.find_first_of(" =")) + (roll(rng, 2) ? "" : "$");
  } else if (re[0] == '^') {
    next = roll(rng, 2) ? re.substr(1) : re.substr(1) + "$";
  } else {
    next = "^" + re;
  }
  set_arg(t, "regexp", Value::string(next));
  m.note = "regexp '" + re + "' -> '" + next + "'";
  return m;
}

inline std::optional<Mutant> state_swap(const ansible::PlaybookAst& in, const modlang::ModuleLibrary& lib, std::mt19937& rng) {
  std::vector<TaskRef> sites;
  for (auto r : all_tasks(in)) {
    const auto* sig = lib.signature(in.plays[r.play].tasks[r.task].module);
    if (sig && sig->find("state") && sig->find("state")->type.kind == modlang::Type::Kind::Enum) sites.push_back(r);
  }
  if (sites.empty()) return std::nullopt;
  TaskRef r = pick(rng, sites);
  Mutant m{MutationKind::StateSwap, "", in, ""};
  m.site = site_of(r, "state");
  auto& task = task_of(m.ast, r);
  const auto* param = lib.signature(task.module)->find("state");
  std::vector<std::string> members = *lib.decls().enum_members(param->type.name);
  std::string current;
  if (const Value* v = task.arg("state")) current = v->text();
  else if (param->default_value) current = param->default_value->text();
  // synonyms would not change anything
  auto same = [&](const std::string& a, const std::string& b) {
    auto cls = [](const std::string& x) { return x == "installed" ? std::string("present") : x == "removed" ? std::string("absent") : x; };
    return cls(a) == cls(b);
  };
  members.erase(std::remove_if(members.begin(), members.end(), [&](const std::string& x) { return same(x, current); }), members.end());
  if (members.empty()) return std::nullopt;
  const std::string& next = pick(rng, members);
  m.note = task.module + " state: " + (current.empty() ? "(unset)" : current) + " -> " + next;
  set_arg(task, "state", Value::string(next));
  return m;
}

// tasks that register a result stay: later tasks would not compile without them
inline std::optional<Mutant> drop_task(const ansible::PlaybookAst& in, std::mt19937& rng) {
  std::vector<TaskRef> sites;
  for (auto r : all_tasks(in))
    if (in.plays[r.play].tasks[r.task].register_as.empty()) sites.push_back(r);
  if (sites.empty()) return std::nullopt;
  TaskRef r = pick(rng, sites);
  Mutant m{MutationKind::DropTask, "", in, ""};
  m.site = site_of(r, "task");
  auto& tasks = m.ast.plays[r.play].tasks;
  m.note = "dropped " + tasks[r.task].module + (tasks[r.task].name.empty() ? "" : " '" + tasks[r.task].name + "'");
  tasks.erase(tasks.begin() + static_cast<std::ptrdiff_t>(r.task));
  return m;
}

inline std::string edit_text(const std::string& t, std::mt19937& rng) {
  switch (roll(rng, 6)) {
    case 0: return t + "x";
    case 1: return t + "-old";
    case 2: return "_" + t;
    case 3: return t.size() > 1 ? t.substr(0, t.size() - 1) : t + "0";
    case 4: {
      std::string u = t;
      for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      return u == t ? t + "2" : u;
    }
    default: return t + "2";
  }
}

// flips booleans and perturbs plain strings; paths, enums and package names
// have their own mutations
inline std::optional<Mutant> arg_edit(const ansible::PlaybookAst& in, const modlang::ModuleLibrary& lib, std::mt19937& rng) {
  struct Site {
    TaskRef t;
    std::size_t arg;
    bool flag;
  };
  std::vector<Site> sites;
  for (auto r : all_tasks(in)) {
    const auto& t = in.plays[r.play].tasks[r.task];
    const auto* sig = lib.signature(t.module);
    if (!sig) continue;
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      const auto& [k, v] = t.args[i];
      const auto* p = sig->find(k);
      if (!p || !v.is_textual() || v.text().empty() || v.text()[0] == '/' || v.text().find("{{") != std::string::npos) continue;
      if ((is_package_module(t.module) && k == "name") || k == "remote_src" || k == "regexp") continue;
      if (p->type.kind == modlang::Type::Kind::Bool) sites.push_back({r, i, true});
      else if (p->type.kind == modlang::Type::Kind::String || p->type.kind == modlang::Type::Kind::Any) sites.push_back({r, i, false});
    }
  }
  if (sites.empty()) return std::nullopt;
  const Site& s = pick(rng, sites);
  Mutant m{MutationKind::ArgEdit, "", in, ""};
  m.site = site_of(s.t, in.plays[s.t.play].tasks[s.t.task].args[s.arg].first);
  auto& arg = task_of(m.ast, s.t).args[s.arg];
  std::string next;
  if (s.flag) {
    auto b = modlang::coerce(arg.second, modlang::Type::of(modlang::Type::Kind::Bool), lib.decls(), arg.first);
    next = b.bool_value() ? "no" : "yes";
  } else {
    next = edit_text(arg.second.text(), rng);
  }
  m.note = arg.first + ": " + arg.second.text() + " -> " + next;
  arg.second = Value::string(next);
  return m;
}

inline std::optional<Mutant> condition_edit(const ansible::PlaybookAst& in, std::mt19937& rng) {
  std::vector<TaskRef> sites;
  for (auto r : all_tasks(in))
    if (!in.plays[r.play].tasks[r.task].when.empty()) sites.push_back(r);
  if (sites.empty()) return std::nullopt;
  TaskRef r = pick(rng, sites);
  Mutant m{MutationKind::ConditionEdit, "", in, ""};
  m.site = site_of(r, "when");
  auto& when = task_of(m.ast, r).when;
  std::size_t i = roll(rng, when.size());
  std::string w = when[i], next;
  auto split = w.find(" and ");
  if (split == std::string::npos) split = w.find(" or ");
  auto quote = w.find('"');
  switch (roll(rng, 5)) {
    case 0: next = "not (" + w + ")"; break;
    case 1: next = ""; break;
    case 2:
      if (split != std::string::npos) next = w.substr(0, split);
      else next = "not (" + w + ")";
      break;
    case 3:
      if (split != std::string::npos) next = w.substr(w.find(' ', split + 1) + 1);
      else next = "";
      break;
    default:
      if (quote != std::string::npos) {
        auto end = w.find('"', quote + 1);
        std::string literal = w.substr(quote + 1, end - quote - 1);
        next = w.substr(0, quote + 1) + (literal == "RedHat" ? "Debian" : "RedHat") + w.substr(end);
      } else {
        next = "";
      }
  }
  m.note = "when '" + w + "' -> " + (next.empty() ? "(none)" : "'" + next + "'");
  if (next.empty()) when.erase(when.begin() + static_cast<std::ptrdiff_t>(i));
  else when[i] = next;
  return m;
}

inline std::optional<Mutant> apply(MutationKind k, const ansible::PlaybookAst& ast, const modlang::ModuleLibrary& lib, std::mt19937& rng) {
  switch (k) {
    case MutationKind::PathEdit: return path_edit(ast, rng);
    case MutationKind::CopyDirection: return copy_direction(ast, rng);
    case MutationKind::ManagerSwap: return manager_swap(ast, lib, rng);
    case MutationKind::PackageName: return package_name(ast, rng);
    case MutationKind::DropTask: return drop_task(ast, rng);
    case MutationKind::RegexpAnchor: return regexp_anchor(ast, rng);
    case MutationKind::StateSwap: return state_swap(ast, lib, rng);
    case MutationKind::ArgEdit: return arg_edit(ast, lib, rng);
    case MutationKind::ConditionEdit: return condition_edit(ast, rng);
  }
  return std::nullopt;
}

}  // namespace detail

inline std::string to_yaml(const ansible::PlaybookAst& ast);

/// Seeded, pairwise distinct mutants of a playbook; a mutant stacks one or two
/// edits. Identical seeds give identical mutants.
inline std::vector<Mutant> mutate(const ansible::PlaybookAst& ast, const modlang::ModuleLibrary& lib, std::uint32_t seed, std::size_t count) {
  std::mt19937 rng(seed);
  std::vector<Mutant> out;
  std::set<std::string> seen{to_yaml(ast)};
  const MutationKind kinds[] = {MutationKind::PathEdit, MutationKind::CopyDirection, MutationKind::ManagerSwap, MutationKind::PackageName,
                                MutationKind::DropTask, MutationKind::RegexpAnchor,  MutationKind::StateSwap,   MutationKind::ArgEdit,
                                MutationKind::ConditionEdit};
  for (std::size_t attempts = 0; out.size() < count && attempts < count * 400; ++attempts) {
    MutationKind k = kinds[detail::roll(rng, std::size(kinds))];
    auto m = detail::apply(k, ast, lib, rng);
    if (!m) continue;
    // a second edit elsewhere; one on the same site could undo the first
    if (detail::roll(rng, 2) == 0) {
      if (auto m2 = detail::apply(kinds[detail::roll(rng, std::size(kinds))], m->ast, lib, rng); m2 && m2->site != m->site) {
        m->ast = std::move(m2->ast);
        m->note += "; " + m2->note;
      }
    }
    if (!seen.insert(to_yaml(m->ast)).second) continue;
    out.push_back(std::move(*m));
  }
  return out;
}

inline std::string to_yaml(const ansible::PlaybookAst& ast) {
  YAML::Emitter e;
  auto value = [&](const Value& v) {
    if (v.is(calculus::ValueKind::List)) {
      e << YAML::Flow << YAML::BeginSeq;
      for (const auto& x : v.items()) e << x.text();
      e << YAML::EndSeq;
    } else {
      e << YAML::DoubleQuoted << v.text();
    }
  };
  e << YAML::BeginSeq;
  for (const auto& p : ast.plays) {
    e << YAML::BeginMap;
    if (!p.name.empty()) e << YAML::Key << "name" << YAML::Value << p.name;
    e << YAML::Key << "hosts" << YAML::Value << p.hosts;
    if (p.become) e << YAML::Key << "become" << YAML::Value << (*p.become ? "true" : "false");
    if (!p.become_user.empty()) e << YAML::Key << "become_user" << YAML::Value << p.become_user;
    if (!p.vars.empty()) {
      e << YAML::Key << "vars" << YAML::Value << YAML::BeginMap;
      for (const auto& [k, v] : p.vars) {
        e << YAML::Key << k << YAML::Value;
        value(v);
      }
      e << YAML::EndMap;
    }
    e << YAML::Key << "tasks" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : p.tasks) {
      e << YAML::BeginMap;
      if (!t.name.empty()) e << YAML::Key << "name" << YAML::Value << t.name;
      e << YAML::Key << t.module << YAML::Value << YAML::BeginMap;
      for (const auto& [k, v] : t.args) {
        e << YAML::Key << k << YAML::Value;
        value(v);
      }
      e << YAML::EndMap;
      if (!t.loop_kind.empty()) {
        e << YAML::Key << t.loop_kind << YAML::Value;
        value(*t.loop);
      }
      if (t.when.size() == 1) e << YAML::Key << "when" << YAML::Value << t.when[0];
      else if (!t.when.empty()) {
        e << YAML::Key << "when" << YAML::Value << YAML::BeginSeq;
        for (const auto& w : t.when) e << w;
        e << YAML::EndSeq;
      }
      if (!t.register_as.empty()) e << YAML::Key << "register" << YAML::Value << t.register_as;
      if (t.ignore_errors) e << YAML::Key << "ignore_errors" << YAML::Value << "true";
      e << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;
  }
  e << YAML::EndSeq;
  return std::string(e.c_str()) + "\n";
}

// ---- suite runner ----------------------------------------------------------

struct CaseResult {
  std::string file;
  bool expect_accept = true;
  bool accepted = false;
  std::string error;  // compile or input error; counts as not accepted

  bool as_expected() const { return accepted == expect_accept; }
};

struct MutantResult {
  MutationKind kind;
  std::string note;
  bool accepted = false;
  bool residual = false;  // accepted only under extra assumptions, actions or constraints
  std::string error;
};

struct BenchRow {
  std::string id;
  std::string query;
  std::string query_error;
  std::vector<CaseResult> cases;
  std::vector<MutantResult> mutant_results;
  std::size_t mutants = 0;
  std::size_t mutants_rejected = 0;
  std::size_t mutants_bare = 0;  // accepted with an empty residual

  std::size_t count(bool expect, bool accepted) const {
    return static_cast<std::size_t>(
        std::count_if(cases.begin(), cases.end(), [&](const CaseResult& c) { return c.expect_accept == expect && c.accepted == accepted; }));
  }
  bool ok() const {
    return query_error.empty() && std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.as_expected(); });
  }
};

struct BenchSummary {
  std::vector<BenchRow> rows;
  bool ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.ok(); });
  }
};

struct BenchOptions {
  report::VerifyOptions verify;
  std::size_t mutants_per_playbook = 0;
  std::uint32_t seed = 20240101;
};

inline std::vector<fs::path> yaml_files(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && (e.path().extension() == ".yml" || e.path().extension() == ".yaml")) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline unify::Verdict judge(const std::vector<interp::Outcome>& query, const ansible::PlaybookAst& ast, const modlang::ModuleLibrary& lib,
                            const report::VerifyOptions& opts) {
  auto compiled = ansible::compile_playbook(ast, lib);
  auto prog = interp::interpret(compiled.program, {}, &lib.table(), calculus::SymbolSource::for_program(), opts.limits);
  return unify::verify(query, prog, {opts.strict});
}

inline bool accepts(const std::vector<interp::Outcome>& query, const ansible::PlaybookAst& ast, const modlang::ModuleLibrary& lib,
                    const report::VerifyOptions& opts) {
  return judge(query, ast, lib, opts).accepted;
}

inline bool has_residual(const unify::Verdict& v) {
  for (const auto& r : v.results)
    if (r.selected && r.match && !r.match->residual.empty()) return true;
  return false;
}

inline MutantResult try_mutant(const std::vector<interp::Outcome>& query, const Mutant& m, const modlang::ModuleLibrary& lib,
                               const report::VerifyOptions& opts) {
  MutantResult r{m.kind, m.note, false, false, {}};
  try {
    auto v = judge(query, m.ast, lib, opts);
    r.accepted = v.accepted;
    r.residual = v.accepted && has_residual(v);
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

inline BenchRow run_one(const fs::path& dir, const kb::KnowledgeBase& kb, const modlang::ModuleLibrary& lib, const BenchOptions& opts) {
  BenchRow row;
  row.id = dir.filename().string();
  if (!fs::exists(dir / "query.fql")) raise(ErrorCode::MalformedSuite, dir.string() + " has no query.fql");
  row.query = report::read_file((dir / "query.fql").string());
  while (!row.query.empty() && (row.query.back() == '\n' || row.query.back() == ' ')) row.query.pop_back();
  std::vector<interp::Outcome> query;
  try {
    query = report::interpret_query(row.query, kb, opts.verify.limits);
  } catch (const Error& e) {
    row.query_error = e.what();
    return row;
  }
  for (bool expect : {true, false}) {
    for (const auto& f : yaml_files(dir / (expect ? "accept" : "reject"))) {
      CaseResult c;
      c.file = fs::relative(f, dir).string();
      c.expect_accept = expect;
      try {
        auto ast = ansible::parse_playbook(report::read_file(f.string()));
        c.accepted = accepts(query, ast, lib, opts.verify);
        if (expect && f.stem() == "reference" && opts.mutants_per_playbook) {
          for (const auto& m : mutate(ast, lib, opts.seed, opts.mutants_per_playbook)) {
            auto r = try_mutant(query, m, lib, opts.verify);
            ++row.mutants;
            row.mutants_rejected += !r.accepted;
            row.mutants_bare += r.accepted && !r.residual;
            row.mutant_results.push_back(std::move(r));
          }
        }
      } catch (const Error& e) {
        c.error = e.what();
        c.accepted = false;
      }
      row.cases.push_back(std::move(c));
    }
  }
  return row;
}

inline BenchSummary run_bench(const fs::path& suite, const kb::KnowledgeBase& kb, const modlang::ModuleLibrary& lib, const BenchOptions& opts = {}) {
  if (!fs::is_directory(suite)) raise(ErrorCode::MalformedSuite, suite.string() + " is not a directory");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(suite))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  BenchSummary s;
  for (const auto& d : dirs) s.rows.push_back(run_one(d, kb, lib, opts));
  return s;
}

/// Correct / incorrect programs against accepted / rejected, one row per benchmark.
inline std::string format_table(const BenchSummary& s, bool with_mutants) {
  std::ostringstream os;
  os << std::left << std::setw(6) << "#" << std::right << std::setw(10) << "ok-acc" << std::setw(10) << "ok-rej" << std::setw(10) << "bad-acc"
     << std::setw(10) << "bad-rej";
  if (with_mutants) os << std::setw(12) << "mut-rej";
  os << "  status\n";
  std::size_t t[4] = {0, 0, 0, 0}, tm = 0, tmr = 0;
  for (const auto& r : s.rows) {
    std::size_t c[4] = {r.count(true, true), r.count(true, false), r.count(false, true), r.count(false, false)};
    for (int i = 0; i < 4; ++i) t[i] += c[i];
    tm += r.mutants;
    tmr += r.mutants_rejected;
    os << std::left << std::setw(6) << r.id << std::right;
    for (auto x : c) os << std::setw(10) << x;
    if (with_mutants) os << std::setw(12) << (std::to_string(r.mutants_rejected) + "/" + std::to_string(r.mutants));
    os << "  " << (r.ok() ? "ok" : "MISMATCH");
    if (!r.query_error.empty()) os << " (query: " << r.query_error << ")";
    os << '\n';
    for (const auto& c2 : r.cases)
      if (!c2.as_expected())
        os << "        " << c2.file << ": expected " << (c2.expect_accept ? "accept" : "reject") << (c2.error.empty() ? "" : " [" + c2.error + "]") << '\n';
    for (const auto& m : r.mutant_results)
      if (m.accepted) os << "        mutant accepted" << (m.residual ? " with residual: " : " WITHOUT residual: ") << m.note << '\n';
  }
  os << std::left << std::setw(6) << "total" << std::right;
  for (auto x : t) os << std::setw(10) << x;
  if (with_mutants) os << std::setw(12) << (std::to_string(tmr) + "/" + std::to_string(tm));
  os << '\n';
  return os.str();
}

}  // namespace intentcheck::bench
