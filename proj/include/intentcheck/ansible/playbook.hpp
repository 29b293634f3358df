#pragma once

#include <yaml-cpp/yaml.h>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "intentcheck/calculus/value.hpp"
#include "intentcheck/error.hpp"

namespace intentcheck::ansible {

using calculus::Value;

struct TaskAst {
  std::string name;
  std::string module;  // fully qualified
  std::vector<std::pair<std::string, Value>> args;
  std::vector<std::string> when;  // conjunction; a bare `true`/`false` stays a string
  std::string loop_kind;          // "", "loop", "with_items", "with_fileglob"
  std::optional<Value> loop;
  std::string register_as;
  bool ignore_errors = false;
  std::vector<std::string> unrecognized;
  int line = 0;

  const Value* arg(const std::string& k) const {
    for (const auto& [n, v] : args)
      if (n == k) return &v;
    return nullptr;
  }
};

struct PlayAst {
  std::string name;
  std::string hosts;
  std::optional<bool> become;
  std::string become_user;
  std::map<std::string, Value> vars;
  std::vector<TaskAst> tasks;
  std::vector<std::string> unrecognized;
};

struct PlaybookAst {
  std::vector<PlayAst> plays;
};

namespace detail {

inline const std::set<std::string>& unsupported_modules() {
  static const std::set<std::string> s{"shell", "command", "raw", "script", "expect", "include_tasks", "import_tasks", "include_role",
                                       "import_role", "include", "include_vars", "set_fact", "meta", "add_host", "group_by"};
  return s;
}

// task keywords that would change what a task means, so they can't be ignored
inline const std::set<std::string>& unsupported_task_keys() {
  static const std::set<std::string> s{"block", "rescue", "always", "delegate_to", "local_action", "action", "failed_when", "until",
                                       "loop_control", "with_dict", "with_nested", "with_together", "with_subelements"};
  return s;
}

// accepted and ignored: they don't touch the modelled state
inline const std::set<std::string>& ignored_task_keys() {
  static const std::set<std::string> s{"tags", "changed_when", "no_log", "check_mode", "diff", "timeout", "retries", "delay",
                                       "run_once", "throttle", "debugger", "environment", "vars", "become", "become_user",
                                       "become_method", "any_errors_fatal", "collections", "connection", "module_defaults", "notify"};
  return s;
}

inline int line_of(const YAML::Node& n) { return n.Mark().line + 1; }

inline std::string where(const YAML::Node& n) { return "line " + std::to_string(line_of(n)); }

inline std::string normalize_module(const std::string& name) {
  static const std::string legacy = "ansible.legacy.";
  if (name.rfind(legacy, 0) == 0) return "ansible.builtin." + name.substr(legacy.size());
  if (name.find('.') == std::string::npos) return "ansible.builtin." + name;
  return name;
}

inline std::string short_name(const std::string& fq) {
  auto p = fq.rfind('.');
  return p == std::string::npos ? fq : fq.substr(p + 1);
}

inline Value to_value(const YAML::Node& n, const std::string& what) {
  if (n.IsNull()) return Value::string("");
  if (n.IsScalar()) return Value::string(n.Scalar());
  if (n.IsSequence()) {
    std::vector<Value> items;
    for (const auto& x : n) items.push_back(to_value(x, what));
    return Value::list(std::move(items));
  }
  raise(ErrorCode::UnsupportedFeature, what + " (" + where(n) + "): mapping values are not supported");
}

/// `name=git state=present` free-form arguments.
inline std::vector<std::pair<std::string, Value>> free_form(const std::string& text, const std::string& module, int line) {
  std::vector<std::string> words;
  std::string cur;
  char quote = 0;
  bool any = false;
  int braces = 0;  // spaces inside {{ }} don't split
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (!quote && text.compare(i, 2, "{{") == 0) ++braces;
    if (!quote && braces && text.compare(i, 2, "}}") == 0) {
      --braces;
      cur += "}}";
      ++i;
      continue;
    }
    if (braces) {
      cur += c;
    } else if (quote) {
      if (c == quote) quote = 0;
      else cur += c;
    } else if (c == '\'' || c == '"') {
      quote = c;
      any = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (any || !cur.empty()) words.push_back(cur);
      cur.clear();
      any = false;
    } else {
      cur += c;
    }
  }
  if (quote) raise(ErrorCode::YamlSyntaxError, module + " (line " + std::to_string(line) + "): unterminated quote in arguments");
  if (any || !cur.empty()) words.push_back(cur);
  std::vector<std::pair<std::string, Value>> out;
  for (const auto& w : words) {
    auto eq = w.find('=');
    if (eq == std::string::npos || eq == 0)
      raise(ErrorCode::UnsupportedFeature, module + " (line " + std::to_string(line) + "): free-form argument '" + w + "'");
    out.emplace_back(w.substr(0, eq), Value::string(w.substr(eq + 1)));
  }
  return out;
}

inline void add_arg(TaskAst& t, std::string k, Value v) {
  if (t.arg(k)) raise(ErrorCode::DuplicateArgument, t.module + " (line " + std::to_string(t.line) + "): argument '" + k + "' given twice");
  t.args.emplace_back(std::move(k), std::move(v));
}

inline void add_args(TaskAst& t, const YAML::Node& n) {
  if (n.IsNull()) return;
  if (n.IsScalar()) {
    for (auto& [k, v] : free_form(n.Scalar(), t.module, line_of(n))) add_arg(t, k, v);
    return;
  }
  if (!n.IsMap()) raise(ErrorCode::NotAPlaybook, t.module + " (" + where(n) + "): module arguments must be a mapping");
  for (const auto& kv : n) add_arg(t, kv.first.Scalar(), to_value(kv.second, t.module + "." + kv.first.Scalar()));
}

inline TaskAst parse_task(const YAML::Node& n) {
  if (!n.IsMap()) raise(ErrorCode::NotAPlaybook, "task at " + where(n) + " is not a mapping");
  TaskAst t;
  t.line = line_of(n);
  static const std::set<std::string> loops{"loop", "with_items", "with_fileglob", "with_list"};
  YAML::Node module_args;
  YAML::Node extra;
  for (const auto& kv : n) {
    const std::string k = kv.first.Scalar();
    const YAML::Node& v = kv.second;
    if (k == "name") t.name = v.Scalar();
    else if (k == "when") {
      if (v.IsSequence())
        for (const auto& c : v) t.when.push_back(c.Scalar());
      else t.when.push_back(v.Scalar());
    } else if (loops.count(k)) {
      if (!t.loop_kind.empty()) raise(ErrorCode::UnsupportedFeature, "task at " + where(n) + ": more than one loop keyword");
      t.loop_kind = k == "with_list" ? "with_items" : k;
      t.loop = to_value(v, k);
    } else if (k == "register") t.register_as = v.Scalar();
    else if (k == "ignore_errors") t.ignore_errors = v.IsScalar() && (v.Scalar() == "true" || v.Scalar() == "yes" || v.Scalar() == "True");
    else if (k == "args") extra = v;
    else if (unsupported_task_keys().count(k)) raise(ErrorCode::UnsupportedFeature, k);
    else if (ignored_task_keys().count(k)) t.unrecognized.push_back(k);
    else {
      if (!t.module.empty())
        raise(ErrorCode::NotAPlaybook, "task at " + where(n) + " names two modules: " + t.module + " and " + normalize_module(k));
      if (unsupported_modules().count(short_name(normalize_module(k))) && normalize_module(k).rfind("ansible.builtin.", 0) == 0)
        raise(ErrorCode::UnsupportedFeature, short_name(normalize_module(k)));
      t.module = normalize_module(k);
      module_args = kv.second;
    }
  }
  if (t.module.empty()) raise(ErrorCode::NotAPlaybook, "task at " + where(n) + " has no module");
  add_args(t, module_args);
  if (extra) add_args(t, extra);
  return t;
}

inline PlayAst parse_play(const YAML::Node& n) {
  if (!n.IsMap()) raise(ErrorCode::NotAPlaybook, "play at " + where(n) + " is not a mapping");
  if (n["import_playbook"]) raise(ErrorCode::UnsupportedFeature, "import_playbook");
  if (!n["hosts"]) raise(ErrorCode::NotAPlaybook, "play at " + where(n) + " has no hosts");
  PlayAst p;
  std::vector<TaskAst> pre, main, post;
  for (const auto& kv : n) {
    const std::string k = kv.first.Scalar();
    const YAML::Node& v = kv.second;
    auto tasks = [&](std::vector<TaskAst>& into) {
      if (v.IsNull()) return;
      if (!v.IsSequence()) raise(ErrorCode::NotAPlaybook, k + " at " + where(v) + " is not a list");
      for (const auto& t : v) into.push_back(parse_task(t));
    };
    if (k == "name") p.name = v.Scalar();
    else if (k == "hosts") p.hosts = v.IsSequence() ? to_value(v, k).to_string() : v.Scalar();
    else if (k == "become") p.become = v.Scalar() == "true" || v.Scalar() == "yes" || v.Scalar() == "True";
    else if (k == "become_user") p.become_user = v.Scalar();
    else if (k == "vars") {
      if (!v.IsMap()) raise(ErrorCode::NotAPlaybook, "play vars at " + where(v) + " must be a mapping");
      for (const auto& var : v) p.vars[var.first.Scalar()] = to_value(var.second, "vars." + var.first.Scalar());
    } else if (k == "pre_tasks") tasks(pre);
    else if (k == "tasks") tasks(main);
    else if (k == "post_tasks") tasks(post);
    else if (k == "handlers" || k == "roles" || k == "vars_files" || k == "vars_prompt") raise(ErrorCode::UnsupportedFeature, k);
    else p.unrecognized.push_back(k);
  }
  for (auto* part : {&pre, &main, &post})
    for (auto& t : *part) p.tasks.push_back(std::move(t));
  return p;
}

}  // namespace detail

inline PlaybookAst parse_playbook(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    raise(ErrorCode::YamlSyntaxError, e.what());
  }
  if (!root.IsSequence()) raise(ErrorCode::NotAPlaybook, "top level is not a list of plays");
  PlaybookAst out;
  try {
    for (const auto& play : root) out.plays.push_back(detail::parse_play(play));
  } catch (const YAML::Exception& e) {
    raise(ErrorCode::NotAPlaybook, e.what());
  }
  return out;
}

}  // namespace intentcheck::ansible
