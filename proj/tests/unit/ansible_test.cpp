#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "intentcheck/ansible/compile.hpp"
#include "intentcheck/interp/interpreter.hpp"

using namespace intentcheck;
using namespace intentcheck::ansible;
using namespace intentcheck::calculus;
using namespace intentcheck::interp;

namespace {

std::string slurp(const std::string& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const modlang::ModuleLibrary& lib() {
  static const auto l = modlang::ModuleLibrary::from_dir(std::string(INTENTCHECK_DATA_DIR) + "/modules");
  return l;
}

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::vector<Outcome> run(const std::string& yaml) {
  auto c = compile_playbook(parse_playbook(yaml), lib());
  return interpret(c.program, {}, &lib().table());
}

const std::string kFixtures = std::string(INTENTCHECK_DATA_DIR) + "/../tests/fixtures/";

Value S(const char* s) { return Value::string(s); }
Value P(const char* s) { return Value::path(s); }
Value remote() { return Value::enum_member("file_system", "remote"); }

}  // namespace

TEST(Playbook, ParsesTwoPlays) {
  auto ast = parse_playbook(slurp(kFixtures + "workstations_and_servers.yml"));
  ASSERT_EQ(ast.plays.size(), 2u);
  ASSERT_EQ(ast.plays[0].tasks.size(), 1u);
  const auto& pip = ast.plays[0].tasks[0];
  EXPECT_EQ(pip.module, "ansible.builtin.pip");
  EXPECT_EQ(*pip.arg("name"), Value::list({S("numpy"), S("pandas")}));
  EXPECT_EQ(*pip.arg("virtualenv"), S("/home/dev/venv"));
  ASSERT_EQ(ast.plays[1].tasks.size(), 2u);
  EXPECT_EQ(ast.plays[1].tasks[0].module, "ansible.builtin.apt");
  EXPECT_EQ(ast.plays[1].tasks[1].module, "ansible.builtin.service");
  EXPECT_EQ(ast.plays[1].hosts, "servers");
  EXPECT_EQ(ast.plays[1].become_user, "root");
  EXPECT_EQ(ast.plays[1].become, true);
}

TEST(Playbook, ShortNamesAreQualified) {
  auto ast = parse_playbook("- hosts: all\n  tasks:\n    - apt: name=git state=present\n    - ansible.legacy.file: path=/x state=absent\n");
  EXPECT_EQ(ast.plays[0].tasks[0].module, "ansible.builtin.apt");
  EXPECT_EQ(*ast.plays[0].tasks[0].arg("state"), S("present"));
  EXPECT_EQ(ast.plays[0].tasks[1].module, "ansible.builtin.file");
}

TEST(Playbook, EmptyTaskList) {
  auto ast = parse_playbook("- hosts: all\n  tasks: []\n");
  ASSERT_EQ(ast.plays.size(), 1u);
  EXPECT_TRUE(ast.plays[0].tasks.empty());
}

TEST(Playbook, Errors) {
  EXPECT_EQ(code_of([] { parse_playbook("- hosts: all\n  tasks:\n    - shell: rm -rf /tmp/x\n"); }), ErrorCode::UnsupportedFeature);
  EXPECT_EQ(code_of([] { parse_playbook("- hosts: all\n  tasks:\n    - ansible.builtin.command: ls\n"); }), ErrorCode::UnsupportedFeature);
  EXPECT_EQ(code_of([] { parse_playbook("- hosts: all\n  tasks:\n    - block:\n        - apt: name=git\n"); }), ErrorCode::UnsupportedFeature);
  EXPECT_EQ(code_of([] { parse_playbook("- hosts: all\n  handlers: []\n"); }), ErrorCode::UnsupportedFeature);
  EXPECT_EQ(code_of([] { parse_playbook("- hosts: [all\n"); }), ErrorCode::YamlSyntaxError);
  EXPECT_EQ(code_of([] { parse_playbook("hosts: all\n"); }), ErrorCode::NotAPlaybook);
  EXPECT_EQ(code_of([] { parse_playbook("- tasks: []\n"); }), ErrorCode::NotAPlaybook);
  EXPECT_EQ(code_of([] { parse_playbook("- hosts: all\n  tasks:\n    - apt: name=git\n      args:\n        name: vim\n"); }),
            ErrorCode::DuplicateArgument);
}

TEST(Playbook, UnrecognizedKeywordsAreCollected) {
  auto ast = parse_playbook("- hosts: all\n  gather_facts: false\n  tasks:\n    - apt: name=git\n      tags: [x]\n");
  EXPECT_EQ(ast.plays[0].unrecognized, std::vector<std::string>{"gather_facts"});
  EXPECT_EQ(ast.plays[0].tasks[0].unrecognized, std::vector<std::string>{"tags"});
}

TEST(Facts, Resolve) {
  EXPECT_EQ(resolve_fact_variable("ansible_os_family").attribute, "os_family");
  EXPECT_TRUE(resolve_fact_variable("ansible_os_family").element.empty());
  EXPECT_EQ(resolve_fact_variable("ansible_distribution").attribute, "distribution");
  EXPECT_EQ(code_of([] { resolve_fact_variable("ansible_no_such_fact"); }), ErrorCode::UnknownFactVariable);
}

TEST(CompilePlaybook, WorkstationsAndServersEndToEnd) {
  auto outs = run(slurp(kFixtures + "workstations_and_servers.yml"));
  ASSERT_EQ(outs.size(), 1u);
  const auto& o = outs[0];
  EXPECT_EQ(o.status, Status::Returned);
  ElementPath venv("virtualenv", P("/home/dev/venv"));
  EXPECT_EQ(o.delta.find_elem(venv), Presence::Present);
  EXPECT_EQ(o.delta.find_elem(venv.child("package", S("numpy"))), Presence::Present);
  EXPECT_EQ(o.delta.find_elem(venv.child("package", S("pandas"))), Presence::Present);
  EXPECT_EQ(o.delta.find_elem(ElementPath("package", S("apache2"))), Presence::Present);
  EXPECT_EQ(*o.delta.find_attr({ElementPath("package", S("apache2")), "manager"}), Value::enum_member("package_manager", "apt"));
  ElementPath svc("service", S("apache2"));
  EXPECT_EQ(*o.delta.find_attr({svc, "enabled"}), Value::boolean(true));
  EXPECT_EQ(*o.delta.find_attr({svc, "state"}), Value::enum_member("service_state", "started"));
}

TEST(CompilePlaybook, MetadataStaysOutOfTheState) {
  auto c = compile_playbook(parse_playbook(slurp(kFixtures + "workstations_and_servers.yml")), lib());
  ASSERT_EQ(c.plays.size(), 2u);
  EXPECT_EQ(c.plays[0].hosts, "workstations");
  EXPECT_EQ(c.plays[0].become_user, "dev");
  EXPECT_EQ(c.plays[1].first_task, 1u);
  EXPECT_EQ(c.modules, (std::vector<std::string>{"ansible.builtin.pip", "ansible.builtin.apt", "ansible.builtin.service"}));
}

// stateful calls appear in the program in task order
TEST(CompilePlaybook, TaskOrderPreserved) {
  auto c = compile_playbook(parse_playbook(slurp(kFixtures + "workstations_and_servers.yml")), lib());
  std::vector<std::string> calls;
  for (const auto& s : c.program)
    if (auto* call = std::get_if<stmt::Call>(&s.node)) calls.push_back(call->fn);
  EXPECT_EQ(calls, c.modules);
}

TEST(CompilePlaybook, AptDefaultsToPresent) {
  auto outs = run("- hosts: all\n  tasks:\n    - apt:\n        name: apache2\n");
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0].delta.find_elem(ElementPath("package", S("apache2"))), Presence::Present);
  EXPECT_FALSE(outs[0].delta.find_attr({ElementPath("package", S("apache2")), "version"}));
}

TEST(CompilePlaybook, EnumsCheckedAtCompileTime) {
  EXPECT_EQ(code_of([] { run("- hosts: all\n  tasks:\n    - service: name=apache2 state=launched\n"); }), ErrorCode::InvalidEnumValue);
  EXPECT_EQ(code_of([] { run("- hosts: all\n  tasks:\n    - frobnicate: x=1\n"); }), ErrorCode::UnknownModule);
  EXPECT_EQ(code_of([] { run("- hosts: all\n  tasks:\n    - service: name=a enabled=maybe\n"); }), ErrorCode::TypeCoercionFailure);
}

// every enum-typed argument of every shipped module rejects a non-member
TEST(CompilePlaybook, EnumValidationIsComplete) {
  int checked = 0;
  for (const auto& [name, sig] : lib().signatures())
    for (const auto& p : sig.params) {
      if (p.type.kind != modlang::Type::Kind::Enum) continue;
      std::map<std::string, modlang::ArgInput> args;
      for (const auto& q : sig.params)
        if (q.kind == modlang::Param::Kind::Required) args[q.name] = modlang::ArgInput::of(q.type.kind == modlang::Type::Kind::List ? Value::list({S("x")}) : S("x"));
      args[p.name] = modlang::ArgInput::of(S("no_such_member"));
      EXPECT_EQ(code_of([&] { lib().check(name, args); }), ErrorCode::InvalidEnumValue) << name << "." << p.name;
      ++checked;
    }
  EXPECT_GT(checked, 5);
}

TEST(CompilePlaybook, WhenOnFactBranches) {
  auto c = compile_playbook(parse_playbook("- hosts: all\n  tasks:\n    - apt: name=zsh\n      when: ansible_os_family == \"Debian\"\n"), lib());
  ASSERT_EQ(c.program.size(), 2u);
  auto* g = std::get_if<stmt::Get>(&c.program[0].node);
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(g->attr.attribute, "os_family");
  EXPECT_NE(std::get_if<stmt::If>(&c.program[1].node), nullptr);
  auto outs = interpret(c.program, {}, &lib().table());
  ASSERT_EQ(outs.size(), 2u);
  int installed = 0;
  for (const auto& o : outs) installed += o.delta.find_elem(ElementPath("package", S("zsh"))) == Presence::Present;
  EXPECT_EQ(installed, 1);
}

TEST(CompilePlaybook, FailingModuleFailsTheTask) {
  auto outs = run("- hosts: all\n  tasks:\n    - copy: src=/a dest=/b remote_src=yes\n");
  int failed = 0;
  for (const auto& o : outs) failed += o.failed();
  EXPECT_EQ(failed, 1);
  auto ignored = run("- hosts: all\n  tasks:\n    - copy: src=/a dest=/b remote_src=yes\n      ignore_errors: yes\n");
  for (const auto& o : ignored) EXPECT_FALSE(o.failed());
}

TEST(CompilePlaybook, RegisterAndLoop) {
  auto outs = run(R"(
- hosts: all
  tasks:
    - find:
        paths: /srv/old
      register: r
    - file:
        path: "{{ item.path }}"
        state: absent
      loop: "{{ r.files }}"
)");
  ASSERT_EQ(outs.size(), 1u);
  ASSERT_EQ(outs[0].delta.size(), 1u);
  ElementPath glob("dir_glob", Value::pair(P("/srv/old/*"), remote()));
  EXPECT_TRUE(outs[0].initial.find_attr({glob, "matches"}));
}

TEST(CompilePlaybook, StatGuardsReboot) {
  auto outs = run(R"(
- hosts: all
  tasks:
    - stat: path=/var/run/reboot-required
      register: r
    - reboot:
      when: r.stat.exists
)");
  ASSERT_EQ(outs.size(), 2u);
  int rebooted = 0;
  for (const auto& o : outs) {
    EXPECT_FALSE(o.failed());
    rebooted += o.delta.find_elem(ElementPath("reboot", Value::unit())) == Presence::Present;
  }
  EXPECT_EQ(rebooted, 1);
}

TEST(CompilePlaybook, TemplatesUsePlayVars) {
  auto outs = run(R"(
- hosts: all
  vars:
    user: dev
  tasks:
    - file:
        path: "/home/{{ user }}/.zshrc"
        state: touch
)");
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0].delta.find_elem(ElementPath("file", Value::pair(P("/home/dev/.zshrc"), remote()))), Presence::Present);
}

TEST(CompilePlaybook, TemplateErrors) {
  EXPECT_EQ(code_of([] { run("- hosts: all\n  tasks:\n    - file: path={{nope}} state=touch\n"); }), ErrorCode::UnboundVariable);
  EXPECT_EQ(code_of([] { run("- hosts: all\n  tasks:\n    - file:\n        path: \"{{ p | default('/x') }}\"\n"); }),
            ErrorCode::UnsupportedFeature);
  EXPECT_EQ(code_of([] { run("- hosts: all\n  tasks:\n    - apt: name=x\n      when: ansible_kernel == \"5\"\n"); }),
            ErrorCode::UnknownFactVariable);
}

TEST(Playbook, FreeFormKeepsTemplatesWhole) {
  auto ast = parse_playbook("- hosts: all\n  tasks:\n    - file: path={{ item.path }} state=absent\n      loop: [a]\n");
  EXPECT_EQ(*ast.plays[0].tasks[0].arg("path"), S("{{ item.path }}"));
  EXPECT_EQ(*ast.plays[0].tasks[0].arg("state"), S("absent"));
}
