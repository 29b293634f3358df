#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "intentcheck/calculus/program.hpp"

namespace intentcheck::interp {

/// Lowered stateful function: named inputs plus a calculus body.
struct ModuleDef {
  std::string name;
  std::vector<std::string> params;
  calculus::Program body;
};

class ModuleTable {
 public:
  void add(ModuleDef def) {
    if (defs_.count(def.name)) raise(ErrorCode::DuplicateArgument, "stateful function '" + def.name + "' defined twice");
    auto name = def.name;
    defs_.emplace(std::move(name), std::move(def));
  }
  const ModuleDef* find(const std::string& name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : &it->second;
  }
  const ModuleDef& require(const std::string& name) const {
    if (auto* d = find(name)) return *d;
    raise(ErrorCode::UnknownStatefulFunction, "stateful function '" + name + "' is not defined");
  }
  std::set<std::string> names() const {
    std::set<std::string> out;
    for (const auto& [k, v] : defs_) out.insert(k);
    return out;
  }
  const std::map<std::string, ModuleDef>& all() const { return defs_; }

 private:
  std::map<std::string, ModuleDef> defs_;
};

/// Call arguments travel as a list of <"name", value> pairs.
inline calculus::Value make_record(const std::vector<std::pair<std::string, calculus::Value>>& fields) {
  std::vector<calculus::Value> items;
  for (const auto& [k, v] : fields) items.push_back(calculus::Value::pair(calculus::Value::string(k), v));
  return calculus::Value::list(std::move(items));
}

}  // namespace intentcheck::interp
