#pragma once

#include <set>
#include <string>

#include "intentcheck/error.hpp"

namespace intentcheck::calculus {

/// Registry of the attribute and element labels a state may mention.
/// Populated by module declarations and built-ins; read-only during interpretation.
class LabelTable {
 public:
  void add_attribute(const std::string& name) {
    if (name.empty()) raise(ErrorCode::UnregisteredLabel, "empty attribute label");
    attributes_.insert(name);
  }
  void add_element(const std::string& name) {
    if (name.empty()) raise(ErrorCode::UnregisteredLabel, "empty element label");
    elements_.insert(name);
  }
  bool has_attribute(const std::string& name) const { return attributes_.count(name) != 0; }
  bool has_element(const std::string& name) const { return elements_.count(name) != 0; }

  void require_attribute(const std::string& name) const {
    if (!has_attribute(name)) raise(ErrorCode::UnregisteredLabel, "attribute label '" + name + "' is not registered");
  }
  void require_element(const std::string& name) const {
    if (!has_element(name)) raise(ErrorCode::UnregisteredLabel, "element label '" + name + "' is not registered");
  }

  const std::set<std::string>& attributes() const { return attributes_; }
  const std::set<std::string>& elements() const { return elements_; }

 private:
  std::set<std::string> attributes_;
  std::set<std::string> elements_;
};

}  // namespace intentcheck::calculus
