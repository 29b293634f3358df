#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "intentcheck/calculus/labels.hpp"
#include "intentcheck/error.hpp"

namespace intentcheck::modlang {

struct Type {
  enum class Kind { Any, Unit, Path, String, Bool, Int, List, Enum };
  Kind kind = Kind::Any;
  std::string name;                  // enum name
  std::shared_ptr<const Type> elem;  // list element

  static Type of(Kind k) {
    Type t;
    t.kind = k;
    return t;
  }
  static Type enum_type(std::string n) {
    Type t;
    t.kind = Kind::Enum;
    t.name = std::move(n);
    return t;
  }
  static Type list_of(Type e) {
    Type t;
    t.kind = Kind::List;
    t.elem = std::make_shared<const Type>(std::move(e));
    return t;
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::Any: return "any";
      case Kind::Unit: return "unit";
      case Kind::Path: return "path";
      case Kind::String: return "string";
      case Kind::Bool: return "bool";
      case Kind::Int: return "int";
      case Kind::List: return "list<" + elem->to_string() + ">";
      case Kind::Enum: return name;
    }
    return "?";
  }

  friend bool operator==(const Type& a, const Type& b) {
    if (a.kind != b.kind || a.name != b.name) return false;
    if (a.kind != Kind::List) return true;
    return *a.elem == *b.elem;
  }
};

struct ElementDecl {
  std::string label;
  std::vector<Type> keys;
  std::map<std::string, Type> attrs;
};

/// Enums, element labels and global attributes visible to module definitions.
class DeclTable {
 public:
  void add_enum(const std::string& name, std::vector<std::string> members) {
    if (enums_.count(name)) raise(ErrorCode::DuplicateArgument, "enum '" + name + "' declared twice");
    enums_[name] = std::move(members);
  }
  void add_element(ElementDecl d) {
    if (elements_.count(d.label)) raise(ErrorCode::DuplicateArgument, "element '" + d.label + "' declared twice");
    auto label = d.label;
    elements_.emplace(std::move(label), std::move(d));
  }
  void add_attribute(const std::string& name, Type t) {
    if (attributes_.count(name)) raise(ErrorCode::DuplicateArgument, "attribute '" + name + "' declared twice");
    attributes_.emplace(name, std::move(t));
  }

  const std::vector<std::string>* enum_members(const std::string& name) const {
    auto it = enums_.find(name);
    return it == enums_.end() ? nullptr : &it->second;
  }
  bool has_enum_member(const std::string& e, const std::string& m) const {
    auto* ms = enum_members(e);
    return ms && std::find(ms->begin(), ms->end(), m) != ms->end();
  }
  const ElementDecl* element(const std::string& label) const {
    auto it = elements_.find(label);
    return it == elements_.end() ? nullptr : &it->second;
  }
  const Type* attribute(const std::string& name) const {
    auto it = attributes_.find(name);
    return it == attributes_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, std::vector<std::string>>& enums() const { return enums_; }
  const std::map<std::string, ElementDecl>& elements() const { return elements_; }
  const std::map<std::string, Type>& attributes() const { return attributes_; }

  calculus::LabelTable labels() const {
    calculus::LabelTable t;
    for (const auto& [k, d] : elements_) {
      t.add_element(k);
      for (const auto& [a, ty] : d.attrs) t.add_attribute(a);
    }
    for (const auto& [k, ty] : attributes_) t.add_attribute(k);
    return t;
  }

 private:
  std::map<std::string, std::vector<std::string>> enums_;
  std::map<std::string, ElementDecl> elements_;
  std::map<std::string, Type> attributes_;
};

}  // namespace intentcheck::modlang
