#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "intentcheck/error.hpp"

namespace intentcheck::kb {

/// One curated fact: `category | key | os-family-or-* | value | extra`.
struct KbEntry {
  std::string category;
  std::string key;
  std::string os;
  std::string value;
  std::string extra;
  int line = 0;

  auto tie() const { return std::tie(category, key, os, value, extra); }
};

class KnowledgeBase {
 public:
  static KnowledgeBase parse(const std::string& text, const std::string& source = "<kb>") {
    KnowledgeBase kb;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::set<std::tuple<std::string, std::string, std::string, std::string, std::string>> seen;
    while (std::getline(in, raw)) {
      ++lineno;
      auto hash = raw.find('#');
      std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (line.empty()) continue;
      std::vector<std::string> fields;
      std::string cur;
      for (char c : line) {
        if (c == '|') {
          fields.push_back(trim(cur));
          cur.clear();
        } else {
          cur += c;
        }
      }
      fields.push_back(trim(cur));
      if (fields.size() < 4 || fields.size() > 5)
        raise(ErrorCode::KbParseError, source + ":" + std::to_string(lineno) + ": expected 4 or 5 '|'-separated fields");
      fields.resize(5);
      for (int i = 0; i < 3; ++i)
        if (fields[i].empty()) raise(ErrorCode::KbParseError, source + ":" + std::to_string(lineno) + ": empty field " + std::to_string(i + 1));
      KbEntry e{fields[0], fields[1], fields[2], fields[3], fields[4], lineno};
      check_template(e.value, source, lineno);
      if (!seen.insert(e.tie()).second)
        raise(ErrorCode::KbDuplicateEntry, source + ":" + std::to_string(lineno) + ": duplicate entry " + e.category + " | " + e.key);
      kb.entries_.push_back(std::move(e));
    }
    return kb;
  }

  static KnowledgeBase load(const std::string& path) {
    std::ifstream f(path);
    if (!f) raise(ErrorCode::Io, "cannot read knowledge base " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
  }

  const std::vector<KbEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool has(const std::string& category, const std::string& key) const {
    for (const auto& e : entries_)
      if (e.category == category && e.key == key) return true;
    return false;
  }

  /// All entries for (category, key) applicable to `os` ("*" rows apply to every os;
  /// passing "*" returns only os-independent rows). Miss yields an empty set.
  std::vector<KbEntry> lookup(const std::string& category, const std::string& key, const std::string& os = "*") const {
    std::vector<KbEntry> out;
    for (const auto& e : entries_)
      if (e.category == category && e.key == key && (e.os == "*" || e.os == os)) out.push_back(e);
    return out;
  }

  /// Os families with dedicated rows for (category, key), in file order.
  std::vector<std::string> families(const std::string& category, const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
      if (e.category == category && e.key == key && e.os != "*" && std::find(out.begin(), out.end(), e.os) == out.end())
        out.push_back(e.os);
    return out;
  }

  /// Keys of a category, in file order.
  std::vector<std::string> keys(const std::string& category) const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
      if (e.category == category && std::find(out.begin(), out.end(), e.key) == out.end()) out.push_back(e.key);
    return out;
  }

  /// Fills `{name}` holes; an unfilled hole is a kb miss.
  static std::string instantiate(const std::string& tmpl, const std::map<std::string, std::string>& params) {
    std::string out;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
      if (tmpl[i] != '{') {
        out += tmpl[i];
        continue;
      }
      auto close = tmpl.find('}', i);
      std::string name = tmpl.substr(i + 1, close - i - 1);
      auto it = params.find(name);
      if (it == params.end()) raise(ErrorCode::KbMiss, "template '" + tmpl + "' needs parameter '" + name + "'");
      out += it->second;
      i = close;
    }
    return out;
  }

  static std::vector<std::string> template_params(const std::string& tmpl) {
    std::vector<std::string> out;
    for (std::size_t i = tmpl.find('{'); i != std::string::npos; i = tmpl.find('{', i + 1))
      out.push_back(tmpl.substr(i + 1, tmpl.find('}', i) - i - 1));
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static void check_template(const std::string& v, const std::string& source, int line) {
    int depth = 0;
    for (char c : v) {
      if (c == '{') ++depth;
      if (c == '}') --depth;
      if (depth < 0 || depth > 1) raise(ErrorCode::KbParseError, source + ":" + std::to_string(line) + ": unbalanced template braces");
    }
    if (depth != 0) raise(ErrorCode::KbParseError, source + ":" + std::to_string(line) + ": unbalanced template braces");
  }

  std::vector<KbEntry> entries_;
};

}  // namespace intentcheck::kb
