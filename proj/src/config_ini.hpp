// Copyright 2026 The Trustware Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Private helpers for the INI-style config files.

#include <charconv>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "trustware/error.hpp"

namespace trustware::config {

using boost::property_tree::ptree;

[[noreturn]] inline void invalid(const std::string& what) { throw Error(Errc::ConfigInvalid, what); }

inline std::int64_t to_int(const std::string& where, const std::string& text) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || text.empty()) invalid(where + ": not an integer: '" + text + "'");
  return v;
}

inline bool to_bool(const std::string& where, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  invalid(where + ": not a boolean: '" + text + "'");
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Reads one section, refusing keys it does not know.
class Section {
 public:
  Section(std::string name, const ptree& tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> str(const std::string& key) {
    known_.insert(key);
    if (auto v = tree_.get_optional<std::string>(ptree::path_type(key, '\0'))) return *v;
    return std::nullopt;
  }
  std::string required(const std::string& key) {
    auto v = str(key);
    if (!v || v->empty()) invalid(name_ + "." + key + ": required");
    return *v;
  }
  void read(const std::string& key, std::string& out) {
    if (auto v = str(key)) out = *v;
  }
  void read(const std::string& key, std::int64_t& out) {
    if (auto v = str(key)) out = to_int(name_ + "." + key, *v);
  }
  void read(const std::string& key, bool& out) {
    if (auto v = str(key)) out = to_bool(name_ + "." + key, *v);
  }
  void finish() const {
    for (const auto& [key, child] : tree_) {
      if (!known_.contains(key)) invalid(name_ + ": unknown key '" + key + "'");
      if (!child.empty()) invalid(name_ + "." + key + ": nested values are not allowed");
    }
  }

 private:
  std::string name_;
  const ptree& tree_;
  std::set<std::string> known_;
};

inline void apply_override(ptree& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) invalid("override '" + assignment + "': expected section.key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  const auto dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
    invalid("override '" + assignment + "': expected section.key=value");
  }
  const std::string section = path.substr(0, dot);
  const std::string key = path.substr(dot + 1);
  auto it = tree.find(section);
  ptree& sec = it == tree.not_found() ? tree.push_back({section, ptree()})->second : it->second;
  sec.put(ptree::path_type(key, '\0'), value);
}

/// Parses INI text and applies `section.key=value` overrides.
inline ptree read_ini_text(const std::string& text, const std::vector<std::string>& overrides,
                           const std::string& origin) {
  ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    invalid(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& o : overrides) apply_override(tree, o);
  return tree;
}

}  // namespace trustware::config
