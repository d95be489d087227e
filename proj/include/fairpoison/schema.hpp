#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fairpoison/errors.hpp"

namespace fairpoison {

// ---------------------------------------------------------------------------
// Flat key-value config grammar, shared by dataset schemas and experiment
// files:
//
//   file    := line*
//   line    := blank | comment | entry
//   comment := '#' rest-of-line          (first non-space character is '#')
//   entry   := key '=' value             (value is trimmed, may be empty)
//   key     := [A-Za-z_][A-Za-z0-9_]*
//
// Keys may repeat; meaning is per-consumer.
// ---------------------------------------------------------------------------

struct KeyValueEntry {
  std::string key;
  std::string value;
  int line = 0;
};

namespace detail {
inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(k[0])) && k[0] != '_') return false;
  return std::all_of(k.begin(), k.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}
}  // namespace detail

class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text) {
    KeyValueFile kv;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      ++line_no;
      const std::string line = detail::trim(raw);
      if (!line.empty() && line[0] != '#') {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
          throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        KeyValueEntry e;
        e.key = detail::trim(std::string_view(line).substr(0, eq));
        e.value = detail::trim(std::string_view(line).substr(eq + 1));
        e.line = line_no;
        if (!detail::valid_key(e.key))
          throw ConfigError("line " + std::to_string(line_no) + ": invalid key '" + e.key + "'");
        kv.entries_.push_back(std::move(e));
      }
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    return kv;
  }

  const std::vector<KeyValueEntry>& entries() const { return entries_; }

  std::optional<std::string> get(std::string_view key) const {
    std::optional<std::string> found;
    for (const auto& e : entries_) {
      if (e.key == key) {
        if (found) throw ConfigError("key '" + std::string(key) + "' given more than once");
        found = e.value;
      }
    }
    return found;
  }

  std::vector<std::string> get_all(std::string_view key) const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
      if (e.key == key) out.push_back(e.value);
    return out;
  }

 private:
  std::vector<KeyValueEntry> entries_;
};

// ---------------------------------------------------------------------------
// Dataset schema
// ---------------------------------------------------------------------------

enum class FeatureKind { numeric, categorical };

struct FeatureDecl {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
};

/// Declares how a CSV maps onto a Dataset: which column carries the label and
/// which value of it is positive, which column is the sensitive attribute and
/// which value is advantaged, and the typed feature list. The sensitive (or
/// label) column may additionally be declared as a feature; that is legal and
/// only flagged.
struct DatasetSchema {
  std::string label_column;
  std::string positive_label_value;
  std::string sensitive_column;
  std::string advantaged_value;
  std::vector<FeatureDecl> feature_columns;
  std::vector<std::string> drop_columns;
  bool sensitive_as_feature = false;
  bool label_as_feature = false;
};

/// Schema config keys: label_column, positive_label_value, sensitive_column,
/// advantaged_value (each exactly once), feature = "<name> <numeric|categorical>"
/// (repeatable, at least one), drop = "<name>" (repeatable). Unknown keys are
/// rejected.
inline DatasetSchema parse_schema(std::string_view config_text) {
  const KeyValueFile kv = KeyValueFile::parse(config_text);

  static const std::set<std::string> known = {
      "label_column", "positive_label_value", "sensitive_column",
      "advantaged_value", "feature", "drop"};
  for (const auto& e : kv.entries()) {
    if (!known.count(e.key))
      throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key + "'");
  }

  DatasetSchema s;
  auto require = [&](const char* key) {
    auto v = kv.get(key);
    if (!v) throw ConfigError(std::string("missing mandatory key '") + key + "'");
    if (v->empty()) throw ConfigError(std::string("key '") + key + "' has empty value");
    return *v;
  };
  s.label_column = require("label_column");
  s.positive_label_value = require("positive_label_value");
  s.sensitive_column = require("sensitive_column");
  s.advantaged_value = require("advantaged_value");

  std::set<std::string> seen;
  for (const auto& v : kv.get_all("feature")) {
    const auto toks = detail::split_ws(v);
    if (toks.size() != 2)
      throw ConfigError("feature '" + v + "': expected '<column> <numeric|categorical>'");
    FeatureDecl f;
    f.name = toks[0];
    if (toks[1] == "numeric")
      f.kind = FeatureKind::numeric;
    else if (toks[1] == "categorical")
      f.kind = FeatureKind::categorical;
    else
      throw ConfigError("feature '" + f.name + "': unknown kind '" + toks[1] + "'");
    if (!seen.insert(f.name).second)
      throw ConfigError("column '" + f.name + "' declared more than once");
    s.feature_columns.push_back(std::move(f));
  }
  if (s.feature_columns.empty())
    throw ConfigError("schema declares no feature columns");

  for (const auto& v : kv.get_all("drop")) {
    const auto toks = detail::split_ws(v);
    if (toks.size() != 1) throw ConfigError("drop '" + v + "': expected a single column name");
    if (seen.count(toks[0]))
      throw ConfigError("column '" + toks[0] + "' declared more than once");
    if (std::find(s.drop_columns.begin(), s.drop_columns.end(), toks[0]) != s.drop_columns.end())
      throw ConfigError("column '" + toks[0] + "' declared more than once");
    s.drop_columns.push_back(toks[0]);
  }

  s.sensitive_as_feature = seen.count(s.sensitive_column) > 0;
  s.label_as_feature = seen.count(s.label_column) > 0;
  return s;
}

}  // namespace fairpoison
