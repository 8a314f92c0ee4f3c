#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "admissible/core/errors.hpp"

namespace admissible::cli {

/// Value of a flat TOML-style key: string, number, boolean or numeric array.
using ConfigValue = std::variant<std::string, double, bool, std::vector<double>>;

/// Parser for the TOML subset used by experiment files: `[section]` headers,
/// `key = value` lines, `#` comments; values are quoted strings, numbers,
/// true/false, or one-line arrays of numbers. Keys are addressed as
/// "section.key" (top-level keys have no prefix).
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_array(const std::string& key, const std::vector<double>& fallback) const;

  void set(const std::string& key, ConfigValue v) { values_[key] = std::move(v); }
  /// Keys present in the file but never read; used to reject typos.
  std::vector<std::string> unused_keys() const;
  const std::string& origin() const { return origin_; }

 private:
  const ConfigValue* lookup(const std::string& key) const;

  std::map<std::string, ConfigValue> values_;
  mutable std::set<std::string> used_;
  std::string origin_;
};

}  // namespace admissible::cli
