#include "admissible/cli/config_file.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace admissible::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::string t;
  for (char c : s) {
    if (c != '_') t += c;
  }
  if (t == "inf" || t == "+inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  std::size_t pos = 0;
  try {
    out = std::stod(t, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == t.size();
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw, section;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail("empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail("expected key = value");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.count(full)) fail("duplicate key '" + full + "'");

    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') fail("unterminated string");
      cfg.values_[full] = value.substr(1, value.size() - 2);
    } else if (value == "true" || value == "false") {
      cfg.values_[full] = value == "true";
    } else if (value.front() == '[') {
      if (value.back() != ']') fail("arrays must fit on one line");
      std::vector<double> items;
      std::stringstream ss(value.substr(1, value.size() - 2));
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        double x = 0.0;
        if (!parse_number(item, x)) fail("non-numeric array entry '" + item + "'");
        items.push_back(x);
      }
      cfg.values_[full] = std::move(items);
    } else {
      double x = 0.0;
      if (!parse_number(value, x)) fail("cannot parse value '" + value + "' (strings must be quoted)");
      cfg.values_[full] = x;
    }
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config file not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

const ConfigValue* ConfigFile::lookup(const std::string& key) const {
  used_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  const ConfigValue* v = lookup(key);
  if (!v) return fallback;
  if (const auto* d = std::get_if<double>(v)) return *d;
  throw ConfigError(origin_ + ": '" + key + "' must be a number");
}

std::uint64_t ConfigFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  const ConfigValue* v = lookup(key);
  if (!v) return fallback;
  const auto* d = std::get_if<double>(v);
  if (!d || *d < 0.0 || *d != std::floor(*d) || *d > 9.007199254740992e15) {
    throw ConfigError(origin_ + ": '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::uint64_t>(*d);
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
  const ConfigValue* v = lookup(key);
  if (!v) return fallback;
  const auto* d = std::get_if<double>(v);
  if (!d || *d != std::floor(*d) || std::abs(*d) > 2e9) throw ConfigError(origin_ + ": '" + key + "' must be an integer");
  return static_cast<int>(*d);
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  const ConfigValue* v = lookup(key);
  if (!v) return fallback;
  if (const auto* b = std::get_if<bool>(v)) return *b;
  throw ConfigError(origin_ + ": '" + key + "' must be true or false");
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  const ConfigValue* v = lookup(key);
  if (!v) return fallback;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  throw ConfigError(origin_ + ": '" + key + "' must be a quoted string");
}

std::vector<double> ConfigFile::get_array(const std::string& key, const std::vector<double>& fallback) const {
  const ConfigValue* v = lookup(key);
  if (!v) return fallback;
  if (const auto* a = std::get_if<std::vector<double>>(v)) return *a;
  throw ConfigError(origin_ + ": '" + key + "' must be an array of numbers");
}

std::vector<std::string> ConfigFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

}  // namespace admissible::cli
