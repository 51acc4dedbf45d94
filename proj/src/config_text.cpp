#include "fowt/config_text.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fowt/common.hpp"

namespace fowt {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

double parse_double(const std::string& text, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  // ERANGE with a finite result is underflow to a subnormal; keep it.
  bool overflow = errno == ERANGE && (v == HUGE_VAL || v == -HUGE_VAL);
  if (end == text.c_str() || *end != '\0' || overflow) {
    throw ConfigError(context + ": not a number: '" + text + "'");
  }
  return v;
}

void ConfigText::set(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    entries_[it->second].second = value;
  } else {
    index_[key] = entries_.size();
    entries_.emplace_back(key, value);
  }
}

void ConfigText::set_double(const std::string& key, double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  set(key, buf);
}

void ConfigText::set_int(const std::string& key, long long value) {
  set(key, std::to_string(value));
}

void ConfigText::set_uint(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

bool ConfigText::has(const std::string& key) const {
  return index_.count(key) != 0;
}

const std::string& ConfigText::require(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) throw ConfigError("missing key: " + key);
  return entries_[it->second].second;
}

std::optional<std::string> ConfigText::get(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].second;
}

double ConfigText::require_double(const std::string& key) const {
  return parse_double(require(key), key);
}

double ConfigText::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  return v ? parse_double(*v, key) : fallback;
}

long long ConfigText::require_int(const std::string& key) const {
  const std::string& v = require(key);
  errno = 0;
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key + ": not an integer: '" + v + "'");
  }
  return x;
}

long long ConfigText::get_int(const std::string& key, long long fallback) const {
  return has(key) ? require_int(key) : fallback;
}

std::uint64_t ConfigText::get_uint(const std::string& key,
                                   std::uint64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  errno = 0;
  char* end = nullptr;
  std::uint64_t x = std::strtoull(v->c_str(), &end, 10);
  if (end == v->c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key + ": not an unsigned integer: '" + *v + "'");
  }
  return x;
}

std::string ConfigText::get_string(const std::string& key,
                                   const std::string& fallback) const {
  auto v = get(key);
  return v ? *v : fallback;
}

void ConfigText::merge_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + t + "'");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    }
    set(key, value);
  }
}

void ConfigText::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  merge_text(ss.str());
}

std::string ConfigText::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
  return out.str();
}

void ConfigText::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << serialize();
  if (!out) throw IoError("write failed: " + path);
}

ConfigText ConfigText::with_prefix_stripped(const std::string& prefix) const {
  ConfigText out;
  for (const auto& [k, v] : entries_) {
    if (k.rfind(prefix, 0) == 0) out.set(k.substr(prefix.size()), v);
  }
  return out;
}

}  // namespace fowt
