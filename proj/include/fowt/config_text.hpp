#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fowt {

// Flat "key = value" text with '#' comments. Insertion order is preserved so
// serialized files and manifests diff cleanly. Later assignments to an
// existing key overwrite in place, which is how config overlays and
// command-line overrides are merged.
class ConfigText {
 public:
  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, long long value);
  void set_uint(const std::string& key, std::uint64_t value);

  bool has(const std::string& key) const;
  const std::string& require(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  double require_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long require_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  // Parses and merges lines into this object. Unparseable lines raise
  // ConfigError naming the line number.
  void merge_text(const std::string& text);
  void merge_file(const std::string& path);

  std::string serialize() const;
  void write_file(const std::string& path) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  // Keys beginning with the given prefix, with the prefix stripped.
  ConfigText with_prefix_stripped(const std::string& prefix) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
};

double parse_double(const std::string& text, const std::string& context);

}  // namespace fowt
