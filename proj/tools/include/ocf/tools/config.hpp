#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocf::tools {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text. '#' starts a comment, blank lines are skipped,
/// a repeated key is an error. Every typed getter reports the source line of
/// the offending entry.
class Config {
 public:
  static Config Parse(std::istream& in, const std::string& source = "<config>");
  static Config Load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  /// Command-line override; recorded as line 0.
  void Set(const std::string& key, const std::string& value);

  std::string GetString(const std::string& key) const;
  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::uint64_t GetUnsigned(const std::string& key) const;
  std::uint64_t GetUnsigned(const std::string& key, std::uint64_t fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;
  /// Comma-separated numbers.
  std::vector<double> GetDoubles(const std::string& key, std::vector<double> fallback) const;
  /// `sep`-separated, trimmed, non-empty items.
  std::vector<std::string> GetList(const std::string& key, char sep) const;

  /// Throws on the first key (by line) that is not in `known`.
  void RequireKnown(const std::set<std::string>& known) const;

  [[noreturn]] void Fail(const std::string& key, const std::string& what) const;

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };
  const Entry& Find(const std::string& key) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
};

std::string Trim(const std::string& s);

}  // namespace ocf::tools
