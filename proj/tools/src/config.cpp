#include "ocf/tools/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ocf::tools {

std::string Trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

Config Config::Parse(std::istream& in, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string text = Trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'");
    }
    std::string key = Trim(text.substr(0, eq));
    std::string value = Trim(text.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
    }
    auto [it, inserted] = cfg.entries_.try_emplace(key, Entry{value, line});
    if (!inserted) {
      throw ConfigError(source + ":" + std::to_string(line) + ": key '" + key +
                        "' already set on line " + std::to_string(it->second.line));
    }
  }
  return cfg;
}

Config Config::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return Parse(in, path);
}

void Config::Set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, 0};
}

void Config::Fail(const std::string& key, const std::string& what) const {
  auto it = entries_.find(key);
  std::string where = source_;
  if (it != entries_.end()) {
    where += it->second.line == 0 ? " (command line)" : ":" + std::to_string(it->second.line);
  }
  throw ConfigError(where + ": key '" + key + "': " + what);
}

const Config::Entry& Config::Find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string Config::GetString(const std::string& key) const { return Find(key).value; }

std::string Config::GetString(const std::string& key, const std::string& fallback) const {
  return has(key) ? GetString(key) : fallback;
}

namespace {

std::optional<double> ParseDouble(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

double Config::GetDouble(const std::string& key) const {
  const std::string& s = Find(key).value;
  auto v = ParseDouble(s);
  if (!v) Fail(key, "expected a number, got '" + s + "'");
  return *v;
}

double Config::GetDouble(const std::string& key, double fallback) const {
  return has(key) ? GetDouble(key) : fallback;
}

std::uint64_t Config::GetUnsigned(const std::string& key) const {
  const std::string& s = Find(key).value;
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    Fail(key, "expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::uint64_t Config::GetUnsigned(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? GetUnsigned(key) : fallback;
}

bool Config::GetBool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = Find(key).value;
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  Fail(key, "expected true or false, got '" + s + "'");
}

std::vector<double> Config::GetDoubles(const std::string& key,
                                       std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const std::string& part : GetList(key, ',')) {
    auto v = ParseDouble(part);
    if (!v) Fail(key, "expected a comma-separated list of numbers, got '" + part + "'");
    out.push_back(*v);
  }
  if (out.empty()) Fail(key, "expected at least one number");
  return out;
}

std::vector<std::string> Config::GetList(const std::string& key, char sep) const {
  std::vector<std::string> out;
  std::stringstream ss(Find(key).value);
  std::string part;
  while (std::getline(ss, part, sep)) {
    part = Trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

void Config::RequireKnown(const std::set<std::string>& known) const {
  const std::pair<const std::string, Entry>* worst = nullptr;
  for (const auto& kv : entries_) {
    if (known.count(kv.first)) continue;
    if (worst == nullptr || kv.second.line < worst->second.line) worst = &kv;
  }
  if (worst != nullptr) Fail(worst->first, "unknown key");
}

}  // namespace ocf::tools
