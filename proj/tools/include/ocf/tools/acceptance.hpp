#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ocf::tools {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;  // measured values
};

struct CriterionResult {
  int id = 0;
  std::string suite;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool pass() const;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240601;
  std::size_t jobs = 0;
  // Replaces every Monte Carlo trial count when set.
  std::optional<std::size_t> trials;
  // Receives one line per finished criterion.
  std::ostream* progress = nullptr;
};

/// Suite names in criterion order, followed by "all".
const std::vector<std::string>& AcceptanceSuites();

/// Throws ConfigError for an unknown suite, listing the available ones.
std::vector<CriterionResult> RunAcceptance(const std::string& suite,
                                           const AcceptanceOptions& opt);

/// "[PASS]  3 bpexp         ..." followed by one indented line per check.
std::string FormatResult(const CriterionResult& r);

/// Machine-readable report: one object per criterion with its checks.
std::string ResultsJson(const std::vector<CriterionResult>& results);

}  // namespace ocf::tools
