// Runs every acceptance criterion and prints one PASS/FAIL line per
// criterion, followed by its individual checks. Exit status 0 iff all pass.
//
//   ocf_acceptance [suite] [--seed N] [--jobs N]
#include <cstdlib>
#include <iostream>
#include <string>

#include "ocf/tools/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace ocf::tools;
  std::string suite = "all";
  AcceptanceOptions opt;
  for (int k = 1; k < argc; ++k) {
    std::string arg = argv[k];
    if ((arg == "--seed" || arg == "--jobs") && k + 1 < argc) {
      unsigned long long v = std::strtoull(argv[++k], nullptr, 10);
      if (arg == "--seed") {
        opt.seed = v;
      } else {
        opt.jobs = static_cast<std::size_t>(v);
      }
    } else {
      suite = arg;
    }
  }
  opt.progress = &std::cout;
  try {
    std::vector<CriterionResult> results = RunAcceptance(suite, opt);
    std::size_t passed = 0;
    std::cout << "\nsummary\n";
    for (const CriterionResult& r : results) {
      passed += r.pass();
      std::cout << "  criterion " << r.id << " (" << r.suite << "): " << (r.pass() ? "PASS" : "FAIL")
                << '\n';
    }
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    return passed == results.size() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
