#include "ocf/policy_spec.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "ocf/csv.hpp"
#include "ocf/partitioning.hpp"

namespace ocf {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PolicySpec Spec() {
    PolicySpec spec;
    spec.name = Identifier();
    SkipSpace();
    if (Peek() == '(') {
      ++pos_;
      SkipSpace();
      if (Peek() != ')') {
        for (;;) {
          SkipSpace();
          char c = Peek();
          if (std::isalpha(static_cast<unsigned char>(c))) {
            if (spec.sub) Fail("at most one nested policy is allowed");
            spec.sub = std::make_shared<PolicySpec>(Spec());
          } else {
            if (spec.sub) Fail("numbers must precede the nested policy");
            spec.numbers.push_back(Number());
          }
          SkipSpace();
          if (Peek() == ',') {
            ++pos_;
            continue;
          }
          break;
        }
      }
      SkipSpace();
      if (Peek() != ')') Fail("expected ')'");
      ++pos_;
    }
    return spec;
  }

  void ExpectEnd() {
    SkipSpace();
    if (pos_ != text_.size()) Fail("unexpected trailing text");
  }

 private:
  char Peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string Identifier() {
    SkipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) Fail("expected a policy name");
    return std::string(text_.substr(start, pos_ - start));
  }

  double Number() {
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (pos_ < text_.size() && text_[pos_] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || !std::isfinite(v)) Fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw PolicySpecError("policy '" + std::string(text_) + "' at column " +
                          std::to_string(pos_ + 1) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool IsExplorer(const std::string& name) {
  return name == "uniform_explore" || name == "degree_power" || name == "idexp" ||
         name == "bpexp";
}

void Validate(const PolicySpec& s) {
  auto fail = [&](const std::string& what) {
    throw PolicySpecError("policy '" + s.ToString() + "': " + what);
  };
  auto want = [&](std::size_t numbers, bool sub) {
    if (s.numbers.size() != numbers) {
      fail("expected " + std::to_string(numbers) + " numeric argument(s)");
    }
    if (static_cast<bool>(s.sub) != sub) fail(sub ? "missing nested policy" : "unexpected nested policy");
  };
  const std::string& n = s.name;
  if (n == "bpexp" || n == "idexp" || n == "uniform_explore" || n == "genie" || n == "ulexp") {
    want(0, false);
  } else if (n == "degree_power") {
    want(1, false);
  } else if (n == "exploit_when_possible") {
    want(0, true);
  } else if (n == "exploit_above_threshold") {
    want(1, true);
    if (s.numbers[0] < 0.0) fail("threshold must be >= 0");
  } else if (n == "ulexp_f") {
    if (s.numbers.empty() || s.numbers.size() > 2 || s.sub) fail("expected (f) or (f, delta)");
    double f = s.numbers[0];
    if (f < 1.0 || f != std::floor(f) || f > 1e6) fail("f must be a positive integer");
    if (s.numbers.size() == 2 && !(s.numbers[1] >= 0.0 && s.numbers[1] < 0.5)) {
      fail("delta must lie in [0, 0.5)");
    }
  } else {
    std::string known;
    for (const auto& k : KnownPolicies()) known += (known.empty() ? "" : ", ") + k;
    fail("unknown policy; known: " + known);
  }
  if (s.sub) {
    if (!IsExplorer(s.sub->name)) {
      fail("nested policy must be one of uniform_explore, degree_power(x), idexp, bpexp");
    }
    Validate(*s.sub);
  }
}

std::unique_ptr<Explorer> MakeExplorer(const PolicySpec& s,
                                       const std::shared_ptr<const SemiMatching>& matching) {
  if (s.name == "bpexp") return std::make_unique<PartitionExplorer>(matching);
  if (s.name == "idexp") return std::make_unique<InverseDegreeSetExplorer>();
  if (s.name == "degree_power") return std::make_unique<DegreePowerExplorer>(s.numbers[0]);
  return std::make_unique<DegreePowerExplorer>(0.0);  // uniform_explore
}

bool NeedsMatching(const PolicySpec& s) {
  return s.name == "bpexp" || (s.sub && NeedsMatching(*s.sub));
}

}  // namespace

PolicySpec PolicySpec::Parse(std::string_view text) {
  Parser p(text);
  PolicySpec spec = p.Spec();
  p.ExpectEnd();
  Validate(spec);
  return spec;
}

std::string PolicySpec::ToString() const {
  std::string out = name;
  if (numbers.empty() && !sub) return out;
  out += '(';
  bool first = true;
  for (double x : numbers) {
    if (!first) out += ", ";
    out += FormatNumber(x);
    first = false;
  }
  if (sub) {
    if (!first) out += ", ";
    out += sub->ToString();
  }
  out += ')';
  return out;
}

bool PolicySpec::finite_capable() const { return name != "ulexp" && name != "ulexp_f"; }

bool PolicySpec::infinite_capable() const {
  return name == "ulexp" || name == "ulexp_f" || name == "genie";
}

const std::vector<std::string>& KnownPolicies() {
  static const std::vector<std::string> names = {
      "bpexp",   "idexp",   "uniform_explore", "degree_power", "exploit_when_possible",
      "exploit_above_threshold", "ulexp", "ulexp_f", "genie"};
  return names;
}

FinitePolicyMaker MakeFinitePolicyMaker(const PolicySpec& spec, const AccessGraph& g) {
  if (!spec.finite_capable()) {
    throw PolicySpecError("policy '" + spec.ToString() + "' needs the infinite-horizon setting");
  }
  std::shared_ptr<const SemiMatching> matching;
  if (NeedsMatching(spec)) {
    matching = std::make_shared<const SemiMatching>(BalancedSemiMatching(g));
  }
  auto shared_spec = std::make_shared<const PolicySpec>(spec);
  return [shared_spec, matching]() -> std::unique_ptr<FinitePolicy> {
    const PolicySpec& s = *shared_spec;
    const std::string label = s.ToString();
    if (s.name == "genie") return std::make_unique<GeniePolicy>();
    if (s.name == "exploit_when_possible") {
      return std::make_unique<ThresholdExploitPolicy>(label, 0.0, MakeExplorer(*s.sub, matching));
    }
    if (s.name == "exploit_above_threshold") {
      return std::make_unique<ThresholdExploitPolicy>(label, s.numbers[0],
                                                      MakeExplorer(*s.sub, matching));
    }
    return std::make_unique<SplitPolicy>(label, MakeExplorer(s, matching));
  };
}

VisitPolicyMaker MakeVisitPolicyMaker(const PolicySpec& spec) {
  if (!spec.infinite_capable()) {
    throw PolicySpecError("policy '" + spec.ToString() + "' needs the finite-population setting");
  }
  std::string name = spec.name;
  return [name]() -> std::unique_ptr<VisitPolicy> {
    if (name == "ulexp") return std::make_unique<UlExpPolicy>();
    if (name == "ulexp_f") return std::make_unique<UlExpFPolicy>();
    return std::make_unique<VisitGeniePolicy>();
  };
}

void ApplyPolicyParameters(const PolicySpec& spec, InfiniteConfig& cfg) {
  if (spec.name != "ulexp_f") return;
  cfg.views_needed = static_cast<std::uint32_t>(spec.numbers[0]);
  cfg.delta = spec.numbers.size() > 1 ? spec.numbers[1] : 0.0;
}

}  // namespace ocf
