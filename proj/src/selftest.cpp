#include "optvo/selftest.hpp"

#include <fmt/format.h>

#include <functional>
#include <ostream>
#include <stdexcept>

namespace optvo {

Suite parse_suite(const std::string& name) {
  if (name == "fast") return Suite::Fast;
  if (name == "standard") return Suite::Standard;
  if (name == "full") return Suite::Full;
  throw std::invalid_argument("unknown suite '" + name + "' (expected fast, standard or full)");
}

std::vector<verify::CheckResult> run_selftest(Suite suite, std::ostream* progress) {
  using namespace verify;
  std::vector<std::function<CheckResult()>> checks{
      [] { return check_derivative_hygiene(); },
      [] { return check_gamma_invariants(); },
      [] { return check_decomposition(); },
      [] { return check_sensitivity_equivalence(); },
      [] { return check_tuner_oracle(); },
      [] { return check_quadratic_end_to_end(); },
  };
  if (suite != Suite::Fast) {
    checks.push_back([] { return check_euler_order(); });
    checks.push_back([] { return check_benchmark_polish(); });
    checks.push_back([] { return check_e1_desk_convergence(); });
  }
  if (suite == Suite::Full) checks.push_back([] { return check_e1_full_scale_quality(); });

  std::vector<CheckResult> out;
  for (const auto& run : checks) {
    out.push_back(run());
    if (progress)
      *progress << fmt::format("{:<26} {:<4} {:>8.2f}s  {}\n", out.back().name,
                               out.back().passed ? "PASS" : "FAIL", out.back().seconds,
                               out.back().detail);
  }
  return out;
}

int cmd_selftest(const std::string& suite, std::ostream& out) {
  const Suite s = parse_suite(suite);
  out << fmt::format("{:<26} {:<4} {:>9}  {}\n", "check", "result", "time", "detail");
  const auto results = run_selftest(s, &out);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  out << fmt::format("{} of {} checks passed\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace optvo
