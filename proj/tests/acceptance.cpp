// Acceptance run: one PASS/FAIL line per criterion. With an argument k only criterion k runs.

#include "optvo/checks.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <functional>
#include <map>

using namespace optvo::verify;

int main(int argc, char** argv) {
  const std::map<int, std::function<CheckResult()>> criteria{
      {1, [] { return check_gamma_invariants(50, 11); }},
      {2, [] { return check_decomposition(50, 11); }},
      {3, [] { return check_sensitivity_equivalence(24, 5); }},
      {4, [] { return check_tuner_oracle(20, 3); }},
      {5, [] { return check_quadratic_end_to_end(); }},
      {6, [] { return check_e1_desk_scale(); }},
      {7, [] { return check_e1_full_scale(); }},
      {8, [] { return check_euler_order(); }},
      {9, [] { return check_derivative_hygiene(20, 2); }},
  };
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  if (only != 0 && !criteria.count(only)) {
    fmt::print(stderr, "no criterion {}\n", argv[1]);
    return 2;
  }
  int failed = 0;
  for (const auto& [k, run] : criteria) {
    if (only != 0 && k != only) continue;
    const CheckResult r = run();
    fmt::print("criterion {} {} [{}] ({:.2f} s): {}\n", k, r.passed ? "PASS" : "FAIL", r.name,
               r.seconds, r.detail);
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
