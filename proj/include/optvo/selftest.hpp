#pragma once

#include "optvo/checks.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace optvo {

/// fast (<= 5 s): derivative, Gamma, decomposition, sensitivity, tuner and quadratic checks.
/// standard (<= 60 s): fast plus Euler order, benchmark polish and E1 desk-scale convergence.
/// full (<= 10 min): standard plus the E1 full-scale terminal quality.
enum class Suite { Fast, Standard, Full };

/// Throws std::invalid_argument for names other than fast, standard, full.
Suite parse_suite(const std::string& name);

std::vector<verify::CheckResult> run_selftest(Suite suite, std::ostream* progress = nullptr);

/// Prints a pass/fail table; exit code 0 only when every check passed.
int cmd_selftest(const std::string& suite, std::ostream& out);

}  // namespace optvo
