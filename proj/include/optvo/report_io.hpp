#pragma once

#include "optvo/driver.hpp"
#include "optvo/problem.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace optvo {

/// Serializes a report. Doubles keep 17 significant digits; NaN becomes null.
/// With `timing` false every elapsed time is written as null.
nlohmann::json report_to_json(const RunReport& report, bool timing = true);
/// Inverse of report_to_json for the scalar record fields, counters and terminal point.
RunReport report_from_json(const nlohmann::json& j);

void write_report_json(const std::string& path, const RunReport& report, bool timing = true);
RunReport read_report_json(const std::string& path);

/// One line of the comparison table.
struct ComparisonRow {
  std::string approach;
  IterationRecord record;
};

/// Benchmark, PCM, every OP-TVO iteration, Newton, in the order of `reports`.
std::vector<ComparisonRow> comparison_rows(const std::vector<RunReport>& reports);

inline constexpr const char* kComparisonHeader =
    "approach,optimal_value,constraint_violation,elapsed_time_s,linear_solves,O_d,Ohat_d";

/// Objective formatted from its log when it underflows, e.g. "1.23456789012345e-4735".
std::string format_objective(double objective, double log_objective);

/// Table text with the header line; missing values are "N/A".
std::string comparison_csv(const std::vector<ComparisonRow>& rows, bool timing = true);

/// theta, agent, component, value (agent and component 1-based).
std::string trajectory_csv(const std::vector<BlockPoint>& points, const ThetaGrid& grid);
/// Same columns over the sweep velocities at theta_0..theta_{L-1}.
std::string velocities_csv(const Trajectory& traj);
/// theta, agent, c, b.
std::string c_path_csv(const ParametricPath& c, const Vector& p0);

/// Reads a trajectory CSV (and optionally the velocities CSV written next to it).
/// m_hat and the raw estimate are recomputed from the velocities.
Trajectory read_trajectory_csv(const std::string& points_path, const std::string& velocities_path,
                               const std::string& problem_name);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// 17-significant-digit shortest round-trip representation.
std::string fmt_double(double v);

}  // namespace optvo
