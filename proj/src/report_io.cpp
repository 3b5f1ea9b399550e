#include "optvo/report_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace optvo {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : json(nullptr);
}

double get_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

std::optional<double> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string display_name(const RunReport& r, const IterationRecord& rec) {
  if (r.solver == "benchmark") return "Benchmark";
  if (r.solver == "pcm") return "PCM";
  if (r.solver == "newton") return "Newton";
  if (r.solver == "optvo") return fmt::format("OP-TVO iter={}", rec.iteration);
  return r.solver;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

json report_to_json(const RunReport& report, bool timing) {
  json records = json::array();
  for (const IterationRecord& r : report.records) {
    records.push_back({
        {"iteration", r.iteration},
        {"objective", number(r.quality.objective)},
        {"log_objective", number(r.quality.log_objective)},
        {"constraint_violation", number(r.quality.violation)},
        {"elapsed_time_s", timing ? number(r.elapsed_s) : json(nullptr)},
        {"linear_solves", r.linear_solves},
        {"O_d", optional_number(r.od)},
        {"Ohat_d", optional_number(r.ohat)},
        {"Ohat_d_raw", optional_number(r.ohat_raw)},
    });
  }
  json j = {
      {"solver", report.solver},
      {"problem", report.problem},
      {"status", report.status},
      {"selected_iteration", report.selected_iteration},
      {"newton_steps", report.newton_steps},
      {"counters",
       {{"agent_solves", report.counters.agent_solves},
        {"weight_solves", report.counters.weight_solves},
        {"total", report.counters.total()}}},
      {"records", records},
      {"terminal",
       {{"agents", report.terminal.agents()},
        {"dimension", report.terminal.dimension()},
        {"values", std::vector<double>(report.terminal.flat().data(),
                                       report.terminal.flat().data() +
                                           report.terminal.flat().size())}}},
  };
  if (report.polish) {
    j["polish"] = {{"status", to_string(report.polish->status)},
                   {"steps", report.polish->steps},
                   {"stationarity", number(report.polish->residual.stationarity)},
                   {"feasibility", number(report.polish->residual.feasibility)}};
  }
  return j;
}

RunReport report_from_json(const json& j) {
  RunReport r;
  r.solver = j.at("solver").get<std::string>();
  r.problem = j.at("problem").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.selected_iteration = j.value("selected_iteration", 0);
  r.newton_steps = j.value("newton_steps", 0);
  r.counters.agent_solves = j.at("counters").at("agent_solves").get<std::int64_t>();
  r.counters.weight_solves = j.at("counters").at("weight_solves").get<std::int64_t>();
  for (const json& rec : j.at("records")) {
    IterationRecord out;
    out.iteration = rec.at("iteration").get<int>();
    out.quality.objective = get_number(rec, "objective");
    out.quality.log_objective = get_number(rec, "log_objective");
    out.quality.violation = get_number(rec, "constraint_violation");
    out.elapsed_s = get_number(rec, "elapsed_time_s");
    out.linear_solves = rec.at("linear_solves").get<std::int64_t>();
    out.od = get_optional(rec, "O_d");
    out.ohat = get_optional(rec, "Ohat_d");
    out.ohat_raw = get_optional(rec, "Ohat_d_raw");
    r.records.push_back(out);
  }
  const json& t = j.at("terminal");
  const auto values = t.at("values").get<std::vector<double>>();
  r.terminal = BlockPoint(t.at("agents").get<int>(), t.at("dimension").get<int>(),
                          Eigen::Map<const Vector>(values.data(), values.size()));
  return r;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_report_json(const std::string& path, const RunReport& report, bool timing) {
  write_text(path, report_to_json(report, timing).dump(2) + "\n");
}

RunReport read_report_json(const std::string& path) {
  try {
    return report_from_json(json::parse(read_text(path)));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed report '" + path + "': " + e.what());
  }
}

std::vector<ComparisonRow> comparison_rows(const std::vector<RunReport>& reports) {
  std::vector<ComparisonRow> rows;
  for (const RunReport& r : reports)
    for (const IterationRecord& rec : r.records) rows.push_back({display_name(r, rec), rec});
  return rows;
}

std::string format_objective(double objective, double log_objective) {
  if (std::isfinite(objective) && (objective == 0.0 ? !std::isfinite(log_objective)
                                                    : std::abs(objective) >= 1e-300))
    return fmt_double(objective);
  if (!std::isfinite(log_objective)) return fmt_double(objective);
  const double log10v = log_objective / std::log(10.0);
  double exponent = std::floor(log10v);
  double mantissa = std::pow(10.0, log10v - exponent);
  if (mantissa >= 10.0) {
    mantissa /= 10.0;
    exponent += 1.0;
  }
  return fmt::format("{:.14f}e{}", mantissa, static_cast<long long>(exponent));
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows, bool timing) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : std::string("N/A"); };
  std::string out = std::string(kComparisonHeader) + "\n";
  for (const ComparisonRow& row : rows) {
    const IterationRecord& r = row.record;
    out += fmt::format("{},{},{},{},{},{},{}\n", row.approach,
                       format_objective(r.quality.objective, r.quality.log_objective),
                       fmt_double(r.quality.violation),
                       timing && std::isfinite(r.elapsed_s) ? fmt_double(r.elapsed_s) : "N/A",
                       r.linear_solves, opt(r.od), opt(r.ohat));
  }
  return out;
}

std::string trajectory_csv(const std::vector<BlockPoint>& points, const ThetaGrid& grid) {
  std::string out = "theta,agent,component,value\n";
  const bool full = static_cast<int>(points.size()) == grid.nodes();
  for (std::size_t j = 0; j < points.size(); ++j) {
    const int node = full ? static_cast<int>(j) : (j == 0 ? 0 : grid.steps());
    const double theta = grid.theta(node);
    const BlockPoint& x = points[j];
    for (int m = 0; m < x.agents(); ++m)
      for (int i = 0; i < x.dimension(); ++i)
        out += fmt::format("{},{},{},{}\n", fmt_double(theta), m + 1, i + 1,
                           fmt_double(x.block(m)(i)));
  }
  return out;
}

std::string velocities_csv(const Trajectory& traj) {
  std::string out = "theta,agent,component,value\n";
  for (std::size_t j = 0; j < traj.velocities.size(); ++j) {
    const BlockPoint& v = traj.velocities[j];
    const double theta = traj.grid.theta(static_cast<int>(j));
    for (int m = 0; m < v.agents(); ++m)
      for (int i = 0; i < v.dimension(); ++i)
        out += fmt::format("{},{},{},{}\n", fmt_double(theta), m + 1, i + 1,
                           fmt_double(v.block(m)(i)));
  }
  return out;
}

std::string c_path_csv(const ParametricPath& c, const Vector& p0) {
  const Matrix b = reconstruct_b(c, p0);
  std::string out = "theta,agent,c,b\n";
  for (int j = 0; j < c.grid.nodes(); ++j)
    for (int m = 0; m < c.agents(); ++m)
      out += fmt::format("{},{},{},{}\n", fmt_double(c.grid.theta(j)), m + 1,
                         fmt_double(c.values(m, j)), fmt_double(b(m, j)));
  return out;
}

namespace {

struct LongTable {
  std::vector<double> thetas;
  std::vector<std::vector<std::tuple<int, int, double>>> entries;
  int agents = 0;
  int dimension = 0;
};

LongTable read_long_csv(const std::string& path) {
  std::stringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "theta,agent,component,value")
    throw std::runtime_error("'" + path + "' is not a trajectory CSV");
  LongTable t;
  std::string last;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 4) throw std::runtime_error("malformed row in '" + path + "': " + line);
    if (t.thetas.empty() || cells[0] != last) {
      t.thetas.push_back(std::stod(cells[0]));
      t.entries.emplace_back();
      last = cells[0];
    }
    const int m = std::stoi(cells[1]), i = std::stoi(cells[2]);
    t.agents = std::max(t.agents, m);
    t.dimension = std::max(t.dimension, i);
    t.entries.back().emplace_back(m - 1, i - 1, std::stod(cells[3]));
  }
  return t;
}

std::vector<BlockPoint> to_points(const LongTable& t) {
  std::vector<BlockPoint> out;
  for (const auto& node : t.entries) {
    BlockPoint x(t.agents, t.dimension);
    for (const auto& [m, i, v] : node) x.block(m)(i) = v;
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

Trajectory read_trajectory_csv(const std::string& points_path, const std::string& velocities_path,
                               const std::string& problem_name) {
  const LongTable pts = read_long_csv(points_path);
  if (pts.thetas.size() < 2) throw std::runtime_error("'" + points_path + "' has fewer than 2 nodes");
  Trajectory traj;
  traj.problem_name = problem_name;
  traj.points = to_points(pts);
  const double tau = pts.thetas.back();
  int steps = static_cast<int>(pts.thetas.size()) - 1;
  if (!velocities_path.empty()) {
    traj.velocities = to_points(read_long_csv(velocities_path));
    steps = static_cast<int>(traj.velocities.size());
  }
  traj.grid = ThetaGrid::from_steps(tau, steps);
  if (!traj.velocities.empty()) {
    Vector sum = Vector::Zero(traj.velocities.front().flat().size());
    for (const BlockPoint& v : traj.velocities) sum += v.flat();
    traj.m_hat = sum / static_cast<double>(traj.velocities.size());
    traj.ohat_raw = ohat_raw(traj);
  }
  return traj;
}

}  // namespace optvo
