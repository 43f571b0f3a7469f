#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "panda/algorithms.hpp"
#include "panda/graph_dynamics.hpp"
#include "panda/objectives.hpp"

namespace panda {

struct ExperimentConfig {
  int n = 10;
  int p = 3;
  int d = 5;
  double r = 1.0;
  double pi = 0.5;
  std::uint64_t seed = 1;
  std::uint64_t graph_seed = 1;
  AlgorithmId algorithm = AlgorithmId::panda;
  double step = 0.03;
  std::int64_t iters = 2000;
  int B = 1;
  // How Gaussian parameters in instance specs are read: "variance" treats
  // N(m, v) as variance v, "stddev" as standard deviation v.
  std::string convention = "variance";

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

struct Instance {
  std::vector<QuadraticLocalObjective> objectives;
  OptimalPair opt;
  ProblemConstants consts;
  Eigen::VectorXd generator;  // vector the measurements were synthesized from
  nlohmann::json spec;        // regenerable description
};

// Ridge-regression instance: generator entries ~ N(0, 10), measurement
// matrix and noise entries ~ N(0, 0.1), data fit scaled by 1/(n d). The
// optimum is the exact minimizer of the synthesized problem, not the
// generator vector.
Instance generate_instance(const ExperimentConfig& config);

Instance instance_from_json(const nlohmann::json& doc);

// Frobenius distance of the per-node columns to the replicated optimum,
// relative to the optimum's size.
double relative_error(const Eigen::MatrixXd& columns, const Eigen::VectorXd& x_star);

struct RateFit {
  double rate = 1.0;
  double r_squared = 0.0;
};

// Least-squares slope of log(metric) against the iteration index over the
// trailing `tail_fraction` of the sequence, reported as exp(slope). The tail
// is cut at its first nonpositive entry.
RateFit fit_linear_rate(std::span<const double> metric, double tail_fraction);

struct ExperimentResult {
  ExperimentConfig config;
  Instance instance;
  Trace trace;
  std::vector<double> rel_error;  // one entry per recorded state
};

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<GraphSchedule>& schedule_override = std::nullopt);

// Trace CSV (k, rel_error, and the derived-sequence columns for dual-ascent
// runs), a JSON metadata sidecar, and the optimum file. Files are written to
// a temporary name and renamed into place.
void write_trace_csv(const std::string& path, const ExperimentResult& result);
void write_metadata_json(const std::string& path, const ExperimentResult& result);
void write_optimum_json(const std::string& path, const Instance& instance);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // column-major, aligned with `columns`

  bool has(const std::string& name) const;
  std::span<const double> column(const std::string& name) const;
  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
};

CsvTable read_csv(const std::string& path);

struct OptimumFile {
  OptimalPair opt;
  ProblemConstants consts;
};

OptimumFile read_optimum_json(const std::string& path);

double median(std::vector<double> values);

}  // namespace panda
