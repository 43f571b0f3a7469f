#include "panda/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "panda/diagnostics.hpp"
#include "panda/rng.hpp"

namespace panda {

namespace {

double gaussian_scale(double second_parameter, const std::string& convention) {
  if (convention == "variance") return std::sqrt(second_parameter);
  if (convention == "stddev") return second_parameter;
  throw std::invalid_argument("unknown noise convention: " + convention);
}

void write_atomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
  }
  std::filesystem::rename(tmp, path);
}

std::string format_row(std::span<const double> values) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ',';
    out << values[i];
  }
  return out.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1 || p < 1 || d < 1) throw std::invalid_argument("dimensions must be at least 1");
  if (!(step > 0.0)) throw std::invalid_argument("step size must be positive");
  if (iters < 0) throw std::invalid_argument("iteration count must be nonnegative");
  if (B < 1) throw std::invalid_argument("window length must be at least 1");
  if (!(pi >= 0.0 && pi <= 1.0)) throw std::invalid_argument("activation probability must lie in [0, 1]");
  if (convention != "variance" && convention != "stddev") {
    throw std::invalid_argument("unknown noise convention: " + convention);
  }
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  static const std::vector<std::string> known{"n",         "p",    "d",     "r",  "pi",
                                              "seed",      "graph_seed",    "algorithm",
                                              "step",      "iters", "B",    "convention"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("unknown config field: " + key);
    }
  }
  ExperimentConfig config;
  config.n = doc.value("n", config.n);
  config.p = doc.value("p", config.p);
  config.d = doc.value("d", config.d);
  config.r = doc.value("r", config.r);
  config.pi = doc.value("pi", config.pi);
  config.seed = doc.value("seed", config.seed);
  config.graph_seed = doc.value("graph_seed", config.graph_seed);
  if (doc.contains("algorithm")) config.algorithm = algorithm_from_string(doc["algorithm"].get<std::string>());
  config.step = doc.value("step", config.step);
  config.iters = doc.value("iters", config.iters);
  config.B = doc.value("B", config.B);
  config.convention = doc.value("convention", config.convention);
  config.validate();
  return config;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  return nlohmann::json{{"n", config.n},
                        {"p", config.p},
                        {"d", config.d},
                        {"r", config.r},
                        {"pi", config.pi},
                        {"seed", config.seed},
                        {"graph_seed", config.graph_seed},
                        {"algorithm", to_string(config.algorithm)},
                        {"step", config.step},
                        {"iters", config.iters},
                        {"B", config.B},
                        {"convention", config.convention}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return config_from_json(nlohmann::json::parse(in));
}

Instance generate_instance(const ExperimentConfig& config) {
  config.validate();
  SeededRng rng(config.seed);
  const double generator_sigma = gaussian_scale(10.0, config.convention);
  const double data_sigma = gaussian_scale(0.1, config.convention);
  const double scale = 1.0 / (static_cast<double>(config.n) * static_cast<double>(config.d));

  Instance instance;
  instance.generator.resize(config.p);
  for (int i = 0; i < config.p; ++i) instance.generator(i) = rng.normal(0.0, generator_sigma);

  for (int node = 0; node < config.n; ++node) {
    Eigen::MatrixXd h(config.d, config.p);
    for (int row = 0; row < config.d; ++row) {
      for (int col = 0; col < config.p; ++col) h(row, col) = rng.normal(0.0, data_sigma);
    }
    Eigen::VectorXd noise(config.d);
    for (int row = 0; row < config.d; ++row) noise(row) = rng.normal(0.0, data_sigma);
    instance.objectives.emplace_back(h, (h * instance.generator + noise).eval(), config.r, scale);
  }

  instance.opt = optimal_pair(instance.objectives);
  instance.consts = constants(instance.objectives);
  instance.spec = nlohmann::json{{"n", config.n},     {"p", config.p},
                                 {"d", config.d},     {"r", config.r},
                                 {"seed", config.seed}, {"convention", config.convention}};
  return instance;
}

Instance instance_from_json(const nlohmann::json& doc) {
  if (doc.contains("nodes")) {
    Instance instance;
    const double ridge = doc.value("r", 0.0);
    const double scale = doc.value("scale", 1.0);
    for (const auto& node : doc["nodes"]) {
      const auto rows = node["H"].get<std::vector<std::vector<double>>>();
      const auto offsets = node["b"].get<std::vector<double>>();
      Eigen::MatrixXd h(rows.size(), rows.empty() ? 0 : rows.front().size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
          h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
      }
      Eigen::VectorXd b(offsets.size());
      for (std::size_t r = 0; r < offsets.size(); ++r) b(static_cast<Eigen::Index>(r)) = offsets[r];
      instance.objectives.emplace_back(h, b, ridge, scale);
    }
    instance.opt = optimal_pair(instance.objectives);
    instance.consts = constants(instance.objectives);
    instance.spec = doc;
    return instance;
  }
  ExperimentConfig config;
  config.n = doc.at("n").get<int>();
  config.p = doc.at("p").get<int>();
  config.d = doc.at("d").get<int>();
  config.r = doc.at("r").get<double>();
  config.seed = doc.at("seed").get<std::uint64_t>();
  config.convention = doc.value("convention", "variance");
  return generate_instance(config);
}

double relative_error(const Eigen::MatrixXd& columns, const Eigen::VectorXd& x_star) {
  const double denom = x_star.norm() * std::sqrt(static_cast<double>(columns.cols()));
  if (denom == 0.0) throw std::invalid_argument("metric undefined");
  return (columns.colwise() - x_star).norm() / denom;
}

RateFit fit_linear_rate(std::span<const double> metric, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("tail fraction must lie in (0, 1]");
  }
  const std::size_t len = metric.size();
  const std::size_t tail_len =
      std::min(len, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(len))));
  std::size_t begin = len - tail_len;
  std::size_t end = len;
  for (std::size_t k = begin; k < end; ++k) {
    if (!(metric[k] > 0.0)) {
      end = k;
      break;
    }
  }
  if (end - begin < 3) throw std::invalid_argument("too few points for a rate fit");

  double sum_k = 0.0, sum_y = 0.0;
  const double count = static_cast<double>(end - begin);
  for (std::size_t k = begin; k < end; ++k) {
    sum_k += static_cast<double>(k);
    sum_y += std::log(metric[k]);
  }
  const double mean_k = sum_k / count;
  const double mean_y = sum_y / count;
  double skk = 0.0, sky = 0.0, syy = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    const double dk = static_cast<double>(k) - mean_k;
    const double dy = std::log(metric[k]) - mean_y;
    skk += dk * dk;
    sky += dk * dy;
    syy += dy * dy;
  }
  RateFit fit;
  const double slope = sky / skk;
  fit.rate = std::exp(slope);
  fit.r_squared = syy == 0.0 ? 1.0 : (sky * sky) / (skk * syy);
  return fit;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<GraphSchedule>& schedule_override) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  result.instance = generate_instance(config);

  const GraphSchedule schedule = schedule_override
                                     ? *schedule_override
                                     : GraphSchedule(config.n, config.pi, config.graph_seed);
  result.trace = run(config.algorithm, result.instance.objectives, schedule, config.step, config.iters);
  result.trace.meta.instance = result.instance.spec.dump();

  result.rel_error.reserve(result.trace.states.size());
  for (const auto& state : result.trace.states) {
    result.rel_error.push_back(relative_error(state.x, result.instance.opt.x_star));
  }
  return result;
}

void write_trace_csv(const std::string& path, const ExperimentResult& result) {
  std::ostringstream out;
  const bool with_diagnostics = result.config.algorithm == AlgorithmId::panda;
  if (with_diagnostics) {
    const DerivedSequences seqs = derived_sequences(result.trace, result.instance.opt);
    out << "k,rel_error,r_norm,xperp_norm,zperp_norm,dy_norm,dxz_norm\n";
    for (std::size_t k = 0; k < result.trace.states.size(); ++k) {
      out << k << ','
          << format_row(std::vector<double>{result.rel_error[k], seqs.r[k], seqs.xperp[k],
                                            seqs.zperp[k], seqs.dy[k], seqs.dxz[k]})
          << '\n';
    }
  } else {
    out << "k,rel_error\n";
    for (std::size_t k = 0; k < result.trace.states.size(); ++k) {
      out << k << ',' << format_row(std::vector<double>{result.rel_error[k]}) << '\n';
    }
  }
  write_atomically(path, out.str());
}

void write_metadata_json(const std::string& path, const ExperimentResult& result) {
  nlohmann::json meta{{"algorithm", result.trace.meta.algorithm},
                      {"step", result.trace.meta.step},
                      {"iterations", result.trace.meta.iterations},
                      {"rng", result.trace.meta.rng},
                      {"schedule", result.trace.meta.schedule},
                      {"instance", result.instance.spec},
                      {"config", config_to_json(result.config)},
                      {"mu", result.instance.consts.mu},
                      {"L", result.instance.consts.L},
                      {"kappa", result.instance.consts.kappa}};
  write_atomically(path, meta.dump(2) + "\n");
}

void write_optimum_json(const std::string& path, const Instance& instance) {
  nlohmann::json doc;
  doc["x_star"] = std::vector<double>(instance.opt.x_star.data(),
                                      instance.opt.x_star.data() + instance.opt.x_star.size());
  std::vector<std::vector<double>> y_star;
  for (Eigen::Index i = 0; i < instance.opt.y_star.cols(); ++i) {
    y_star.emplace_back(instance.opt.y_star.col(i).data(),
                        instance.opt.y_star.col(i).data() + instance.opt.y_star.rows());
  }
  doc["y_star"] = y_star;
  doc["mu"] = instance.consts.mu;
  doc["L"] = instance.consts.L;
  doc["kappa"] = instance.consts.kappa;
  write_atomically(path, doc.dump(2) + "\n");
}

bool CsvTable::has(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::span<const double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::invalid_argument("missing column: " + name);
  return data[static_cast<std::size_t>(it - columns.begin())];
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv file: " + path);
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) table.columns.push_back(cell);
  table.data.resize(table.columns.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::size_t index = 0;
    while (std::getline(row, cell, ',')) {
      if (index >= table.columns.size()) throw std::runtime_error("ragged csv row in " + path);
      table.data[index++].push_back(std::stod(cell));
    }
    if (index != table.columns.size()) throw std::runtime_error("ragged csv row in " + path);
  }
  return table;
}

OptimumFile read_optimum_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open optimum file: " + path);
  const nlohmann::json doc = nlohmann::json::parse(in);

  OptimumFile file;
  const auto x = doc.at("x_star").get<std::vector<double>>();
  file.opt.x_star.resize(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) file.opt.x_star(static_cast<Eigen::Index>(i)) = x[i];

  const auto y = doc.at("y_star").get<std::vector<std::vector<double>>>();
  file.opt.y_star.resize(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < y[i].size(); ++j) {
      file.opt.y_star(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = y[i][j];
    }
  }
  file.consts.mu = doc.value("mu", 0.0);
  file.consts.L = doc.value("L", 0.0);
  file.consts.kappa = file.consts.mu > 0.0 ? file.consts.L / file.consts.mu : 0.0;
  return file;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace panda
