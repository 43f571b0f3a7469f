#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "panda/algorithms.hpp"
#include "panda/diagnostics.hpp"
#include "panda/graph_dynamics.hpp"
#include "panda/harness.hpp"
#include "panda/rate_theory.hpp"

namespace {

using namespace panda;

std::ostream& precise(std::ostream& out) {
  out << std::setprecision(17);
  return out;
}

void emit(const std::string& path, const std::string& contents) {
  if (path.empty()) {
    std::cout << contents;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

int command_run(const std::string& config_path, const std::string& out_path,
                const std::string& schedule_path) {
  ExperimentConfig config = load_config(config_path);
  std::optional<GraphSchedule> schedule;
  if (!schedule_path.empty()) schedule = GraphSchedule::scripted_from_json(schedule_path);

  ExperimentResult result = run_experiment(config, schedule);
  write_trace_csv(out_path, result);
  write_metadata_json(out_path + ".meta.json", result);
  write_optimum_json(out_path + ".opt.json", result.instance);

  std::cout << "algorithm=" << to_string(config.algorithm) << " iters=" << config.iters
            << " final_rel_error=" << result.rel_error.back();
  try {
    const RateFit fit = fit_linear_rate(result.rel_error, 0.5);
    std::cout << " fitted_rate=" << fit.rate << " r_squared=" << fit.r_squared;
  } catch (const std::exception&) {
    // Too few positive tail points to fit; the trace itself is still valid.
  }
  std::cout << "\nwrote " << out_path << ", " << out_path << ".meta.json, " << out_path
            << ".opt.json\n";
  return 0;
}

int command_rate(double mu, double L, double delta, int B, std::optional<double> c,
                 const std::string& sweep, const std::string& out_path, bool debug_crossover) {
  std::vector<double> steps;
  const StepSizeInterval interval = step_size_interval(mu, L, delta);
  if (c) {
    steps.push_back(*c);
  } else if (!sweep.empty()) {
    double lo = 0.0, hi = 0.0;
    int count = 0;
    char sep1 = 0, sep2 = 0;
    std::istringstream spec(sweep);
    if (!(spec >> lo >> sep1 >> hi >> sep2 >> count) || sep1 != ':' || sep2 != ':' || count < 1) {
      throw std::invalid_argument("sweep must look like lo:hi:count");
    }
    for (int i = 0; i < count; ++i) {
      steps.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    }
  } else {
    for (int i = 1; i <= 20; ++i) steps.push_back(interval.upper * i / 21.0);
  }

  std::ostringstream table;
  table << std::setprecision(12);
  table << "c,lambda,gamma1,gamma2,gamma3,gamma4,gamma5,product,feasible\n";
  for (double step : steps) {
    const double lambda = theoretical_lambda(step, mu, L, delta, B);
    const RateCertificate cert = small_gain_certificate(lambda, step, mu, L, delta, B);
    table << step << ',' << lambda;
    for (double gain : cert.gains) table << ',' << gain;
    table << ',' << cert.product() << ',' << (cert.feasible ? 1 : 0) << '\n';
  }
  emit(out_path, table.str());

  std::cerr << precise << "step interval: (0, " << interval.upper << ")\n"
            << "crossover: " << crossover_c(mu, L, delta, B) << "\n";
  if (debug_crossover) {
    std::cerr << "crossover closed form (kappa^{3/2}): "
              << crossover_c_closed_form(mu, L, delta, 1.5) << "\n"
              << "crossover closed form (kappa^{5/2}): "
              << crossover_c_closed_form(mu, L, delta, 2.5) << "\n";
  }
  return 0;
}

int command_diagnose(const std::string& trace_path, const std::string& opt_path, double lambda,
                     std::optional<double> c, double delta, int B, std::optional<std::size_t> K,
                     const std::string& out_path) {
  const CsvTable table = read_csv(trace_path);
  const OptimumFile optimum = read_optimum_json(opt_path);
  for (const char* column : {"r_norm", "xperp_norm", "zperp_norm", "dy_norm", "dxz_norm"}) {
    if (!table.has(column)) {
      throw std::runtime_error(std::string("trace csv lacks the diagnostics column ") + column);
    }
  }

  double step = c.value_or(0.0);
  if (!c) {
    const std::string meta_path = trace_path + ".meta.json";
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw std::runtime_error("no --c given and cannot open " + meta_path);
    step = nlohmann::json::parse(meta_in).at("step").get<double>();
  }

  DerivedSequences seqs;
  auto to_vector = [&](const char* name) {
    const auto span = table.column(name);
    return std::vector<double>(span.begin(), span.end());
  };
  seqs.r = to_vector("r_norm");
  seqs.xperp = to_vector("xperp_norm");
  seqs.zperp = to_vector("zperp_norm");
  seqs.dy = to_vector("dy_norm");
  seqs.dxz = to_vector("dxz_norm");

  const RateCertificate cert =
      small_gain_certificate(lambda, step, optimum.consts.mu, optimum.consts.L, delta, B);
  const std::size_t horizon = K.value_or(seqs.length() - 1);
  const auto arrows = arrow_slacks(seqs, cert, horizon);

  std::ostringstream report;
  report << std::setprecision(12);
  report << "arrow,source,target,gamma,omega,lhs,rhs,slack\n";
  for (const auto& arrow : arrows) {
    report << arrow.arrow << ',' << arrow.source << ',' << arrow.target << ',' << arrow.gain << ','
           << arrow.omega << ',' << arrow.lhs << ',' << arrow.rhs << ',' << arrow.slack << '\n';
  }
  emit(out_path, report.str());

  std::cerr << "gain product: " << cert.product() << (cert.feasible ? " (feasible)" : " (infeasible)")
            << "\n";
  return 0;
}

int command_sweep(const std::string& config_path, const std::string& seeds,
                  const std::string& out_path) {
  ExperimentConfig base = load_config(config_path);
  std::uint64_t first = 0, last = 0;
  const auto dots = seeds.find("..");
  if (dots == std::string::npos) throw std::invalid_argument("seeds must look like k0..k1");
  first = std::stoull(seeds.substr(0, dots));
  last = std::stoull(seeds.substr(dots + 2));
  if (last < first) throw std::invalid_argument("seeds must look like k0..k1 with k0 <= k1");

  std::ostringstream table;
  table << std::setprecision(12);
  table << "seed,final_rel_error,rate,r_squared\n";
  std::vector<double> finals;
  for (std::uint64_t s = first; s <= last; ++s) {
    ExperimentConfig config = base;
    config.seed = s;
    config.graph_seed = s;
    const ExperimentResult result = run_experiment(config);
    double rate = 1.0, r2 = 0.0;
    try {
      const RateFit fit = fit_linear_rate(result.rel_error, 0.5);
      rate = fit.rate;
      r2 = fit.r_squared;
    } catch (const std::exception&) {
    }
    finals.push_back(result.rel_error.back());
    table << s << ',' << result.rel_error.back() << ',' << rate << ',' << r2 << '\n';
  }
  emit(out_path, table.str());
  std::cout << "seeds=" << first << ".." << last << " median_final_rel_error=" << median(finals)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laboratory for decentralized optimization over time-varying graphs"};
  app.require_subcommand(1);

  std::string config_path, out_path, schedule_path, trace_path, opt_path, sweep_spec, seeds_spec;
  double mu = 1.0, L = 1.0, delta = 0.0, lambda = 0.9;
  int B = 1;
  std::optional<double> c;
  std::optional<std::size_t> horizon;
  bool debug_crossover = false;

  CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment and write its trace");
  run_cmd->add_option("--config", config_path, "experiment config (json)")->required();
  run_cmd->add_option("--out", out_path, "trace csv path")->required();
  run_cmd->add_option("--schedule", schedule_path, "scripted schedule (json) overriding the random one");

  CLI::App* rate_cmd = app.add_subcommand("rate", "Emit a step-size/rate certificate table");
  rate_cmd->add_option("--mu", mu, "strong convexity constant")->required();
  rate_cmd->add_option("--L", L, "Lipschitz gradient constant")->required();
  rate_cmd->add_option("--delta", delta, "joint contraction factor")->required();
  rate_cmd->add_option("--B", B, "window length")->required();
  rate_cmd->add_option("--c", c, "single step size");
  rate_cmd->add_option("--sweep", sweep_spec, "step sweep lo:hi:count");
  rate_cmd->add_option("--out", out_path, "output csv (stdout when omitted)");
  rate_cmd->add_flag("--debug-crossover", debug_crossover, "also print the closed-form crossover candidates");

  CLI::App* diagnose_cmd = app.add_subcommand("diagnose", "Evaluate the cycle inequalities on a trace");
  diagnose_cmd->add_option("--trace", trace_path, "trace csv with diagnostics columns")->required();
  diagnose_cmd->add_option("--opt", opt_path, "optimum json")->required();
  diagnose_cmd->add_option("--lambda", lambda, "decay rate to test")->required();
  diagnose_cmd->add_option("--c", c, "step size (defaults to the trace metadata)");
  diagnose_cmd->add_option("--delta", delta, "joint contraction factor");
  diagnose_cmd->add_option("--B", B, "window length");
  diagnose_cmd->add_option("--K", horizon, "horizon (defaults to the full trace)");
  diagnose_cmd->add_option("--out", out_path, "output csv (stdout when omitted)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run one config across a seed range");
  sweep_cmd->add_option("--config", config_path, "experiment config (json)")->required();
  sweep_cmd->add_option("--seeds", seeds_spec, "seed range k0..k1")->required();
  sweep_cmd->add_option("--out", out_path, "output csv (stdout when omitted)");

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) return command_run(config_path, out_path, schedule_path);
    if (rate_cmd->parsed()) return command_rate(mu, L, delta, B, c, sweep_spec, out_path, debug_crossover);
    if (diagnose_cmd->parsed()) {
      return command_diagnose(trace_path, opt_path, lambda, c, delta, B, horizon, out_path);
    }
    if (sweep_cmd->parsed()) return command_sweep(config_path, seeds_spec, out_path);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
