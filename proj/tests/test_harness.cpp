#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "panda/diagnostics.hpp"
#include "panda/harness.hpp"
#include "panda/rate_theory.hpp"

using namespace panda;

TEST_CASE("instances regenerate deterministically from their seed") {
  ExperimentConfig config;
  config.seed = 42;
  Instance a = generate_instance(config);
  Instance b = generate_instance(config);
  CHECK(a.generator == b.generator);
  REQUIRE(a.objectives.size() == b.objectives.size());
  for (std::size_t i = 0; i < a.objectives.size(); ++i) {
    CHECK(a.objectives[i].measurement() == b.objectives[i].measurement());
    CHECK(a.objectives[i].offset() == b.objectives[i].offset());
  }
  CHECK(a.opt.x_star == b.opt.x_star);
}

TEST_CASE("instance shapes and constants") {
  ExperimentConfig config;
  config.n = 10;
  config.p = 3;
  config.d = 5;
  config.r = 1.0;
  Instance instance = generate_instance(config);
  CHECK(instance.objectives.size() == 10);
  for (const auto& obj : instance.objectives) {
    CHECK(obj.measurement().rows() == 5);
    CHECK(obj.measurement().cols() == 3);
    CHECK(obj.scale() == doctest::Approx(1.0 / 50.0));
  }
  CHECK(instance.consts.kappa >= 1.0);
  // Gradients sum to zero at the exact optimum.
  Eigen::VectorXd total = Eigen::VectorXd::Zero(3);
  for (const auto& obj : instance.objectives) total += obj.gradient(instance.opt.x_star);
  CHECK(total.norm() <= 1e-10);
}

TEST_CASE("instances rebuild from generator and explicit json") {
  ExperimentConfig config;
  config.seed = 7;
  Instance generated = generate_instance(config);
  Instance reloaded = instance_from_json(generated.spec);
  CHECK((generated.opt.x_star - reloaded.opt.x_star).norm() == 0.0);

  nlohmann::json explicit_doc{
      {"r", 0.0},
      {"scale", 1.0},
      {"nodes",
       {{{"H", {{1.0}}}, {"b", {0.0}}}, {{"H", {{1.0}}}, {"b", {2.0}}}}}};
  Instance two = instance_from_json(explicit_doc);
  CHECK(two.objectives.size() == 2);
  CHECK(two.opt.x_star(0) == doctest::Approx(1.0));
}

TEST_CASE("relative error hand values") {
  Eigen::VectorXd x_star(2);
  x_star << 3.0, -4.0;
  CHECK(relative_error(x_star.replicate(1, 4), x_star) == 0.0);
  CHECK(relative_error(Eigen::MatrixXd::Zero(2, 4), x_star) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(relative_error(2.0 * x_star.replicate(1, 4), x_star) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(relative_error(Eigen::MatrixXd::Zero(2, 4), Eigen::VectorXd::Zero(2)),
                       "metric undefined", std::invalid_argument);
}

TEST_CASE("rate fit recovers exact and perturbed geometric decay") {
  std::vector<double> clean;
  for (int k = 0; k < 200; ++k) clean.push_back(std::pow(0.9, k));
  RateFit fit = fit_linear_rate(clean, 0.5);
  CHECK(fit.rate == doctest::Approx(0.9).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> constant(50, 0.37);
  RateFit flat = fit_linear_rate(constant, 1.0);
  CHECK(flat.rate == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> wobbly;
  for (int k = 0; k < 200; ++k) wobbly.push_back(std::pow(0.9, k) * (1.0 + 0.01 * (k % 2 == 0 ? 1 : -1)));
  RateFit noisy = fit_linear_rate(wobbly, 0.5);
  CHECK(noisy.rate >= 0.89);
  CHECK(noisy.rate <= 0.91);
  CHECK(noisy.r_squared > 0.99);
}

TEST_CASE("rate fit truncates at the first nonpositive tail entry") {
  std::vector<double> seq;
  for (int k = 0; k < 20; ++k) seq.push_back(std::pow(0.5, k));
  seq.push_back(0.0);
  seq.push_back(0.0);
  RateFit fit = fit_linear_rate(seq, 1.0);
  CHECK(fit.rate == doctest::Approx(0.5).epsilon(1e-9));

  std::vector<double> too_short{1.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(fit_linear_rate(too_short, 1.0), std::invalid_argument);
}

TEST_CASE("config json round trip and validation") {
  ExperimentConfig config;
  config.algorithm = AlgorithmId::dual_decomp;
  config.step = 0.007;
  config.iters = 123;
  ExperimentConfig reparsed = config_from_json(config_to_json(config));
  CHECK(reparsed.algorithm == AlgorithmId::dual_decomp);
  CHECK(reparsed.step == config.step);
  CHECK(reparsed.iters == config.iters);

  CHECK_THROWS_AS(config_from_json({{"step", -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json({{"pi", 1.5}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json({{"stepsize", 0.1}}), std::invalid_argument);
}

TEST_CASE("experiments are deterministic end to end") {
  ExperimentConfig config;
  config.iters = 50;
  ExperimentResult a = run_experiment(config);
  ExperimentResult b = run_experiment(config);
  CHECK(a.rel_error == b.rel_error);

  const char* path = "harness_trace_roundtrip.csv";
  write_trace_csv(path, a);
  std::ifstream first(path);
  std::string contents_a((std::istreambuf_iterator<char>(first)), std::istreambuf_iterator<char>());
  write_trace_csv(path, b);
  std::ifstream second(path);
  std::string contents_b((std::istreambuf_iterator<char>(second)), std::istreambuf_iterator<char>());
  CHECK(contents_a == contents_b);
  std::remove(path);
}

TEST_CASE("trace csv and optimum json round trip through the readers") {
  ExperimentConfig config;
  config.iters = 30;
  ExperimentResult result = run_experiment(config);

  const char* csv_path = "harness_roundtrip.csv";
  const char* opt_path = "harness_roundtrip.opt.json";
  write_trace_csv(csv_path, result);
  write_optimum_json(opt_path, result.instance);

  CsvTable table = read_csv(csv_path);
  CHECK(table.rows() == static_cast<std::size_t>(config.iters) + 1);
  CHECK(table.has("rel_error"));
  CHECK(table.has("dxz_norm"));
  CHECK(table.column("rel_error")[0] == doctest::Approx(result.rel_error[0]).epsilon(1e-15));

  OptimumFile optimum = read_optimum_json(opt_path);
  CHECK((optimum.opt.x_star - result.instance.opt.x_star).norm() <= 1e-12);
  CHECK((optimum.opt.y_star - result.instance.opt.y_star).norm() <= 1e-12);
  CHECK(optimum.consts.mu == doctest::Approx(result.instance.consts.mu));

  std::remove(csv_path);
  std::remove(opt_path);
}

TEST_CASE("empirical rate does not materially exceed a feasible certificate") {
  ExperimentConfig config;
  config.pi = 1.0;  // static complete graph: every window is connected
  config.iters = 400;
  config.seed = 5;
  config.graph_seed = 5;

  Instance instance = generate_instance(config);
  GraphSchedule schedule(config.n, config.pi, config.graph_seed);
  ContractionEstimate contraction = measure_contraction(schedule, config.iters, 1);
  REQUIRE(contraction.delta < 1.0);

  const double upper = step_size_interval(instance.consts.mu, instance.consts.L, contraction.delta).upper;
  const double c_bar = crossover_c(instance.consts.mu, instance.consts.L, contraction.delta, 1);
  config.step = 0.4 * std::min(upper, c_bar);
  const double lambda =
      theoretical_lambda(config.step, instance.consts.mu, instance.consts.L, contraction.delta, 1);
  RateCertificate cert = small_gain_certificate(lambda, config.step, instance.consts.mu,
                                                instance.consts.L, contraction.delta, 1);
  REQUIRE(cert.feasible);

  ExperimentResult result = run_experiment(config);
  // Fit the decaying stretch before the numerical floor.
  std::size_t cut = result.rel_error.size();
  for (std::size_t k = 0; k < result.rel_error.size(); ++k) {
    if (result.rel_error[k] <= 1e-13) {
      cut = k;
      break;
    }
  }
  RateFit fit = fit_linear_rate(std::span<const double>(result.rel_error).first(cut), 0.6);
  CHECK(fit.rate <= cert.lambda + 0.02);
}

TEST_CASE("median helper") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}
