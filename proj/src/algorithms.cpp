#include "panda/algorithms.hpp"

#include "panda/rng.hpp"

namespace panda {

std::string to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::panda: return "panda";
    case AlgorithmId::diging: return "diging";
    case AlgorithmId::dual_decomp: return "dual_decomp";
  }
  throw std::logic_error("unknown algorithm id");
}

AlgorithmId algorithm_from_string(const std::string& name) {
  if (name == "panda") return AlgorithmId::panda;
  if (name == "diging") return AlgorithmId::diging;
  if (name == "dual_decomp") return AlgorithmId::dual_decomp;
  throw std::invalid_argument("unknown algorithm: " + name);
}

Trace run(AlgorithmId algorithm, std::span<const QuadraticLocalObjective> objectives,
          const GraphSchedule& schedule, double step, std::int64_t iterations,
          const std::optional<AlgorithmState>& initial) {
  if (objectives.empty()) throw std::invalid_argument("run needs at least one objective");
  if (static_cast<int>(objectives.size()) != schedule.node_count()) {
    throw std::invalid_argument("objective count must match the schedule's node count");
  }
  if (iterations < 0) throw std::invalid_argument("iteration count must be nonnegative");

  const int p = objectives.front().dim();
  const int n = static_cast<int>(objectives.size());

  AlgorithmState state;
  if (initial) {
    state = *initial;
  } else {
    state.x = Eigen::MatrixXd::Zero(p, n);
    state.y = Eigen::MatrixXd::Zero(p, n);
    if (algorithm == AlgorithmId::panda) state.z = Eigen::MatrixXd::Zero(p, n);
    if (algorithm == AlgorithmId::diging) state.g = detail::gradient_columns(objectives, state.x);
    state.k = 0;
  }

  Trace trace;
  trace.meta.algorithm = to_string(algorithm);
  trace.meta.step = step;
  trace.meta.iterations = iterations;
  trace.meta.rng = SeededRng::name();
  trace.meta.schedule = schedule.describe();
  trace.states.reserve(static_cast<std::size_t>(iterations) + 1);
  trace.states.push_back(state);

  for (std::int64_t k = 0; k < iterations; ++k) {
    const EdgeSet edges = sample_edges(schedule, state.k);
    switch (algorithm) {
      case AlgorithmId::panda:
        state = panda_step(state, objectives, metropolis_weights(edges, state.k), step);
        break;
      case AlgorithmId::diging:
        state = diging_step(state, objectives, metropolis_weights(edges, state.k), step);
        break;
      case AlgorithmId::dual_decomp:
        state = dual_decomposition_step(state, objectives, laplacian(edges), step);
        break;
    }
    trace.states.push_back(state);
  }
  return trace;
}

}  // namespace panda
