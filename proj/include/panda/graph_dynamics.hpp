#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace panda {

// Undirected, loop-free edge set on nodes 0..n-1. Each edge is stored once
// with i < j; (i,j) and (j,i) refer to the same edge.
struct EdgeSet {
  int n = 0;
  std::vector<std::pair<int, int>> pairs;

  bool has_edge(int i, int j) const;
  std::vector<int> degrees() const;
  std::size_t edge_count() const { return pairs.size(); }
  bool connected() const;
};

enum class ScheduleMode { random, scripted };

// Time-varying graph process. The edge set at iteration k is a pure
// function of (seed, k), so evaluation order and parallelism do not change
// the realized sequence. Scripted schedules cycle through their list.
class GraphSchedule {
 public:
  GraphSchedule(int n, double pi, std::uint64_t seed);
  static GraphSchedule scripted(int n, std::vector<EdgeSet> sets);
  static GraphSchedule scripted_from_json(const std::string& path);

  int node_count() const { return n_; }
  double activation_probability() const { return pi_; }
  std::uint64_t seed() const { return seed_; }
  ScheduleMode mode() const { return mode_; }
  std::size_t scripted_length() const { return sets_.size(); }
  std::string describe() const;

  friend EdgeSet sample_edges(const GraphSchedule& schedule, std::int64_t k);

 private:
  GraphSchedule() = default;

  int n_ = 0;
  double pi_ = 0.0;
  std::uint64_t seed_ = 0;
  ScheduleMode mode_ = ScheduleMode::random;
  std::vector<EdgeSet> sets_;
};

EdgeSet sample_edges(const GraphSchedule& schedule, std::int64_t k);

struct MixingMatrix {
  Eigen::MatrixXd entries;
  std::int64_t k = 0;
};

// Metropolis weights on the given edges: w_ij = 1/max{deg_i, deg_j} across
// each edge, diagonal filled so every row sums to one. Symmetric and doubly
// stochastic by construction.
MixingMatrix metropolis_weights(const EdgeSet& edges, std::int64_t k = 0);

// Graph Laplacian L = D - A.
Eigen::MatrixXd laplacian(const EdgeSet& edges);

// (1/n) * ones * ones^T.
Eigen::MatrixXd averaging_matrix(int n);

struct ContractionEstimate {
  double delta = 1.0;
  int B = 1;
  std::int64_t k_begin = 0;  // first and last window-end iterations covered
  std::int64_t k_end = 0;
  std::vector<double> per_window;  // delta(k) for each window end, in order
};

// Largest singular value of W(k) W(k-1) ... W(k-B+1) minus the averaging
// matrix, maximized over all window ends the sequence supports. The result
// is specific to the realized schedule, not a bound over all time.
ContractionEstimate contraction_delta(std::span<const MixingMatrix> sequence, int B);

// True iff the union of E(k-B+1) ... E(k) is connected.
bool window_connected(const GraphSchedule& schedule, std::int64_t k, int B);

// Contraction of the realized Metropolis sequence over iterations
// [0, horizon).
ContractionEstimate measure_contraction(const GraphSchedule& schedule, std::int64_t horizon, int B);

}  // namespace panda
