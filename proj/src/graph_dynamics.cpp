#include "panda/graph_dynamics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "panda/rng.hpp"

namespace panda {

namespace {

void require_valid_nodes(const EdgeSet& edges) {
  for (const auto& [i, j] : edges.pairs) {
    if (i == j) throw std::invalid_argument("edge set contains a self-loop");
    if (i < 0 || j < 0 || i >= edges.n || j >= edges.n) {
      throw std::invalid_argument("edge references a node outside 0..n-1");
    }
  }
}

bool adjacency_connected(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adjacency[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

std::vector<std::vector<int>> adjacency_of(const EdgeSet& edges) {
  std::vector<std::vector<int>> adjacency(edges.n);
  for (const auto& [i, j] : edges.pairs) {
    adjacency[i].push_back(j);
    adjacency[j].push_back(i);
  }
  return adjacency;
}

}  // namespace

bool EdgeSet::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::find(pairs.begin(), pairs.end(), std::make_pair(i, j)) != pairs.end();
}

std::vector<int> EdgeSet::degrees() const {
  std::vector<int> deg(n, 0);
  for (const auto& [i, j] : pairs) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

bool EdgeSet::connected() const { return adjacency_connected(adjacency_of(*this)); }

GraphSchedule::GraphSchedule(int n, double pi, std::uint64_t seed)
    : n_(n), pi_(pi), seed_(seed), mode_(ScheduleMode::random) {
  if (n < 2) throw std::invalid_argument("schedule needs at least two nodes");
  if (!(pi >= 0.0 && pi <= 1.0)) throw std::invalid_argument("activation probability must lie in [0, 1]");
}

GraphSchedule GraphSchedule::scripted(int n, std::vector<EdgeSet> sets) {
  if (n < 2) throw std::invalid_argument("schedule needs at least two nodes");
  if (sets.empty()) throw std::invalid_argument("scripted schedule needs at least one edge set");
  for (auto& s : sets) {
    s.n = n;
    require_valid_nodes(s);
    for (auto& [i, j] : s.pairs) {
      if (i > j) std::swap(i, j);
    }
    std::sort(s.pairs.begin(), s.pairs.end());
    s.pairs.erase(std::unique(s.pairs.begin(), s.pairs.end()), s.pairs.end());
  }
  GraphSchedule schedule;
  schedule.n_ = n;
  schedule.mode_ = ScheduleMode::scripted;
  schedule.sets_ = std::move(sets);
  return schedule;
}

GraphSchedule GraphSchedule::scripted_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in);

  nlohmann::json lists;
  int n = 0;
  if (doc.is_object()) {
    if (!doc.contains("edge_sets")) throw std::runtime_error("schedule file missing edge_sets");
    lists = doc["edge_sets"];
    n = doc.value("n", 0);
  } else {
    lists = doc;
  }
  if (!lists.is_array() || lists.empty()) throw std::runtime_error("schedule file holds no edge sets");

  std::vector<EdgeSet> sets;
  int max_node = -1;
  for (const auto& list : lists) {
    EdgeSet edges;
    for (const auto& pair : list) {
      if (!pair.is_array() || pair.size() != 2) throw std::runtime_error("edge must be a two-element array");
      const int i = pair[0].get<int>();
      const int j = pair[1].get<int>();
      max_node = std::max({max_node, i, j});
      edges.pairs.emplace_back(i, j);
    }
    sets.push_back(std::move(edges));
  }
  if (n == 0) n = max_node + 1;
  return scripted(n, std::move(sets));
}

std::string GraphSchedule::describe() const {
  std::ostringstream out;
  if (mode_ == ScheduleMode::random) {
    out << "random(n=" << n_ << ", pi=" << pi_ << ", seed=" << seed_ << ")";
  } else {
    out << "scripted(n=" << n_ << ", length=" << sets_.size() << ")";
  }
  return out.str();
}

EdgeSet sample_edges(const GraphSchedule& schedule, std::int64_t k) {
  if (k < 0) throw std::invalid_argument("iteration index must be nonnegative");
  if (schedule.mode_ == ScheduleMode::scripted) {
    return schedule.sets_[static_cast<std::size_t>(k) % schedule.sets_.size()];
  }
  EdgeSet edges;
  edges.n = schedule.n_;
  SeededRng rng = SeededRng::stream(schedule.seed_, static_cast<std::uint64_t>(k));
  for (int i = 0; i < schedule.n_; ++i) {
    for (int j = i + 1; j < schedule.n_; ++j) {
      if (rng.uniform01() < schedule.pi_) edges.pairs.emplace_back(i, j);
    }
  }
  return edges;
}

MixingMatrix metropolis_weights(const EdgeSet& edges, std::int64_t k) {
  require_valid_nodes(edges);
  const int n = edges.n;
  const std::vector<int> deg = edges.degrees();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [i, j] : edges.pairs) {
    const double value = 1.0 / static_cast<double>(std::max(deg[i], deg[j]));
    w(i, j) = value;
    w(j, i) = value;
  }
  for (int i = 0; i < n; ++i) {
    w(i, i) = 1.0 - (w.row(i).sum() - w(i, i));
  }
  return MixingMatrix{std::move(w), k};
}

Eigen::MatrixXd laplacian(const EdgeSet& edges) {
  require_valid_nodes(edges);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(edges.n, edges.n);
  for (const auto& [i, j] : edges.pairs) {
    lap(i, j) -= 1.0;
    lap(j, i) -= 1.0;
    lap(i, i) += 1.0;
    lap(j, j) += 1.0;
  }
  return lap;
}

Eigen::MatrixXd averaging_matrix(int n) {
  return Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
}

ContractionEstimate contraction_delta(std::span<const MixingMatrix> sequence, int B) {
  if (B < 1) throw std::invalid_argument("window length must be at least 1");
  if (sequence.size() < static_cast<std::size_t>(B)) throw std::invalid_argument("insufficient history");
  const Eigen::Index n = sequence.front().entries.rows();
  for (const auto& w : sequence) {
    if (w.entries.rows() != n || w.entries.cols() != n) {
      throw std::invalid_argument("mixing matrices must share one size");
    }
  }
  const Eigen::MatrixXd centering = averaging_matrix(static_cast<int>(n));

  ContractionEstimate estimate;
  estimate.B = B;
  estimate.delta = 0.0;
  estimate.k_begin = sequence[static_cast<std::size_t>(B) - 1].k;
  estimate.k_end = sequence.back().k;
  for (std::size_t end = static_cast<std::size_t>(B) - 1; end < sequence.size(); ++end) {
    Eigen::MatrixXd product = sequence[end].entries;
    for (int t = 1; t < B; ++t) {
      product = product * sequence[end - static_cast<std::size_t>(t)].entries;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(product - centering);
    const double sigma = svd.singularValues()(0);
    estimate.per_window.push_back(sigma);
    estimate.delta = std::max(estimate.delta, sigma);
  }
  return estimate;
}

bool window_connected(const GraphSchedule& schedule, std::int64_t k, int B) {
  if (B < 1) throw std::invalid_argument("window length must be at least 1");
  if (k < B - 1) throw std::invalid_argument("window extends before iteration 0");
  EdgeSet unioned;
  unioned.n = schedule.node_count();
  for (std::int64_t t = k - B + 1; t <= k; ++t) {
    const EdgeSet edges = sample_edges(schedule, t);
    unioned.pairs.insert(unioned.pairs.end(), edges.pairs.begin(), edges.pairs.end());
  }
  std::sort(unioned.pairs.begin(), unioned.pairs.end());
  unioned.pairs.erase(std::unique(unioned.pairs.begin(), unioned.pairs.end()), unioned.pairs.end());
  return unioned.connected();
}

ContractionEstimate measure_contraction(const GraphSchedule& schedule, std::int64_t horizon, int B) {
  if (horizon < B) throw std::invalid_argument("insufficient history");
  std::vector<MixingMatrix> mixing;
  mixing.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t k = 0; k < horizon; ++k) {
    mixing.push_back(metropolis_weights(sample_edges(schedule, k), k));
  }
  return contraction_delta(mixing, B);
}

}  // namespace panda
