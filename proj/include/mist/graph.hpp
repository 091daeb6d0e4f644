#pragma once

#include <span>
#include <vector>

#include "mist/dataset.hpp"
#include "mist/rng.hpp"

namespace mist {

/// Exact K-NN lists. Row i holds the k nearest other points sorted by
/// Euclidean distance, ties broken by smaller index.
struct NeighborGraph {
  Index k = 0;
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> neighbors;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> distances;

  [[nodiscard]] Index size() const { return neighbors.rows(); }
};

/// All-pairs shortest-path lengths over the symmetrized K-NN graph.
/// Unreachable pairs hold +inf. reachable[i] lists {j : 0 < dist(i,j) < inf}
/// ordered by (dist(i,j), j).
struct GeodesicTable {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> dist;
  std::vector<std::vector<Index>> reachable;

  [[nodiscard]] Index size() const { return dist.rows(); }
};

NeighborGraph build_knn(const Dataset& data, Index k);

/// Adjacency of the undirected graph: an edge joins i and j if either lists
/// the other. Each list is sorted by neighbor index, no duplicates.
std::vector<std::vector<std::pair<Index, double>>> symmetrized_adjacency(const NeighborGraph& graph);

/// Dijkstra from a single source into `out` (size n).
void shortest_paths_from(const std::vector<std::vector<std::pair<Index, double>>>& adjacency,
                         Index source, std::span<double> out);

GeodesicTable geodesics(const NeighborGraph& graph);

enum class SamplerKind { Euclidean, Geodesic };

/// Per-point candidate lists realizing p(t | x_i); a draw picks one
/// candidate uniformly. Immutable once built.
class TransformSampler {
 public:
  TransformSampler(SamplerKind kind, Index k0, double beta, std::vector<std::vector<Index>> candidates);

  [[nodiscard]] SamplerKind kind() const { return kind_; }
  [[nodiscard]] Index k0() const { return k0_; }
  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] Index size() const { return static_cast<Index>(candidates_.size()); }
  [[nodiscard]] const std::vector<Index>& candidates(Index i) const {
    return candidates_[static_cast<std::size_t>(i)];
  }

  /// One fresh draw per batch element.
  [[nodiscard]] std::vector<Index> sample(std::span<const Index> batch, Rng& rng) const;

 private:
  SamplerKind kind_;
  Index k0_;
  double beta_;
  std::vector<std::vector<Index>> candidates_;
};

/// Euclidean process: neighbor ranks 1 + floor(beta*K0) ... K0 of each row.
TransformSampler make_sampler_e(const NeighborGraph& graph, double beta);

/// Geodesic process: the max(floor(beta*K0), 1) geodesically farthest
/// reachable points of each row (capped by |reachable|). Throws if a point
/// has no reachable partner.
TransformSampler make_sampler_g(const GeodesicTable& table, Index k0, double beta);

/// Same candidates as make_sampler_g(geodesics(graph), graph.k, beta), but
/// runs one Dijkstra per source and keeps only the candidates, so memory is
/// O(n * candidates) instead of O(n^2).
TransformSampler make_sampler_g(const NeighborGraph& graph, double beta);

/// eps_i = 0.25 * distance from x_i to its 10th nearest neighbor.
Vector vat_radii(const Dataset& data);

}  // namespace mist
