#include "mist/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace mist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double euclidean(const Matrix& x, Index a, Index b) {
  double s = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    const double diff = x(a, j) - x(b, j);
    s += diff * diff;
  }
  return std::sqrt(s);
}

// Indices of the `count` largest finite positive entries of `row`, ordered by
// (-dist, index).
std::vector<Index> farthest_reachable(std::span<const double> row, Index count) {
  std::vector<Index> reach;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] > 0.0 && row[j] < kInf) reach.push_back(static_cast<Index>(j));
  }
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(count), reach.size());
  auto farther = [&row](Index a, Index b) {
    const double da = row[static_cast<std::size_t>(a)];
    const double db = row[static_cast<std::size_t>(b)];
    return da != db ? da > db : a < b;
  };
  std::partial_sort(reach.begin(), reach.begin() + static_cast<std::ptrdiff_t>(take), reach.end(), farther);
  reach.resize(take);
  return reach;
}

Index geodesic_count(Index k0, double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  const auto floored = static_cast<Index>(std::floor(beta * static_cast<double>(k0)));
  return std::max<Index>(floored, 1);
}

[[noreturn]] void isolated_point(Index i, Index k0) {
  throw std::runtime_error("point " + std::to_string(i) +
                           " has no geodesically reachable neighbor with K0=" + std::to_string(k0) +
                           "; increase K0");
}

}  // namespace

NeighborGraph build_knn(const Dataset& data, Index k) {
  const Index n = data.size();
  if (k < 1 || k > n - 1) {
    throw std::invalid_argument("k must lie in [1, n-1]; got k=" + std::to_string(k) +
                                " for n=" + std::to_string(n));
  }
  NeighborGraph graph;
  graph.k = k;
  graph.neighbors.resize(n, k);
  graph.distances.resize(n, k);

  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    Index slot = 0;
    for (Index j = 0; j < n; ++j) {
      dist[static_cast<std::size_t>(j)] = euclidean(data.features, i, j);
      if (j != i) order[static_cast<std::size_t>(slot++)] = j;
    }
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&dist](Index a, Index b) {
      const double da = dist[static_cast<std::size_t>(a)];
      const double db = dist[static_cast<std::size_t>(b)];
      return da != db ? da < db : a < b;
    });
    for (Index r = 0; r < k; ++r) {
      graph.neighbors(i, r) = order[static_cast<std::size_t>(r)];
      graph.distances(i, r) = dist[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
    }
  }
  return graph;
}

std::vector<std::vector<std::pair<Index, double>>> symmetrized_adjacency(const NeighborGraph& graph) {
  const Index n = graph.size();
  std::vector<std::vector<std::pair<Index, double>>> adj(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index r = 0; r < graph.k; ++r) {
      const Index j = graph.neighbors(i, r);
      const double w = graph.distances(i, r);
      adj[static_cast<std::size_t>(i)].emplace_back(j, w);
      adj[static_cast<std::size_t>(j)].emplace_back(i, w);
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    // Mutual neighbors appear twice with the same weight.
    list.erase(std::unique(list.begin(), list.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               list.end());
  }
  return adj;
}

void shortest_paths_from(const std::vector<std::vector<std::pair<Index, double>>>& adjacency,
                         Index source, std::span<double> out) {
  std::fill(out.begin(), out.end(), kInf);
  using Entry = std::pair<double, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  out[static_cast<std::size_t>(source)] = 0.0;
  frontier.emplace(0.0, source);
  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (d > out[static_cast<std::size_t>(u)]) continue;
    for (const auto& [v, w] : adjacency[static_cast<std::size_t>(u)]) {
      const double candidate = d + w;
      if (candidate < out[static_cast<std::size_t>(v)]) {
        out[static_cast<std::size_t>(v)] = candidate;
        frontier.emplace(candidate, v);
      }
    }
  }
}

GeodesicTable geodesics(const NeighborGraph& graph) {
  const Index n = graph.size();
  const auto adj = symmetrized_adjacency(graph);
  GeodesicTable table;
  table.dist.resize(n, n);
  table.reachable.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    std::span<double> row(table.dist.row(i).data(), static_cast<std::size_t>(n));
    shortest_paths_from(adj, i, row);
    auto& reach = table.reachable[static_cast<std::size_t>(i)];
    for (Index j = 0; j < n; ++j) {
      if (row[static_cast<std::size_t>(j)] > 0.0 && row[static_cast<std::size_t>(j)] < kInf) {
        reach.push_back(j);
      }
    }
    std::sort(reach.begin(), reach.end(), [&row](Index a, Index b) {
      const double da = row[static_cast<std::size_t>(a)];
      const double db = row[static_cast<std::size_t>(b)];
      return da != db ? da < db : a < b;
    });
  }
  return table;
}

TransformSampler::TransformSampler(SamplerKind kind, Index k0, double beta,
                                   std::vector<std::vector<Index>> candidates)
    : kind_(kind), k0_(k0), beta_(beta), candidates_(std::move(candidates)) {
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    if (candidates_[i].empty()) {
      throw std::invalid_argument("empty candidate list for point " + std::to_string(i));
    }
  }
}

std::vector<Index> TransformSampler::sample(std::span<const Index> batch, Rng& rng) const {
  std::vector<Index> out;
  out.reserve(batch.size());
  for (const Index i : batch) {
    if (i < 0 || i >= size()) throw std::out_of_range("batch index " + std::to_string(i));
    const auto& cand = candidates_[static_cast<std::size_t>(i)];
    out.push_back(cand[static_cast<std::size_t>(rng.below(cand.size()))]);
  }
  return out;
}

TransformSampler make_sampler_e(const NeighborGraph& graph, double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  const Index k0 = graph.k;
  const auto skip = static_cast<Index>(std::floor(beta * static_cast<double>(k0)));
  if (skip >= k0) {
    throw std::invalid_argument("beta=" + std::to_string(beta) + " leaves no Euclidean candidates for K0=" +
                                std::to_string(k0));
  }
  std::vector<std::vector<Index>> candidates(static_cast<std::size_t>(graph.size()));
  for (Index i = 0; i < graph.size(); ++i) {
    auto& cand = candidates[static_cast<std::size_t>(i)];
    for (Index r = skip; r < k0; ++r) cand.push_back(graph.neighbors(i, r));
  }
  return TransformSampler(SamplerKind::Euclidean, k0, beta, std::move(candidates));
}

TransformSampler make_sampler_g(const GeodesicTable& table, Index k0, double beta) {
  const Index count = geodesic_count(k0, beta);
  const Index n = table.size();
  std::vector<std::vector<Index>> candidates(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    std::span<const double> row(table.dist.row(i).data(), static_cast<std::size_t>(n));
    candidates[static_cast<std::size_t>(i)] = farthest_reachable(row, count);
    if (candidates[static_cast<std::size_t>(i)].empty()) isolated_point(i, k0);
  }
  return TransformSampler(SamplerKind::Geodesic, k0, beta, std::move(candidates));
}

TransformSampler make_sampler_g(const NeighborGraph& graph, double beta) {
  const Index count = geodesic_count(graph.k, beta);
  const Index n = graph.size();
  const auto adj = symmetrized_adjacency(graph);
  std::vector<double> row(static_cast<std::size_t>(n));
  std::vector<std::vector<Index>> candidates(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    shortest_paths_from(adj, i, row);
    candidates[static_cast<std::size_t>(i)] = farthest_reachable(row, count);
    if (candidates[static_cast<std::size_t>(i)].empty()) isolated_point(i, graph.k);
  }
  return TransformSampler(SamplerKind::Geodesic, graph.k, beta, std::move(candidates));
}

Vector vat_radii(const Dataset& data) {
  constexpr Index kRank = 10;
  if (data.size() <= kRank) {
    throw std::invalid_argument("VAT radii need n >= 11 points; got " + std::to_string(data.size()));
  }
  const NeighborGraph graph = build_knn(data, kRank);
  return 0.25 * graph.distances.col(kRank - 1);
}

}  // namespace mist
