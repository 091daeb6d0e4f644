#pragma once

// Randomized property and oracle suites shared by the unit tests and the
// acceptance binary. Each returns the worst observed error or a failure count.

#include <algorithm>
#include <cmath>
#include <limits>

#include "mist/eval.hpp"
#include "mist/graph.hpp"
#include "mist/losses.hpp"
#include "mist/trainer.hpp"
#include "oracles.hpp"

namespace mist::checks {

struct IdentityReport {
  int draws = 0;
  double worst_identity = 0.0;
  double worst_bound_excess = -std::numeric_limits<double>::infinity();  // max(I - log m)
  int asymmetric_critics = 0;
};

inline IdentityReport identity_suite(int draws, std::uint64_t seed) {
  Rng rng(seed);
  IdentityReport r;
  const double alphas[] = {0.0, 1.0, 2.0};
  for (int t = 0; t < draws; ++t) {
    const double alpha = alphas[t % 3];
    const double tau = alpha == 1.0 ? 10.0 * rng.uniform() : rng.uniform();
    const CriticConfig cfg(alpha, tau);
    const Index m = 2 + static_cast<Index>(rng.below(63));
    const Index c = 2 + static_cast<Index>(rng.below(9));
    const double spread = 0.5 + 4.0 * rng.uniform();
    const Matrix z = oracle::random_simplex_rows(m, c, rng, spread);
    const Matrix zp = oracle::random_simplex_rows(m, c, rng, spread);
    const ContrastiveTerms terms = symmetric_decomposition(z, zp, cfg);
    const double log_m = std::log(static_cast<double>(m));
    r.worst_identity = std::max(
        r.worst_identity, std::abs(-(terms.i_nce + terms.i_nce_prime) / 2.0 - (-log_m + terms.l_ps + terms.l_ng)));
    r.worst_bound_excess = std::max({r.worst_bound_excess, terms.i_nce - log_m, terms.i_nce_prime - log_m});
    for (Index i = 0; i < m; ++i) {
      const Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
      if (critic(z.row(i), zp.row(j), cfg) != critic(zp.row(j), z.row(i), cfg)) ++r.asymmetric_critics;
    }
    ++r.draws;
  }
  return r;
}

struct OracleReport {
  int instances = 0;
  int mismatches = 0;
  double worst = 0.0;
};

inline OracleReport knn_suite(int instances, std::uint64_t seed) {
  Rng rng(seed);
  OracleReport r;
  for (int t = 0; t < instances; ++t) {
    const Index n = 12 + static_cast<Index>(rng.below(189));
    const Index d = 1 + static_cast<Index>(rng.below(4));
    const Index k = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(std::min<Index>(n - 1, 20))));
    Dataset data = oracle::random_dataset(n, d, rng);
    if (t % 5 == 0) data.features = data.features.array().round();  // force distance ties
    const NeighborGraph g = build_knn(data, k);
    const auto want = oracle::knn_by_full_sort(data.features, k);
    for (Index i = 0; i < n; ++i) {
      for (Index q = 0; q < k; ++q) {
        if (g.neighbors(i, q) != want[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)]) ++r.mismatches;
      }
    }
    ++r.instances;
  }
  return r;
}

inline OracleReport geodesic_suite(int instances, std::uint64_t seed) {
  Rng rng(seed);
  OracleReport r;
  const double inf = std::numeric_limits<double>::infinity();
  for (int t = 0; t < instances; ++t) {
    const Index n = 5 + static_cast<Index>(rng.below(56));
    const Index k = 1 + static_cast<Index>(rng.below(4));
    const Dataset data = oracle::random_dataset(n, 2, rng);
    const NeighborGraph g = build_knn(data, k);
    Matrix w = Matrix::Constant(n, n, inf);
    for (Index i = 0; i < n; ++i) {
      for (Index q = 0; q < k; ++q) {
        const Index j = g.neighbors(i, q);
        w(i, j) = w(j, i) = std::min(w(i, j), g.distances(i, q));
      }
    }
    const Matrix want = oracle::floyd_warshall(w);
    const GeodesicTable table = geodesics(g);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (std::isinf(want(i, j)) != std::isinf(table.dist(i, j))) {
          ++r.mismatches;
        } else if (!std::isinf(want(i, j))) {
          const double err = std::abs(want(i, j) - table.dist(i, j));
          r.worst = std::max(r.worst, err);
          if (err > 1e-9) ++r.mismatches;
        }
      }
    }
    ++r.instances;
  }
  return r;
}

inline OracleReport hungarian_suite(int instances, std::uint64_t seed) {
  Rng rng(seed);
  OracleReport r;
  for (int t = 0; t < instances; ++t) {
    const Index c = 1 + static_cast<Index>(rng.below(6));
    Matrix cost(c, c);
    for (Index i = 0; i < c; ++i) {
      for (Index j = 0; j < c; ++j) cost(i, j) = t % 2 ? static_cast<double>(rng.below(5)) : rng.gaussian();
    }
    const std::vector<int> a = hungarian(cost);
    double got = 0.0;
    for (Index i = 0; i < c; ++i) got += cost(i, a[static_cast<std::size_t>(i)]);
    const double err = std::abs(got - oracle::brute_force_assignment(cost));
    r.worst = std::max(r.worst, err);
    if (err > 1e-9) ++r.mismatches;
    ++r.instances;
  }
  return r;
}

/// Tiny objective used by the gradient check: d=3, hidden 4-4, C=2, m=6.
struct TinyProblem {
  MistConfig cfg;
  MlpState state;
  Matrix x;
  Matrix x_moved;
  VatPerturbation perturbation;
};

inline TinyProblem tiny_problem(const MistConfig& base, std::uint64_t seed) {
  Rng rng(seed);
  TinyProblem p;
  p.cfg = base;
  p.cfg.hidden = {4, 4};
  p.state = init_mlp(3, p.cfg.hidden, 2, rng.bits());
  for (auto& b : p.state.params.biases) b = oracle::random_matrix(1, b.size(), rng, 0.2);
  for (auto& s : p.state.params.bn_scale) s.array() += oracle::random_matrix(1, s.size(), rng, 0.2).array();
  p.x = oracle::random_matrix(6, 3, rng);
  p.x_moved = p.x + oracle::random_matrix(6, 3, rng, 0.3);
  const Matrix target = forward(p.state, p.x, Mode::Train).probs;
  p.perturbation = vat_perturbation(p.state, p.x, target, Vector::Constant(6, 0.3), 0.1, rng);
  return p;
}

/// Max relative error of the analytic gradient of the full objective
/// against central differences (step 1e-5), VAT direction frozen.
inline double loss_gradient_error(TinyProblem& p) {
  const MistLossResult analytic = mist_loss_fixed(p.state, p.x, p.x_moved, p.cfg, &p.perturbation);
  const auto grads = analytic.grads.views();
  auto params = p.state.params.views();
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t i = 0; i < params[k].second.size(); ++i) {
      const double fd = oracle::central_difference(
          [&] { return mist_loss_fixed(p.state, p.x, p.x_moved, p.cfg, &p.perturbation).parts.total; },
          params[k].second[i], 1e-5);
      worst = std::max(worst, oracle::relative_error(grads[k].second[i], fd, 1e-4));
    }
  }
  return worst;
}

struct SimplexReport {
  int rows = 0;
  double worst_rowsum = 0.0;
  double worst_entropy_excess = -std::numeric_limits<double>::infinity();  // max(H - log C)
  double min_entropy = std::numeric_limits<double>::infinity();
  double uniform_error = 0.0;  // |H - log C| on uniform rows
  double one_hot_error = 0.0;  // |H| on identical one-hot rows
};

inline SimplexReport simplex_suite(int nets, std::uint64_t seed) {
  Rng rng(seed);
  SimplexReport r;
  for (int t = 0; t < nets; ++t) {
    const Index d = 1 + static_cast<Index>(rng.below(5));
    const Index c = 2 + static_cast<Index>(rng.below(9));
    const Index m = 2 + static_cast<Index>(rng.below(40));
    MlpState s = init_mlp(d, {1 + static_cast<Index>(rng.below(16)), 1 + static_cast<Index>(rng.below(16))}, c,
                          rng.bits());
    const Matrix x = oracle::random_matrix(m, d, rng, std::pow(10.0, rng.uniform() * 4.0 - 1.0));
    for (Mode mode : {Mode::Train, Mode::Eval}) {
      const Matrix z = forward(s, x, mode).probs;
      r.worst_rowsum = std::max(r.worst_rowsum, (z.rowwise().sum().array() - 1.0).abs().maxCoeff());
      r.rows += static_cast<int>(m);
      const double log_c = std::log(static_cast<double>(c));
      const double hy = marginal_entropy(z);
      const double hyx = conditional_entropy(z);
      r.worst_entropy_excess = std::max({r.worst_entropy_excess, hy - log_c, hyx - log_c});
      r.min_entropy = std::min({r.min_entropy, hy, hyx});
    }
    const double log_c = std::log(static_cast<double>(c));
    const Matrix uniform = Matrix::Constant(m, c, 1.0 / static_cast<double>(c));
    Matrix hot = Matrix::Zero(m, c);
    hot.col(static_cast<Index>(rng.below(static_cast<std::uint64_t>(c)))).setOnes();
    r.uniform_error = std::max({r.uniform_error, std::abs(marginal_entropy(uniform) - log_c),
                                std::abs(conditional_entropy(uniform) - log_c)});
    r.one_hot_error = std::max({r.one_hot_error, std::abs(marginal_entropy(hot)), std::abs(conditional_entropy(hot))});
  }
  return r;
}

}  // namespace mist::checks
