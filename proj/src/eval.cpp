#include "mist/eval.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mist/rng.hpp"

namespace mist {

ConfusionMatrix ConfusionMatrix::build(const Labels& y_true, const Labels& y_pred, int num_classes) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("label vectors differ in length");
  if (num_classes < 1) throw std::invalid_argument("num_classes must be positive");
  ConfusionMatrix cm;
  cm.counts.setZero(num_classes, num_classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int a = y_true[i];
    const int b = y_pred[i];
    if (a < 0 || a >= num_classes || b < 0 || b >= num_classes) {
      throw std::invalid_argument("label out of range at index " + std::to_string(i));
    }
    ++cm.counts(a, b);
  }
  return cm;
}

std::vector<int> hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw std::invalid_argument("hungarian needs a square cost matrix");
  if (!cost.allFinite()) throw std::invalid_argument("hungarian cost matrix has NaN or Inf");
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return {};

  // 1-indexed potentials; column 0 is a sentinel.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> row_pot(n + 1, 0.0);
  std::vector<double> col_pot(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[col] = row
  std::vector<int> way(n + 1, 0);
  for (int r = 1; r <= n; ++r) {
    match[0] = r;
    int col = 0;
    std::vector<double> min_slack(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col] = true;
      const int row = match[col];
      double delta = kInf;
      int next = 0;
      for (int c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double slack = cost(row - 1, c - 1) - row_pot[row] - col_pot[c];
        if (slack < min_slack[c]) {
          min_slack[c] = slack;
          way[c] = col;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          next = c;
        }
      }
      for (int c = 0; c <= n; ++c) {
        if (used[c]) {
          row_pot[match[c]] += delta;
          col_pot[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col = next;
    } while (match[col] != 0);
    do {
      const int prev = way[col];
      match[col] = match[prev];
      col = prev;
    } while (col != 0);
  }

  std::vector<int> assignment(n, -1);
  for (int c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
  return assignment;
}

double clustering_accuracy(const Labels& y_true, const Labels& y_pred, int num_classes) {
  if (y_true.empty()) throw std::invalid_argument("accuracy of an empty labeling");
  const ConfusionMatrix cm = ConfusionMatrix::build(y_true, y_pred, num_classes);
  // Maximize matched mass: rows are predicted labels, columns true labels.
  const Matrix cost = -cm.counts.transpose().cast<double>();
  const std::vector<int> sigma = hungarian(cost);
  std::int64_t matched = 0;
  for (int pred = 0; pred < num_classes; ++pred) matched += cm.counts(sigma[pred], pred);
  return 100.0 * static_cast<double>(matched) / static_cast<double>(y_true.size());
}

namespace {

double squared_distance(const Matrix& x, Index i, const Matrix& centers, Index c) {
  double s = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    const double d = x(i, j) - centers(c, j);
    s += d * d;
  }
  return s;
}

Matrix plus_plus_seeds(const Matrix& x, int k, Rng& rng) {
  const Index n = x.rows();
  Matrix centers(k, x.cols());
  centers.row(0) = x.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      auto& d = nearest[static_cast<std::size_t>(i)];
      d = std::min(d, squared_distance(x, i, centers, c - 1));
      total += d;
    }
    Index pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double running = 0.0;
      for (Index i = 0; i < n; ++i) {
        running += nearest[static_cast<std::size_t>(i)];
        if (running > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = x.row(pick);
  }
  return centers;
}

}  // namespace

Labels kmeans(const Dataset& data, int num_clusters, std::uint64_t seed, int max_iter) {
  const Matrix& x = data.features;
  const Index n = x.rows();
  if (num_clusters < 1 || num_clusters > n) {
    throw std::invalid_argument("kmeans needs 1 <= C <= n");
  }
  Rng rng(seed);
  Matrix centers = plus_plus_seeds(x, num_clusters, rng);
  Labels assign(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(x, i, centers, 0);
      for (int c = 1; c < num_clusters; ++c) {
        const double d = squared_distance(x, i, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;

    Matrix sums = Matrix::Zero(num_clusters, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(num_clusters), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = assign[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < num_clusters; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move its center onto the point farthest from its
      // assigned center.
      Index far = 0;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        const double d = squared_distance(x, i, centers, assign[static_cast<std::size_t>(i)]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers.row(c) = x.row(far);
    }
  }
  return assign;
}

}  // namespace mist
