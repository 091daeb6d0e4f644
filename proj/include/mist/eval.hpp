#pragma once

#include <cstdint>
#include <vector>

#include "mist/dataset.hpp"

namespace mist {

/// counts(y, y_hat) = #{i : true label y, predicted y_hat}.
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

  static ConfusionMatrix build(const Labels& y_true, const Labels& y_pred, int num_classes);
};

/// Kuhn-Munkres with potentials, O(C^3). Returns assignment[row] = column
/// minimizing the total cost.
std::vector<int> hungarian(const Matrix& cost);

/// 100 * max over label permutations of the fraction of matches.
double clustering_accuracy(const Labels& y_true, const Labels& y_pred, int num_classes);

/// Lloyd iterations on squared Euclidean distance with k-means++ seeding:
/// the first center is uniform, each next one is drawn with probability
/// proportional to D(x)^2 (Rng::uniform() against the running sum). A
/// cluster that empties is moved onto the point lying farthest from its own
/// assigned center. Stops when assignments stop changing or after max_iter.
Labels kmeans(const Dataset& data, int num_clusters, std::uint64_t seed, int max_iter = 300);

}  // namespace mist
