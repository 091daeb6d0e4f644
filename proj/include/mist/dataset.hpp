#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mist {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Labels = std::vector<int>;

/// n x d feature matrix with optional ground-truth labels in {0, ..., C-1}.
struct Dataset {
  Matrix features;
  std::optional<Labels> labels;
  std::string name;

  [[nodiscard]] Eigen::Index size() const { return features.rows(); }
  [[nodiscard]] Eigen::Index dim() const { return features.cols(); }
  /// max label + 1, or 0 when unlabeled.
  [[nodiscard]] int num_classes() const;

  /// Throws std::invalid_argument if the dataset breaks its invariants
  /// (empty, non-finite entries, negative labels, label count != n).
  void validate() const;
};

Dataset make_two_moons(Eigen::Index n, double noise, std::uint64_t seed);
Dataset make_two_rings(Eigen::Index n, double noise, double factor, std::uint64_t seed);

/// CSV with header `f0,...,f{d-1}[,label]`, values written with 17
/// significant digits so a save/load round trip is exact.
Dataset load_csv(const std::filesystem::path& path,
                 std::optional<int> num_classes = std::nullopt);
void save_csv(const Dataset& data, const std::filesystem::path& path);

/// FNV-1a over the raw feature bytes, shape and labels.
std::uint64_t dataset_hash(const Dataset& data);

}  // namespace mist
