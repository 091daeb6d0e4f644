#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mist/graph.hpp"

namespace mist {

/// Which form of the contrastive term D the objective uses.
enum class Variant {
  SymNCE,    // D = L_ps + L_ng
  PlainNCE,  // D = -I_nce
};

/// Subset of the four objective terms:
/// A = VAT, B = H(Y), C = H(Y|X), D = contrastive.
struct TermSet {
  bool vat = true;
  bool marginal = true;
  bool conditional = true;
  bool contrastive = true;

  /// Parses "ABCD", "BC", ... (any order, case-insensitive). Throws on
  /// unknown letters or unsupported combinations.
  static TermSet parse(const std::string& text);
  [[nodiscard]] std::string str() const;
  /// One of (D), (B,C), (B,D), (A,D), (A,B,C), (B,C,D), (A,B,C,D).
  [[nodiscard]] bool supported() const;
  bool operator==(const TermSet&) const = default;
};

struct ConfigError : std::invalid_argument {
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key(key) {}
  std::string key;
};

/// Every knob of a training run. Defaults reproduce the synthetic-dataset
/// setting: (mu, eta, gamma) = (0.1, 15.5, 10), (alpha, tau) = (1, 0.05),
/// geodesic sampler with (K0, beta) = (15, 0), xi = 0.1, m = 250,
/// 50 epochs, Adam at lr 0.002, hidden widths 1200-1200.
struct MistConfig {
  double mu = 0.1;
  double eta = 15.5;
  double gamma = 10.0;
  double alpha = 1.0;
  double tau = 0.05;
  SamplerKind sampler = SamplerKind::Geodesic;
  Index k0 = 15;
  double beta = 0.0;
  double xi = 0.1;
  Index batch_size = 250;
  int epochs = 50;
  double lr = 0.002;
  std::uint64_t seed = 0;
  Variant variant = Variant::SymNCE;
  TermSet terms;
  std::vector<Index> hidden{1200, 1200};
  int clusters = 0;  // 0: take C from the dataset labels

  /// Throws ConfigError naming the first offending key.
  void validate() const;

  /// Sets one field from its text form, e.g. set("k0", "50").
  void set(const std::string& key, const std::string& value);

  /// Canonical `key = value` lines in a fixed order; parse(to_text()) is
  /// the identity.
  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] std::uint64_t hash() const;

  /// `key = value` lines; blank lines and `#` comments ignored.
  static MistConfig parse(const std::string& text);
  static MistConfig load(const std::string& path);
};

const std::vector<std::string>& config_keys();

}  // namespace mist
