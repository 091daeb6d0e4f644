#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mist/config.hpp"
#include "mist/losses.hpp"

namespace mist {

/// Per-step values of every objective term, in nats.
struct LossBreakdown {
  double r_vat = 0.0;
  double h_y = 0.0;
  double h_y_given_x = 0.0;
  double l_ps = 0.0;
  double l_ng = 0.0;
  double i_nce_hat = 0.0;
  double i_nce_hat_prime = 0.0;
  double total = 0.0;
};

/// Coefficients actually applied to each term:
///   total = vat * R_vat - mu * (eta * H(Y) - conditional * H(Y|X) - gamma * D)
/// with D = L_ps + L_ng (SymNCE) or -I_nce (PlainNCE). Inactive terms get 0.
struct TermWeights {
  double vat = 0.0;
  double mu = 0.0;
  double eta = 0.0;
  double conditional = 0.0;
  double gamma = 0.0;
};

TermWeights effective_weights(const MistConfig& cfg);
double contrastive_term(const LossBreakdown& parts, Variant variant);
double reconstruct_total(const LossBreakdown& parts, const TermWeights& w, Variant variant);

struct MistLossResult {
  LossBreakdown parts;
  MlpParams grads;
  int critic_floor_hits = 0;
};

/// Full objective on one batch and its transformed partner batch. Draws the
/// VAT probe directions from `rng` when the VAT term is active. The forward
/// pass on `x` updates BN running statistics iff `update_running_stats`.
MistLossResult mist_loss(MlpState& state, const Matrix& x, const Matrix& x_transformed,
                         const MistConfig& cfg, const Vector& radii, Rng& rng,
                         bool update_running_stats);

/// Same objective with the VAT perturbation supplied and held fixed; the
/// form used for finite-difference checks.
MistLossResult mist_loss_fixed(const MlpState& state, const Matrix& x, const Matrix& x_transformed,
                               const MistConfig& cfg, const VatPerturbation* perturbation);

struct StepRecord {
  int epoch = 0;
  int step = 0;
  LossBreakdown parts;
  int critic_floor_hits = 0;
};

struct EpochRecord {
  int epoch = 0;
  LossBreakdown mean;  // average over the epoch's steps
  std::optional<double> acc;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::vector<StepRecord> steps;
  Labels predicted;
  std::optional<double> final_acc;
  double wall_seconds = 0.0;
  std::string config_text;
  std::uint64_t seed = 0;
};

/// Data-dependent inputs derived once per (dataset, K0, beta, sampler kind).
struct TrainingInputs {
  TransformSampler sampler;
  Vector radii;
};

TrainingInputs prepare_inputs(const Dataset& data, const MistConfig& cfg);

using ProgressFn = std::function<void(const EpochRecord&)>;

struct TrainResult {
  MlpState state;
  AdamState adam;
  TrainReport report;
};

/// Runs the MIST loop: per epoch floor(n/m)+1 steps, each drawing m points
/// uniformly with replacement, one transform per point, the objective, and
/// an Adam step. Deterministic for a fixed cfg.seed.
TrainResult train(const Dataset& data, const MistConfig& cfg, const TrainingInputs& inputs,
                  const ProgressFn& progress = {});
TrainResult train(const Dataset& data, const MistConfig& cfg, const ProgressFn& progress = {});

/// Column of the ablation weight table to take coefficients from.
enum class AblationProfile { Synthetic, RealWorld };

/// Config restricted to `combo` with the table's weights for that column.
/// (A,B,C,D) returns `base` unchanged.
MistConfig ablation_config(const MistConfig& base, const TermSet& combo, AblationProfile profile);

TrainReport run_ablation(const Dataset& data, const TermSet& combo, const MistConfig& base,
                         AblationProfile profile);

enum class SweepAxis { K0, Alpha, Gamma };
SweepAxis parse_sweep_axis(const std::string& text);
std::string sweep_axis_name(SweepAxis axis);
MistConfig sweep_config(const MistConfig& base, SweepAxis axis, double value);

struct SweepPoint {
  double value = 0.0;
  std::vector<TrainReport> runs;  // one per seed
};

std::vector<SweepPoint> run_sweep(const Dataset& data, SweepAxis axis, const std::vector<double>& values,
                                  const MistConfig& base, const std::vector<std::uint64_t>& seeds);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};
Summary summarize(const std::vector<double>& values);
/// "mean(std)" with one decimal, e.g. "93.3(16.3)".
std::string format_summary(const Summary& s);

}  // namespace mist
