#include "mist/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mist/eval.hpp"

namespace mist {

TermWeights effective_weights(const MistConfig& cfg) {
  TermWeights w;
  w.vat = cfg.terms.vat ? 1.0 : 0.0;
  w.mu = cfg.mu;
  w.eta = cfg.terms.marginal ? cfg.eta : 0.0;
  w.conditional = cfg.terms.conditional ? 1.0 : 0.0;
  w.gamma = cfg.terms.contrastive ? cfg.gamma : 0.0;
  return w;
}

double contrastive_term(const LossBreakdown& parts, Variant variant) {
  return variant == Variant::SymNCE ? parts.l_ps + parts.l_ng : -parts.i_nce_hat;
}

double reconstruct_total(const LossBreakdown& parts, const TermWeights& w, Variant variant) {
  return w.vat * parts.r_vat -
         w.mu * (w.eta * parts.h_y - w.conditional * parts.h_y_given_x -
                 w.gamma * contrastive_term(parts, variant));
}

namespace {

MistLossResult evaluate_objective(const MlpState& state, const ForwardCache& clean, const Matrix& x,
                                  const Matrix& x_transformed, const MistConfig& cfg,
                                  const VatPerturbation* perturbation) {
  const TermWeights w = effective_weights(cfg);
  const CriticConfig critic(cfg.alpha, cfg.tau);
  const ForwardCache moved = forward(state, x_transformed, Mode::Train);

  MistLossResult out;
  const ContrastiveTerms contrast = symmetric_decomposition(clean.probs, moved.probs, critic);
  out.critic_floor_hits = contrast.floor_hits;
  LossBreakdown& parts = out.parts;
  parts.l_ps = contrast.l_ps;
  parts.l_ng = contrast.l_ng;
  parts.i_nce_hat = contrast.i_nce;
  parts.i_nce_hat_prime = contrast.i_nce_prime;
  parts.h_y = marginal_entropy(clean.probs);
  parts.h_y_given_x = conditional_entropy(clean.probs);

  out.grads = state.params.zeros_like();
  if (w.vat > 0.0 && perturbation != nullptr) {
    VatResult vat = vat_penalty(state, x, *perturbation);
    parts.r_vat = vat.value;
    vat.grads *= w.vat;
    out.grads += vat.grads;
  }
  parts.total = reconstruct_total(parts, w, cfg.variant);

  const bool symmetric = cfg.variant == Variant::SymNCE;
  const double contrast_scale = w.mu * w.gamma;
  Matrix grad_z = Matrix::Zero(clean.probs.rows(), clean.probs.cols());
  if (w.mu * w.eta != 0.0) grad_z -= (w.mu * w.eta) * marginal_entropy_grad(clean.probs);
  if (w.mu * w.conditional != 0.0) grad_z += (w.mu * w.conditional) * conditional_entropy_grad(clean.probs);
  if (contrast_scale != 0.0) {
    grad_z += contrast_scale * (symmetric ? contrast.grad_sym_z : contrast.grad_plain_z);
    const Matrix grad_moved =
        contrast_scale * (symmetric ? contrast.grad_sym_z_prime : contrast.grad_plain_z_prime);
    out.grads += backward(state, moved, softmax_backward(moved.probs, grad_moved)).grads;
  }
  out.grads += backward(state, clean, softmax_backward(clean.probs, grad_z)).grads;
  return out;
}

}  // namespace

MistLossResult mist_loss(MlpState& state, const Matrix& x, const Matrix& x_transformed,
                         const MistConfig& cfg, const Vector& radii, Rng& rng,
                         bool update_running_stats) {
  const ForwardCache clean = forward(state, x, Mode::Train, update_running_stats);
  if (!cfg.terms.vat) return evaluate_objective(state, clean, x, x_transformed, cfg, nullptr);
  const VatPerturbation perturbation = vat_perturbation(state, x, clean.probs, radii, cfg.xi, rng);
  return evaluate_objective(state, clean, x, x_transformed, cfg, &perturbation);
}

MistLossResult mist_loss_fixed(const MlpState& state, const Matrix& x, const Matrix& x_transformed,
                               const MistConfig& cfg, const VatPerturbation* perturbation) {
  if (cfg.terms.vat && perturbation == nullptr) {
    throw std::invalid_argument("VAT term active but no perturbation supplied");
  }
  const ForwardCache clean = forward(state, x, Mode::Train);
  return evaluate_objective(state, clean, x, x_transformed, cfg, perturbation);
}

TrainingInputs prepare_inputs(const Dataset& data, const MistConfig& cfg) {
  data.validate();
  if (cfg.k0 > data.size() - 1) {
    throw ConfigError("k0", "K0=" + std::to_string(cfg.k0) + " needs at least K0+1 points");
  }
  const NeighborGraph graph = build_knn(data, cfg.k0);
  TransformSampler sampler = cfg.sampler == SamplerKind::Euclidean ? make_sampler_e(graph, cfg.beta)
                                                                   : make_sampler_g(graph, cfg.beta);
  return TrainingInputs{std::move(sampler), vat_radii(data)};
}

namespace {

void accumulate(LossBreakdown& sum, const LossBreakdown& x, double scale) {
  sum.r_vat += scale * x.r_vat;
  sum.h_y += scale * x.h_y;
  sum.h_y_given_x += scale * x.h_y_given_x;
  sum.l_ps += scale * x.l_ps;
  sum.l_ng += scale * x.l_ng;
  sum.i_nce_hat += scale * x.i_nce_hat;
  sum.i_nce_hat_prime += scale * x.i_nce_hat_prime;
  sum.total += scale * x.total;
}

int resolve_clusters(const Dataset& data, const MistConfig& cfg) {
  if (cfg.clusters > 0) return cfg.clusters;
  const int c = data.num_classes();
  if (c < 1) throw ConfigError("clusters", "dataset has no labels; set the number of clusters");
  return c;
}

}  // namespace

TrainResult train(const Dataset& data, const MistConfig& cfg, const TrainingInputs& inputs,
                  const ProgressFn& progress) {
  cfg.validate();
  data.validate();
  const Index n = data.size();
  if (inputs.sampler.size() != n || inputs.radii.size() != n) {
    throw std::invalid_argument("training inputs were built for a different dataset");
  }
  const int clusters = resolve_clusters(data, cfg);
  const auto started = std::chrono::steady_clock::now();

  Rng rng(cfg.seed);
  TrainResult result{init_mlp(data.dim(), cfg.hidden, clusters, rng.bits()), {}, {}};
  result.adam = init_adam(result.state, cfg.lr);
  TrainReport& report = result.report;
  report.config_text = cfg.to_text();
  report.seed = cfg.seed;

  const Index m = cfg.batch_size;
  const Index steps_per_epoch = n / m + 1;
  std::vector<Index> batch(static_cast<std::size_t>(m));
  Vector batch_radii(m);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    LossBreakdown sum;
    for (Index step = 0; step < steps_per_epoch; ++step) {
      for (Index k = 0; k < m; ++k) {
        batch[static_cast<std::size_t>(k)] = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        batch_radii(k) = inputs.radii(batch[static_cast<std::size_t>(k)]);
      }
      const std::vector<Index> moved = inputs.sampler.sample(batch, rng);
      const Matrix x = data.features(batch, Eigen::all);
      const Matrix x_moved = data.features(moved, Eigen::all);

      MistLossResult loss = mist_loss(result.state, x, x_moved, cfg, batch_radii, rng, true);
      if (!std::isfinite(loss.parts.total)) {
        throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) + " step " +
                                 std::to_string(step));
      }
      try {
        adam_step(result.state.params, result.adam, loss.grads);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(e.what()) + " at epoch " + std::to_string(epoch) + " step " +
                                 std::to_string(step));
      }
      accumulate(sum, loss.parts, 1.0 / static_cast<double>(steps_per_epoch));
      report.steps.push_back({epoch, static_cast<int>(step), loss.parts, loss.critic_floor_hits});
    }
    EpochRecord record{epoch, sum, std::nullopt};
    if (data.labels) {
      const Labels predicted = predict(result.state, data.features);
      record.acc = clustering_accuracy(*data.labels, predicted, std::max(clusters, data.num_classes()));
    }
    report.epochs.push_back(record);
    if (progress) progress(record);
  }

  report.predicted = predict(result.state, data.features);
  if (data.labels) {
    report.final_acc = clustering_accuracy(*data.labels, report.predicted, std::max(clusters, data.num_classes()));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

TrainResult train(const Dataset& data, const MistConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  return train(data, cfg, prepare_inputs(data, cfg), progress);
}

MistConfig ablation_config(const MistConfig& base, const TermSet& combo, AblationProfile profile) {
  if (!combo.supported()) throw ConfigError("terms", "unsupported combination " + combo.str());
  MistConfig cfg = base;
  cfg.terms = combo;
  if (combo == TermSet{}) return cfg;

  if (profile == AblationProfile::Synthetic) {
    // One column for every combination; terms outside the combo are off.
    cfg.eta = 15.5;
    cfg.gamma = 10.0;
    cfg.tau = 1.0;
    cfg.mu = combo.vat ? 0.1 : 1.0;
    return cfg;
  }
  const std::string s = combo.str();
  if (s == "D") {
    cfg.mu = 1.0;
    cfg.gamma = 1.0;
    cfg.tau = 1.0;
  } else if (s == "BD") {
    cfg.mu = 1.0;
    cfg.eta = 1.0;
    cfg.gamma = 10.0;
    cfg.tau = 1.0;
  } else if (s == "AD") {
    cfg.mu = 0.045;
    cfg.gamma = 1.5;
    cfg.tau = 1.0;
  } else if (s == "BCD") {
    cfg.mu = 1.0;
    cfg.eta = 1.0;
    cfg.gamma = 10.0;
    cfg.tau = 0.1;
  } else if (s == "ABC") {
    cfg.mu = 0.1;
    cfg.eta = 4.0;
  } else if (s == "BC") {
    cfg.mu = 1.0;
    cfg.eta = 4.0;
  }
  return cfg;
}

TrainReport run_ablation(const Dataset& data, const TermSet& combo, const MistConfig& base,
                         AblationProfile profile) {
  return train(data, ablation_config(base, combo, profile)).report;
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "k0") return SweepAxis::K0;
  if (text == "alpha") return SweepAxis::Alpha;
  if (text == "gamma") return SweepAxis::Gamma;
  throw std::invalid_argument("unsupported sweep axis '" + text + "' (expected k0, alpha or gamma)");
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::K0: return "k0";
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::Gamma: return "gamma";
  }
  return "?";
}

MistConfig sweep_config(const MistConfig& base, SweepAxis axis, double value) {
  MistConfig cfg = base;
  switch (axis) {
    case SweepAxis::K0:
      if (value < 1.0 || value != std::floor(value)) throw ConfigError("k0", "sweep values must be positive integers");
      cfg.k0 = static_cast<Index>(value);
      break;
    case SweepAxis::Alpha: cfg.alpha = value; break;
    case SweepAxis::Gamma: cfg.gamma = value; break;
  }
  cfg.validate();
  return cfg;
}

std::vector<SweepPoint> run_sweep(const Dataset& data, SweepAxis axis, const std::vector<double>& values,
                                  const MistConfig& base, const std::vector<std::uint64_t>& seeds) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
  std::vector<SweepPoint> out;
  std::optional<TrainingInputs> shared;
  for (double value : values) {
    MistConfig cfg = sweep_config(base, axis, value);
    // Only K0 changes the sampler.
    std::optional<TrainingInputs> local;
    const TrainingInputs* inputs = nullptr;
    if (axis == SweepAxis::K0) {
      local = prepare_inputs(data, cfg);
      inputs = &*local;
    } else {
      if (!shared) shared = prepare_inputs(data, cfg);
      inputs = &*shared;
    }
    SweepPoint point{value, {}};
    for (std::uint64_t seed : seeds) {
      cfg.seed = seed;
      point.runs.push_back(train(data, cfg, *inputs).report);
    }
    out.push_back(std::move(point));
  }
  return out;
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

std::string format_summary(const Summary& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f(%.1f)", s.mean, s.std);
  return buf;
}

}  // namespace mist
