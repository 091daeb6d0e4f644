#include "mist/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mist {

namespace {

const double kLogFloorValue = std::log(kLogFloor);

double floored_log(double x) { return std::log(std::max(x, kLogFloor)); }

void check_simplex_row(const auto& row, const char* what) {
  double sum = 0.0;
  for (Index k = 0; k < row.size(); ++k) {
    if (!(row(k) >= -1e-6)) throw std::invalid_argument(std::string(what) + " has a negative entry");
    sum += row(k);
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument(std::string(what) + " does not sum to 1 (sum=" + std::to_string(sum) + ")");
  }
}

void check_simplex_rows(const Matrix& z, const char* what) {
  for (Index i = 0; i < z.rows(); ++i) check_simplex_row(z.row(i), what);
}

void check_pair(const Matrix& z, const Matrix& z_prime) {
  if (z.rows() != z_prime.rows() || z.cols() != z_prime.cols()) {
    throw std::invalid_argument("Z and Z' must have the same shape");
  }
  if (z.rows() < 2) throw std::invalid_argument("contrastive terms need a batch of at least 2");
  check_simplex_rows(z, "Z row");
  check_simplex_rows(z_prime, "Z' row");
}

// Same multiplication and summation order for (a, b) and (b, a), so the
// critic is exactly symmetric.
double dot_rows(const Matrix& a, Index i, const Matrix& b, Index j) {
  double s = 0.0;
  for (Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
  return s;
}

double log_sum_exp(const auto& values) {
  const double top = values.maxCoeff();
  return top + std::log((values.array() - top).exp().sum());
}

}  // namespace

CriticConfig::CriticConfig(double alpha, double tau) : alpha_(alpha), tau_(tau) {
  if (!std::isfinite(alpha) || !(tau >= 0.0)) {
    throw std::invalid_argument("critic needs finite alpha and tau >= 0");
  }
  if (alpha != 1.0 && tau > 1.0 / std::abs(1.0 - alpha)) {
    throw std::invalid_argument("critic tau=" + std::to_string(tau) + " exceeds 1/|1-alpha| for alpha=" +
                                std::to_string(alpha));
  }
}

double exp_alpha(double u, double alpha) {
  if (alpha == 1.0) return std::exp(u);
  const double base = std::max(1.0 + (1.0 - alpha) * u, 0.0);
  return std::pow(base, 1.0 / (1.0 - alpha));
}

CriticPoint critic_at(double dot, const CriticConfig& cfg) {
  const double u = cfg.tau() * (dot - 1.0);
  double value = 0.0;
  double slope = 0.0;
  if (cfg.alpha() == 1.0) {
    value = u;
    slope = cfg.tau();
  } else {
    const double base = 1.0 + (1.0 - cfg.alpha()) * u;
    if (base <= 0.0) return {kLogFloorValue, 0.0, true};
    value = std::log(base) / (1.0 - cfg.alpha());
    slope = cfg.tau() / base;
  }
  if (value < kLogFloorValue) return {kLogFloorValue, 0.0, true};
  return {value, slope, false};
}

double critic(const RowVector& z, const RowVector& z_prime, const CriticConfig& cfg) {
  if (z.size() != z_prime.size()) throw std::invalid_argument("critic arguments differ in length");
  check_simplex_row(z, "z");
  check_simplex_row(z_prime, "z'");
  double s = 0.0;
  for (Index k = 0; k < z.size(); ++k) s += z(k) * z_prime(k);
  return critic_at(s, cfg).value;
}

double infonce_hat(const Matrix& z, const Matrix& z_prime, const CriticConfig& cfg) {
  check_pair(z, z_prime);
  const Index m = z.rows();
  double total = 0.0;
  RowVector row(m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) row(j) = critic_at(dot_rows(z, i, z_prime, j), cfg).value;
    total += row(i) - log_sum_exp(row);
  }
  return total / static_cast<double>(m) + std::log(static_cast<double>(m));
}

ContrastiveTerms symmetric_decomposition(const Matrix& z, const Matrix& z_prime, const CriticConfig& cfg) {
  check_pair(z, z_prime);
  const Index m = z.rows();
  const double md = static_cast<double>(m);
  const double log_m = std::log(md);

  ContrastiveTerms out;
  // scores(i, j) = q(z_i, z'_j); swapped(i, j) = q(z'_i, z_j).
  Matrix scores(m, m);
  Matrix swapped(m, m);
  Matrix slopes(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      const CriticPoint c = critic_at(dot_rows(z, i, z_prime, j), cfg);
      scores(i, j) = c.value;
      slopes(i, j) = c.slope;
      out.floor_hits += c.floored ? 1 : 0;
      swapped(i, j) = critic_at(dot_rows(z_prime, i, z, j), cfg).value;
    }
  }

  Vector row_lse(m);
  Vector col_lse(m);
  Vector swapped_lse(m);
  for (Index i = 0; i < m; ++i) {
    row_lse(i) = log_sum_exp(scores.row(i));
    col_lse(i) = log_sum_exp(scores.col(i));
    swapped_lse(i) = log_sum_exp(swapped.row(i));
  }

  out.pointwise_ps = -scores.diagonal();
  out.pointwise_ng = 0.5 * (row_lse + col_lse);
  out.l_ps = out.pointwise_ps.mean();
  out.l_ng = out.pointwise_ng.mean();
  out.i_nce = (scores.diagonal() - row_lse).mean() + log_m;
  out.i_nce_prime = (swapped.diagonal() - swapped_lse).mean() + log_m;

  // Row and column softmax of the score matrix.
  Matrix row_soft = (scores.colwise() - row_lse).array().exp();
  Matrix col_soft = (scores.rowwise() - col_lse.transpose()).array().exp();

  Matrix d_sym = (row_soft + col_soft) / (2.0 * md);
  d_sym.diagonal().array() -= 1.0 / md;
  Matrix d_plain = row_soft / md;
  d_plain.diagonal().array() -= 1.0 / md;

  d_sym.array() *= slopes.array();
  d_plain.array() *= slopes.array();
  out.grad_sym_z = d_sym * z_prime;
  out.grad_sym_z_prime = d_sym.transpose() * z;
  out.grad_plain_z = d_plain * z_prime;
  out.grad_plain_z_prime = d_plain.transpose() * z;
  return out;
}

double marginal_entropy(const Matrix& z) {
  const RowVector mean = z.colwise().mean();
  double h = 0.0;
  for (Index y = 0; y < mean.size(); ++y) h -= mean(y) * floored_log(mean(y));
  return h;
}

double conditional_entropy(const Matrix& z) {
  double h = 0.0;
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index y = 0; y < z.cols(); ++y) h -= z(i, y) * floored_log(z(i, y));
  }
  return h / static_cast<double>(z.rows());
}

Matrix marginal_entropy_grad(const Matrix& z) {
  const RowVector mean = z.colwise().mean();
  RowVector d(mean.size());
  for (Index y = 0; y < mean.size(); ++y) {
    d(y) = mean(y) > kLogFloor ? -(std::log(mean(y)) + 1.0) : -kLogFloorValue;
  }
  d /= static_cast<double>(z.rows());
  return d.replicate(z.rows(), 1);
}

Matrix conditional_entropy_grad(const Matrix& z) {
  Matrix g(z.rows(), z.cols());
  const double scale = 1.0 / static_cast<double>(z.rows());
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index y = 0; y < z.cols(); ++y) {
      const double v = z(i, y);
      g(i, y) = -scale * (v > kLogFloor ? std::log(v) + 1.0 : kLogFloorValue);
    }
  }
  return g;
}

double kl_div(const RowVector& p, const RowVector& p_hat) {
  if (p.size() != p_hat.size()) throw std::invalid_argument("KL arguments differ in length");
  double total = 0.0;
  for (Index y = 0; y < p.size(); ++y) {
    if (p(y) <= 0.0) continue;
    total += p(y) * (floored_log(p(y)) - floored_log(p_hat(y)));
  }
  return std::max(total, 0.0);
}

namespace {

// Value and d/dlogits of (1/m) sum_i KL(target_i || softmax(logits_i)),
// using the exact log-softmax from the forward pass.
double kl_to_logits(const Matrix& target, const ForwardCache& cache, Matrix* grad_logits) {
  const Index m = target.rows();
  double total = 0.0;
  for (Index i = 0; i < m; ++i) {
    for (Index y = 0; y < target.cols(); ++y) {
      const double p = target(i, y);
      if (p > 0.0) total += p * (std::log(p) - cache.log_probs(i, y));
    }
  }
  if (grad_logits) {
    const Vector mass = target.rowwise().sum();
    *grad_logits = (cache.probs.array().colwise() * mass.array()).matrix() - target;
    *grad_logits /= static_cast<double>(m);
  }
  return total / static_cast<double>(m);
}

}  // namespace

VatPerturbation vat_perturbation(const MlpState& state, const Matrix& x, const Matrix& target,
                                 const Vector& radii, double xi, Rng& rng) {
  if (!(xi > 0.0)) throw std::invalid_argument("VAT xi must be positive");
  if (radii.size() != x.rows() || target.rows() != x.rows()) {
    throw std::invalid_argument("VAT radii/target do not match the batch");
  }
  VatPerturbation out;
  out.target = target;
  out.probe.resize(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    double norm = 0.0;
    do {
      for (Index j = 0; j < x.cols(); ++j) out.probe(i, j) = rng.gaussian();
      norm = out.probe.row(i).norm();
    } while (norm == 0.0);
    out.probe.row(i) /= norm;
  }

  const ForwardCache probe_pass = forward(state, x + xi * out.probe, Mode::Train);
  Matrix grad_logits;
  kl_to_logits(target, probe_pass, &grad_logits);
  const Matrix v = backward(state, probe_pass, grad_logits).input_grad;

  out.offsets.resize(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i) {
    const double norm = v.row(i).norm();
    if (norm > 0.0 && std::isfinite(norm)) {
      out.offsets.row(i) = radii(i) * v.row(i) / norm;
    } else {
      out.offsets.row(i) = radii(i) * out.probe.row(i);
    }
  }
  return out;
}

VatResult vat_penalty(const MlpState& state, const Matrix& x, const VatPerturbation& perturbation) {
  const ForwardCache pass = forward(state, x + perturbation.offsets, Mode::Train);
  Matrix grad_logits;
  VatResult out;
  out.value = kl_to_logits(perturbation.target, pass, &grad_logits);
  out.grads = backward(state, pass, grad_logits).grads;
  return out;
}

VatResult vat_loss(const MlpState& state, const Matrix& x, const Vector& radii, double xi, Rng& rng) {
  const ForwardCache clean = forward(state, x, Mode::Train);
  const VatPerturbation perturbation = vat_perturbation(state, x, clean.probs, radii, xi, rng);
  return vat_penalty(state, x, perturbation);
}

}  // namespace mist
