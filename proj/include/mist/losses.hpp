#pragma once

#include "mist/dataset.hpp"
#include "mist/model.hpp"
#include "mist/rng.hpp"

namespace mist {

/// Floor for log arguments: log(x) is evaluated as log(max(x, kLogFloor)).
inline constexpr double kLogFloor = 1e-12;

/// Parameters of the alpha-exponential critic
///   q(z, z') = log exp_alpha(tau * (z.z' - 1)).
/// Construction enforces 0 <= tau <= 1/|1 - alpha| (tau >= 0 when alpha = 1).
class CriticConfig {
 public:
  CriticConfig(double alpha, double tau);

  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] double tau() const { return tau_; }

 private:
  double alpha_;
  double tau_;
};

/// [1 + (1 - alpha) u]_+^(1 / (1 - alpha)), or e^u at alpha = 1.
double exp_alpha(double u, double alpha);

/// Critic value and its derivative with respect to the dot product s = z.z'.
/// When exp_alpha collapses below kLogFloor the value is log(kLogFloor),
/// the slope is zero and `floored` is set.
struct CriticPoint {
  double value;
  double slope;
  bool floored;
};
CriticPoint critic_at(double dot, const CriticConfig& cfg);

/// Throws std::invalid_argument if z or z' is off the simplex by more than 1e-6.
double critic(const RowVector& z, const RowVector& z_prime, const CriticConfig& cfg);

/// (1/m) sum_i log[ e^{q(z_i, z'_i)} / ((1/m) sum_j e^{q(z_i, z'_j)}) ].
double infonce_hat(const Matrix& z, const Matrix& z_prime, const CriticConfig& cfg);

/// Symmetric InfoNCE split into positive and negative losses, with both
/// one-directional estimates and the gradients needed by training.
///   -(I + I')/2 = -log m + l_ps + l_ng
struct ContrastiveTerms {
  double l_ps = 0.0;
  double l_ng = 0.0;
  double i_nce = 0.0;        // q(z_i, z'_j) direction
  double i_nce_prime = 0.0;  // arguments swapped
  Vector pointwise_ps;       // averages to l_ps
  Vector pointwise_ng;       // averages to l_ng
  int floor_hits = 0;

  // d(l_ps + l_ng)/dZ and d(l_ps + l_ng)/dZ'
  Matrix grad_sym_z;
  Matrix grad_sym_z_prime;
  // d(-i_nce)/dZ and d(-i_nce)/dZ'
  Matrix grad_plain_z;
  Matrix grad_plain_z_prime;
};

ContrastiveTerms symmetric_decomposition(const Matrix& z, const Matrix& z_prime, const CriticConfig& cfg);

/// H(Y) of the batch-mean prediction.
double marginal_entropy(const Matrix& z);
/// Mean per-row entropy H(Y|X).
double conditional_entropy(const Matrix& z);
Matrix marginal_entropy_grad(const Matrix& z);
Matrix conditional_entropy_grad(const Matrix& z);

/// sum_y p_y log(p_y / p_hat_y) with both logs floored at kLogFloor.
double kl_div(const RowVector& p, const RowVector& p_hat);

/// Adversarial directions for one batch, computed against a frozen model.
struct VatPerturbation {
  Matrix target;   // g(x_i) at the current parameters, treated as constant
  Matrix offsets;  // r_adv, one row per batch element
  Matrix probe;    // the random unit vectors u
};

/// Steps 1-3 of the power-iteration approximation: random unit u_i,
/// v_i = grad_r KL(target_i || g(x_i + r)) at r = xi u_i, r_i = eps_i v_i/|v_i|.
/// If |v_i| = 0 the direction falls back to u_i. BN uses batch statistics and
/// running statistics are not touched.
VatPerturbation vat_perturbation(const MlpState& state, const Matrix& x, const Matrix& target,
                                 const Vector& radii, double xi, Rng& rng);

struct VatResult {
  double value = 0.0;
  MlpParams grads;
};

/// R_vat = (1/m) sum_i KL(target_i || g(x_i + r_i)) and its gradient with
/// the target and offsets held fixed.
VatResult vat_penalty(const MlpState& state, const Matrix& x, const VatPerturbation& perturbation);

/// Convenience: target from a train-mode forward, then perturbation and penalty.
VatResult vat_loss(const MlpState& state, const Matrix& x, const Vector& radii, double xi, Rng& rng);

}  // namespace mist
