#include "mist/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "mist/rng.hpp"

namespace mist {

MlpParams MlpParams::zeros_like() const {
  MlpParams z;
  for (const auto& w : weights) z.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : biases) z.biases.push_back(RowVector::Zero(b.size()));
  for (const auto& s : bn_scale) z.bn_scale.push_back(RowVector::Zero(s.size()));
  for (const auto& s : bn_shift) z.bn_shift.push_back(RowVector::Zero(s.size()));
  return z;
}

std::size_t MlpParams::parameter_count() const {
  std::size_t total = 0;
  for (const auto& [name, view] : views()) total += view.size();
  return total;
}

namespace {

template <typename Params, typename Span>
std::vector<std::pair<std::string, Span>> collect_views(Params& p) {
  std::vector<std::pair<std::string, Span>> out;
  auto add = [&out](std::string name, auto& tensor) {
    out.emplace_back(std::move(name), Span(tensor.data(), static_cast<std::size_t>(tensor.size())));
  };
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    add("weights[" + std::to_string(l) + "]", p.weights[l]);
    add("biases[" + std::to_string(l) + "]", p.biases[l]);
    if (l < p.bn_scale.size()) {
      add("bn_scale[" + std::to_string(l) + "]", p.bn_scale[l]);
      add("bn_shift[" + std::to_string(l) + "]", p.bn_shift[l]);
    }
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::span<double>>> MlpParams::views() {
  return collect_views<MlpParams, std::span<double>>(*this);
}

std::vector<std::pair<std::string, std::span<const double>>> MlpParams::views() const {
  return collect_views<const MlpParams, std::span<const double>>(*this);
}

MlpParams& MlpParams::operator+=(const MlpParams& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  for (std::size_t l = 0; l < bn_scale.size(); ++l) {
    bn_scale[l] += other.bn_scale[l];
    bn_shift[l] += other.bn_shift[l];
  }
  return *this;
}

MlpParams& MlpParams::operator*=(double s) {
  for (auto& [name, view] : views()) {
    for (double& v : view) v *= s;
  }
  return *this;
}

MlpState init_mlp(Index input_dim, const std::vector<Index>& hidden, Index num_clusters,
                  std::uint64_t seed) {
  if (input_dim < 1 || num_clusters < 1) {
    throw std::invalid_argument("MLP needs input_dim >= 1 and num_clusters >= 1");
  }
  std::vector<Index> widths{input_dim};
  for (Index h : hidden) {
    if (h < 1) throw std::invalid_argument("hidden widths must be positive");
    widths.push_back(h);
  }
  widths.push_back(num_clusters);

  Rng rng(seed);
  MlpState state;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const Index fan_in = widths[l];
    const Index fan_out = widths[l + 1];
    const double std = std::sqrt(2.0 / static_cast<double>(fan_in));
    Matrix w(fan_in, fan_out);
    for (Index r = 0; r < fan_in; ++r) {
      for (Index c = 0; c < fan_out; ++c) w(r, c) = std * rng.gaussian();
    }
    state.params.weights.push_back(std::move(w));
    state.params.biases.push_back(RowVector::Zero(fan_out));
    if (l + 2 < widths.size()) {
      state.params.bn_scale.push_back(RowVector::Ones(fan_out));
      state.params.bn_shift.push_back(RowVector::Zero(fan_out));
      state.running_mean.push_back(RowVector::Zero(fan_out));
      state.running_var.push_back(RowVector::Ones(fan_out));
    }
  }
  return state;
}

namespace {

ForwardCache run_forward(const MlpState& state, const Matrix& x, Mode mode,
                         std::vector<RowVector>* batch_means, std::vector<RowVector>* batch_vars) {
  if (x.rows() < 1) throw std::invalid_argument("forward needs a nonempty batch");
  if (x.cols() != state.input_dim()) {
    throw std::invalid_argument("input has " + std::to_string(x.cols()) + " columns, model expects " +
                                std::to_string(state.input_dim()));
  }
  if (mode == Mode::Train && x.rows() < 2) {
    throw std::invalid_argument("train-mode forward needs at least 2 rows for batch statistics");
  }
  const auto& p = state.params;
  const std::size_t hidden = state.hidden_layers();
  const auto m = static_cast<double>(x.rows());

  ForwardCache cache;
  cache.mode = mode;
  cache.inputs.reserve(hidden + 1);
  cache.inputs.push_back(x);
  for (std::size_t l = 0; l < hidden; ++l) {
    Matrix h(x.rows(), p.weights[l].cols());
    h.noalias() = cache.inputs[l] * p.weights[l];
    h.rowwise() += p.biases[l];

    RowVector mean;
    RowVector var;
    if (mode == Mode::Train) {
      mean = h.colwise().mean();
      h.rowwise() -= mean;
      var = h.array().square().colwise().sum() / m;
    } else {
      mean = state.running_mean[l];
      var = state.running_var[l];
      h.rowwise() -= mean;
    }
    RowVector inv_std = (var.array() + state.bn_eps).rsqrt();
    h.array().rowwise() *= inv_std.array();

    Matrix out = (h.array().rowwise() * p.bn_scale[l].array()).rowwise() + p.bn_shift[l].array();
    out = out.cwiseMax(0.0);

    if (batch_means) batch_means->push_back(std::move(mean));
    if (batch_vars) batch_vars->push_back(std::move(var));
    cache.normalized.push_back(std::move(h));
    cache.inv_std.push_back(std::move(inv_std));
    cache.inputs.push_back(std::move(out));
  }
  cache.logits.resize(x.rows(), p.weights.back().cols());
  cache.logits.noalias() = cache.inputs.back() * p.weights.back();
  cache.logits.rowwise() += p.biases.back();

  // Max-subtracted log-softmax.
  Vector row_max = cache.logits.rowwise().maxCoeff();
  cache.log_probs = cache.logits.colwise() - row_max;
  Vector log_norm = cache.log_probs.array().exp().rowwise().sum().log();
  cache.log_probs.colwise() -= log_norm;
  cache.probs = cache.log_probs.array().exp();
  return cache;
}

}  // namespace

ForwardCache forward(const MlpState& state, const Matrix& x, Mode mode) {
  return run_forward(state, x, mode, nullptr, nullptr);
}

ForwardCache forward(MlpState& state, const Matrix& x, Mode mode, bool update_running_stats) {
  if (mode != Mode::Train || !update_running_stats) return run_forward(state, x, mode, nullptr, nullptr);
  std::vector<RowVector> means;
  std::vector<RowVector> vars;
  ForwardCache cache = run_forward(state, x, mode, &means, &vars);
  const double m = static_cast<double>(x.rows());
  const double mom = state.bn_momentum;
  for (std::size_t l = 0; l < means.size(); ++l) {
    // Running variance tracks the unbiased batch estimate.
    state.running_mean[l] = (1.0 - mom) * state.running_mean[l] + mom * means[l];
    state.running_var[l] = (1.0 - mom) * state.running_var[l] + mom * (m / (m - 1.0)) * vars[l];
  }
  return cache;
}

Matrix softmax_backward(const Matrix& probs, const Matrix& grad_probs) {
  Vector inner = (probs.array() * grad_probs.array()).rowwise().sum();
  return probs.array() * (grad_probs.colwise() - inner).array();
}

Backprop backward(const MlpState& state, const ForwardCache& cache, const Matrix& grad_logits) {
  if (grad_logits.rows() != cache.logits.rows() || grad_logits.cols() != cache.logits.cols()) {
    throw std::invalid_argument("upstream gradient shape does not match the forward cache");
  }
  const auto& p = state.params;
  const std::size_t hidden = state.hidden_layers();
  const auto m = static_cast<double>(grad_logits.rows());

  Backprop out;
  out.grads = p.zeros_like();
  auto& g = out.grads;

  g.weights[hidden].noalias() = cache.inputs[hidden].transpose() * grad_logits;
  g.biases[hidden] = grad_logits.colwise().sum();
  Matrix upstream(grad_logits.rows(), p.weights[hidden].rows());
  upstream.noalias() = grad_logits * p.weights[hidden].transpose();

  for (std::size_t l = hidden; l-- > 0;) {
    const Matrix& xhat = cache.normalized[l];
    // ReLU gate: output > 0 exactly where the pre-activation is positive.
    Matrix dy = (cache.inputs[l + 1].array() > 0.0).select(upstream, 0.0);
    g.bn_scale[l] = (dy.array() * xhat.array()).colwise().sum();
    g.bn_shift[l] = dy.colwise().sum();
    Matrix dxhat = dy.array().rowwise() * p.bn_scale[l].array();

    Matrix dh;
    if (cache.mode == Mode::Train) {
      const RowVector sum_d = dxhat.colwise().sum();
      const RowVector sum_dx = (dxhat.array() * xhat.array()).colwise().sum();
      dh = (m * dxhat.array()).rowwise() - sum_d.array();
      dh.array() -= xhat.array().rowwise() * sum_dx.array();
      dh.array().rowwise() *= cache.inv_std[l].array() / m;
    } else {
      dh = dxhat.array().rowwise() * cache.inv_std[l].array();
    }

    g.weights[l].noalias() = cache.inputs[l].transpose() * dh;
    g.biases[l] = dh.colwise().sum();
    upstream.resize(dh.rows(), p.weights[l].rows());
    upstream.noalias() = dh * p.weights[l].transpose();
  }
  out.input_grad = std::move(upstream);
  return out;
}

AdamState init_adam(const MlpState& state, double lr) {
  AdamState adam;
  adam.first_moment = state.params.zeros_like();
  adam.second_moment = state.params.zeros_like();
  adam.lr = lr;
  return adam;
}

void adam_step(MlpParams& params, AdamState& adam, const MlpParams& grads) {
  const auto g_views = grads.views();
  for (const auto& [name, view] : g_views) {
    for (double v : view) {
      if (!std::isfinite(v)) throw std::runtime_error("non-finite gradient in " + name);
    }
  }
  auto p_views = params.views();
  auto m_views = adam.first_moment.views();
  auto v_views = adam.second_moment.views();
  if (p_views.size() != g_views.size()) throw std::invalid_argument("gradient layout mismatch");

  adam.step += 1;
  const double t = static_cast<double>(adam.step);
  const double correct1 = 1.0 - std::pow(adam.beta1, t);
  const double correct2 = 1.0 - std::pow(adam.beta2, t);
  for (std::size_t k = 0; k < p_views.size(); ++k) {
    auto p = p_views[k].second;
    auto m = m_views[k].second;
    auto v = v_views[k].second;
    const auto g = g_views[k].second;
    if (p.size() != g.size()) throw std::invalid_argument("gradient shape mismatch in " + p_views[k].first);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
      v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correct1;
      const double v_hat = v[i] / correct2;
      p[i] -= adam.lr * m_hat / (std::sqrt(v_hat) + adam.eps);
    }
  }
}

Labels argmax_rows(const Matrix& probs) {
  Labels out(static_cast<std::size_t>(probs.rows()));
  for (Index i = 0; i < probs.rows(); ++i) {
    Index best = 0;
    for (Index c = 1; c < probs.cols(); ++c) {
      if (probs(i, c) > probs(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

Labels predict(const MlpState& state, const Matrix& features) {
  constexpr Index kChunk = 1024;
  Labels out;
  out.reserve(static_cast<std::size_t>(features.rows()));
  for (Index start = 0; start < features.rows(); start += kChunk) {
    const Index rows = std::min(kChunk, features.rows() - start);
    const ForwardCache cache = forward(state, features.middleRows(start, rows), Mode::Eval);
    const Labels part = argmax_rows(cache.probs);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'M', 'I', 'S', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  if (!in) throw std::runtime_error("truncated checkpoint");
  return value;
}

void put_tensors(std::ofstream& out, const MlpParams& p) {
  for (const auto& [name, view] : p.views()) {
    out.write(reinterpret_cast<const char*>(view.data()), static_cast<std::streamsize>(view.size_bytes()));
  }
}

void get_tensors(std::ifstream& in, MlpParams& p) {
  for (auto& [name, view] : p.views()) {
    in.read(reinterpret_cast<char*>(view.data()), static_cast<std::streamsize>(view.size_bytes()));
    if (!in) throw std::runtime_error("truncated checkpoint in " + name);
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MlpState& state, const AdamState& adam,
                     std::uint64_t config_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put(out, kVersion);
  put(out, config_hash);
  put<std::int64_t>(out, static_cast<std::int64_t>(state.params.weights.size()));
  for (const auto& w : state.params.weights) {
    put<std::int64_t>(out, w.rows());
    put<std::int64_t>(out, w.cols());
  }
  put(out, state.bn_momentum);
  put(out, state.bn_eps);
  put<std::int64_t>(out, adam.step);
  put(out, adam.lr);
  put(out, adam.beta1);
  put(out, adam.beta2);
  put(out, adam.eps);
  put_tensors(out, state.params);
  put_tensors(out, adam.first_moment);
  put_tensors(out, adam.second_moment);
  for (std::size_t l = 0; l < state.hidden_layers(); ++l) {
    out.write(reinterpret_cast<const char*>(state.running_mean[l].data()),
              static_cast<std::streamsize>(sizeof(double) * state.running_mean[l].size()));
    out.write(reinterpret_cast<const char*>(state.running_var[l].data()),
              static_cast<std::streamsize>(sizeof(double) * state.running_var[l].size()));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw std::runtime_error(path.string() + " is not a checkpoint");
  }
  if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported checkpoint version");
  Checkpoint ck;
  ck.config_hash = get<std::uint64_t>(in);
  const auto layers = get<std::int64_t>(in);
  if (layers < 1 || layers > 64) throw std::runtime_error("corrupt checkpoint layer count");
  std::vector<Index> widths;
  for (std::int64_t l = 0; l < layers; ++l) {
    const auto rows = get<std::int64_t>(in);
    const auto cols = get<std::int64_t>(in);
    if (l == 0) widths.push_back(rows);
    widths.push_back(cols);
  }
  std::vector<Index> hidden(widths.begin() + 1, widths.end() - 1);
  ck.state = init_mlp(widths.front(), hidden, widths.back(), 0);
  ck.state.bn_momentum = get<double>(in);
  ck.state.bn_eps = get<double>(in);
  ck.adam = init_adam(ck.state, 0.0);
  ck.adam.step = get<std::int64_t>(in);
  ck.adam.lr = get<double>(in);
  ck.adam.beta1 = get<double>(in);
  ck.adam.beta2 = get<double>(in);
  ck.adam.eps = get<double>(in);
  get_tensors(in, ck.state.params);
  get_tensors(in, ck.adam.first_moment);
  get_tensors(in, ck.adam.second_moment);
  for (std::size_t l = 0; l < ck.state.hidden_layers(); ++l) {
    in.read(reinterpret_cast<char*>(ck.state.running_mean[l].data()),
            static_cast<std::streamsize>(sizeof(double) * ck.state.running_mean[l].size()));
    in.read(reinterpret_cast<char*>(ck.state.running_var[l].data()),
            static_cast<std::streamsize>(sizeof(double) * ck.state.running_var[l].size()));
  }
  if (!in) throw std::runtime_error("truncated checkpoint");
  return ck;
}

}  // namespace mist
