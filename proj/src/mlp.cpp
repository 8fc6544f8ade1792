#include "brave/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "brave/rng.hpp"

namespace brave {

Mlp::Mlp(int input_dim, std::vector<int> hidden, int output_dim, std::uint64_t seed)
    : input_dim_(input_dim), output_dim_(output_dim) {
  if (input_dim < 1 || output_dim < 1) {
    throw ConfigError("network dimensions must be positive");
  }
  sizes_.push_back(input_dim);
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden sizes must be positive");
    sizes_.push_back(h);
  }
  sizes_.push_back(output_dim);

  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    w_off_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l]) * static_cast<std::size_t>(sizes_[l + 1]);
    b_off_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]);
  }
  theta_.assign(total, 0.0);
  adam_m_.assign(total, 0.0);
  adam_v_.assign(total, 0.0);

  // Xavier-uniform weights, zero biases.
  std::mt19937_64 rng = make_rng(seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double limit = std::sqrt(6.0 / (sizes_[l] + sizes_[l + 1]));
    const std::size_t n =
        static_cast<std::size_t>(sizes_[l]) * static_cast<std::size_t>(sizes_[l + 1]);
    for (std::size_t i = 0; i < n; ++i) {
      theta_[w_off_[l] + i] = (2.0 * rng_unit(rng) - 1.0) * limit;
    }
  }
  target_ = theta_;
}

std::vector<double> Mlp::run_with(const std::vector<double>& params,
                                  const std::vector<double>& input) const {
  if (static_cast<int>(input.size()) != input_dim_) {
    throw std::invalid_argument("input dimension mismatch");
  }
  std::vector<double> cur = input;
  std::vector<double> next;
  const std::size_t layers = w_off_.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    next.assign(static_cast<std::size_t>(out), 0.0);
    const double* w = params.data() + w_off_[l];
    const double* b = params.data() + b_off_[l];
    for (int o = 0; o < out; ++o) {
      const double* row = w + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      double acc = b[o];
      for (int i = 0; i < in; ++i) acc += row[i] * cur[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] = (l + 1 < layers) ? std::tanh(acc) : acc;
    }
    cur.swap(next);
  }
  return cur;
}

void Mlp::run_cached(const std::vector<double>& input, Cache& cache) const {
  if (static_cast<int>(input.size()) != input_dim_) {
    throw std::invalid_argument("input dimension mismatch");
  }
  const std::size_t layers = w_off_.size();
  cache.acts.resize(layers + 1);
  cache.acts[0] = input;
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const std::vector<double>& x = cache.acts[l];
    std::vector<double>& y = cache.acts[l + 1];
    y.assign(static_cast<std::size_t>(out), 0.0);
    const double* w = theta_.data() + w_off_[l];
    const double* b = theta_.data() + b_off_[l];
    for (int o = 0; o < out; ++o) {
      const double* row = w + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      double acc = b[o];
      for (int i = 0; i < in; ++i) acc += row[i] * x[static_cast<std::size_t>(i)];
      y[static_cast<std::size_t>(o)] = (l + 1 < layers) ? std::tanh(acc) : acc;
    }
  }
}

void Mlp::backward(const Cache& cache, const std::vector<double>& output_grad,
                   std::vector<double>& grad) const {
  if (grad.size() != theta_.size()) grad.assign(theta_.size(), 0.0);
  const std::size_t layers = w_off_.size();
  // d(loss)/d(pre-activation) of the current layer; output layer is linear.
  std::vector<double> dz = output_grad;
  std::vector<double> dx;
  for (std::size_t l = layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const std::vector<double>& x = cache.acts[l];
    const double* w = theta_.data() + w_off_[l];
    double* gw = grad.data() + w_off_[l];
    double* gb = grad.data() + b_off_[l];
    dx.assign(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      const double g = dz[static_cast<std::size_t>(o)];
      if (g == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      double* grow = gw + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
      gb[o] += g;
      for (int i = 0; i < in; ++i) {
        grow[i] += g * x[static_cast<std::size_t>(i)];
        dx[static_cast<std::size_t>(i)] += g * row[i];
      }
    }
    if (l > 0) {
      // Propagate through the tanh that produced x = acts[l].
      dz.assign(x.size(), 0.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        dz[i] = dx[i] * (1.0 - x[i] * x[i]);
      }
    }
  }
}

double Mlp::adam_step(const std::vector<double>& grad, double scale,
                      double learning_rate, long step_index) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  ++adam_t_;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(adam_t_));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(adam_t_));
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    const double g = grad[i] * scale;
    if (!std::isfinite(g)) {
      throw TrainingError("non-finite gradient", step_index);
    }
    norm_sq += g * g;
    adam_m_[i] = beta1 * adam_m_[i] + (1.0 - beta1) * g;
    adam_v_[i] = beta2 * adam_v_[i] + (1.0 - beta2) * g * g;
    theta_[i] -= learning_rate * (adam_m_[i] / bc1) / (std::sqrt(adam_v_[i] / bc2) + eps);
  }
  return std::sqrt(norm_sq);
}

}  // namespace brave
