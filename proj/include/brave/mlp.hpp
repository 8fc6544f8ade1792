#pragma once

/**
 * Minimal feed-forward network: tanh hidden layers, linear output, flat
 * parameter vector, hand-rolled backprop and Adam, and a hard-copy target
 * parameter set. Double precision throughout so analytic gradients can be
 * checked against central finite differences.
 */

#include <cstdint>
#include <vector>

#include "brave/types.hpp"

namespace brave {

class Mlp {
 public:
  Mlp(int input_dim, std::vector<int> hidden, int output_dim, std::uint64_t seed);

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  std::size_t num_parameters() const { return theta_.size(); }

  std::vector<double>& parameters() { return theta_; }
  const std::vector<double>& parameters() const { return theta_; }
  const std::vector<double>& target_parameters() const { return target_; }

  // theta_minus := theta (hard copy).
  void sync_target() { target_ = theta_; }

  std::vector<double> run(const std::vector<double>& input) const {
    return run_with(theta_, input);
  }
  std::vector<double> run_target(const std::vector<double>& input) const {
    return run_with(target_, input);
  }
  std::vector<double> run_with(const std::vector<double>& params,
                               const std::vector<double>& input) const;

  // Training path. The cache keeps each layer's input activations; scratch
  // buffers are reused across calls.
  struct Cache {
    std::vector<std::vector<double>> acts;  // acts[0] = input, acts[L] = output
  };
  void run_cached(const std::vector<double>& input, Cache& cache) const;

  // Accumulates d(loss)/d(theta) into `grad` given d(loss)/d(output).
  void backward(const Cache& cache, const std::vector<double>& output_grad,
                std::vector<double>& grad) const;

  // One Adam update on grad*scale; returns the L2 norm of the scaled
  // gradient. Throws TrainingError on non-finite gradients.
  double adam_step(const std::vector<double>& grad, double scale,
                   double learning_rate, long step_index);

  // Layout metadata, serialized with checkpoints.
  const std::vector<int>& layer_sizes() const { return sizes_; }

 private:
  int input_dim_;
  int output_dim_;
  std::vector<int> sizes_;                 // input, hidden..., output
  std::vector<std::size_t> w_off_, b_off_;  // per linear layer
  std::vector<double> theta_, target_;
  std::vector<double> adam_m_, adam_v_;
  long adam_t_ = 0;
};

}  // namespace brave
