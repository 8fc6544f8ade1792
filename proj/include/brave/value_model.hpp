#pragma once

/**
 * Value network for tree-guided action selection.
 *
 * Maps (normalized state, complete action vector) to a scalar node Q-value
 * plus a fixed-width vector of branch values, one per possible child
 * sub-action value. Output width is always 1 + m_max regardless of a node's
 * true child count; callers supply a mask and masked entries must never feed
 * a max or a loss. The training loop is the single writer of the online
 * parameters; read-only snapshots may be evaluated concurrently.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "brave/mlp.hpp"
#include "brave/types.hpp"

namespace brave {

struct ModelConfig {
  int state_dim = 0;
  int action_dim = 0;
  std::vector<int> hidden_sizes{256, 256};
  int m_max = 0;
  double learning_rate = 3e-4;
  std::uint64_t seed = 0;

  int input_dim() const { return state_dim + action_dim; }
  int output_dim() const { return 1 + m_max; }
  bool operator==(const ModelConfig&) const = default;
};

struct ModelOutput {
  double q = 0.0;
  std::vector<double> v;           // length m_max
  std::vector<std::uint8_t> mask;  // length m_max

  // Max over unmasked branch values; most-negative finite when none.
  double masked_vmax() const;
  // Index of the unmasked max (ties -> lowest index); -1 when none.
  int masked_argmax() const;
};

// Grid coordinates scaled to [0, 1] by coord / (size - 1).
std::vector<double> normalize_state(const GridState& s, int grid_size);

class ValueModel {
 public:
  explicit ValueModel(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }

  ModelOutput forward(const std::vector<double>& state_features,
                      const ActionVector& action,
                      const std::vector<std::uint8_t>& mask) const;
  ModelOutput forward_target(const std::vector<double>& state_features,
                             const ActionVector& action,
                             const std::vector<std::uint8_t>& mask) const;

  std::vector<double> make_input(const std::vector<double>& state_features,
                                 const ActionVector& action) const;

  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

  std::vector<double>& parameters() { return net_.parameters(); }
  const std::vector<double>& parameters() const { return net_.parameters(); }
  const std::vector<double>& target_parameters() const {
    return net_.target_parameters();
  }
  std::size_t num_parameters() const { return net_.num_parameters(); }
  void sync_target() { net_.sync_target(); }

  // One optimizer update on grad*scale; returns the scaled gradient norm.
  double apply_step(const std::vector<double>& grad, double scale, long step_index);

  // Versioned binary checkpoint (magic "BRVM"): config JSON + flat theta.
  // Loading restores forward outputs bitwise; the target copy is reset to
  // the loaded parameters.
  void save(const std::string& path) const;
  static ValueModel load(const std::string& path);

 private:
  ModelConfig cfg_;
  Mlp net_;
};

}  // namespace brave
