#pragma once

/**
 * Experiment layer: policy evaluation rollouts, multi-seed training runs
 * for the tree model and the constrained-DQN baseline, and CSV/JSON output.
 * Seeds run independently (optionally on separate threads) and aggregation
 * is a pure post-pass, so results never depend on scheduling.
 */

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "brave/brave_core.hpp"
#include "brave/cone_env.hpp"
#include "brave/dataset.hpp"
#include "brave/dqn_baseline.hpp"
#include "brave/value_model.hpp"

namespace brave {

struct EvalStats {
  double mean = 0.0;
  double stdd = 0.0;
  double goal_rate = 0.0;
  double pit_rate = 0.0;
  double horizon_rate = 0.0;
};

using PolicyFn = std::function<ActionVector(const GridState&)>;

// Undiscounted-return statistics over `episodes` rollouts from the start
// state, plus termination-kind rates.
EvalStats evaluate_policy(const EnvConfig& cfg, const PolicyFn& policy, int episodes);

// Beam-search policy over the online parameters.
PolicyFn beam_policy(const ActionTree& tree, const ValueModel& model,
                     const EnvConfig& cfg, int beam_width);

struct ExperimentSpec {
  BraveConfig brave;
  std::vector<int> hidden_sizes{256, 256};
  double learning_rate = 3e-4;
  TrainOptions train_opts;
  int eval_episodes = 10;
  std::vector<std::uint64_t> seeds;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<LogRow> log;
  double final_return_mean = 0.0;
  double final_return_std = 0.0;
  EvalStats final_stats;
};

struct RunSummary {
  std::vector<SeedResult> seeds;
  double final_mean = 0.0;  // mean over seeds of the final eval return
  double final_std = 0.0;   // std across seeds
};

// Trains one model per seed on a shared dataset/tree. `jobs` > 1 runs seeds
// on that many threads; outputs are identical to the sequential run.
RunSummary run_brave_experiment(const Dataset& ds, const ExperimentSpec& spec,
                                int jobs = 1,
                                std::vector<ValueModel>* final_models = nullptr);
RunSummary run_dqn_experiment(const Dataset& ds, const ExperimentSpec& spec,
                              int jobs = 1);

// CSV schema: step,total_loss,td_loss,brave_loss,eval_return_mean,eval_return_std
void write_csv(const std::vector<LogRow>& log, const std::string& path);

std::string summary_to_json(const RunSummary& summary);

}  // namespace brave
