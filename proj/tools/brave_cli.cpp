// Command-line harness: dataset generation, training, evaluation, ablation
// sweeps, the value-iteration oracle, and the constrained-DQN baseline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "brave/brave_core.hpp"
#include "brave/dataset.hpp"
#include "brave/dqn_baseline.hpp"
#include "brave/harness.hpp"
#include "brave/value_iteration.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct EnvFlags {
  int dims = 2;
  int size = 5;
  int pits = 0;
  double pit_fraction = -1.0;
  int horizon = 0;
  std::uint64_t seed = 0;
  std::string env_json;
};

void add_env_flags(CLI::App* cmd, EnvFlags& flags) {
  cmd->add_option("--dims", flags.dims, "Spatial dimensions D");
  cmd->add_option("--size", flags.size, "Positions per axis");
  cmd->add_option("--pits", flags.pits, "Number of interior pit cells");
  cmd->add_option("--pit-fraction", flags.pit_fraction,
                  "Pit count as a fraction of interior cells (overrides --pits)");
  cmd->add_option("--horizon", flags.horizon, "Episode step limit (0 = default)");
  cmd->add_option("--seed", flags.seed, "Environment/dataset seed");
  cmd->add_option("--env-json", flags.env_json,
                  "Load the environment from a JSON file instead");
}

brave::EnvConfig resolve_env(const EnvFlags& flags) {
  if (!flags.env_json.empty()) {
    std::ifstream in(flags.env_json);
    if (!in) throw brave::FormatError("cannot open " + flags.env_json);
    std::stringstream buf;
    buf << in.rdbuf();
    return brave::env_from_json(buf.str());
  }
  brave::EnvConfig cfg =
      flags.pit_fraction >= 0.0
          ? brave::random_environment(flags.dims, flags.size, flags.pit_fraction,
                                      flags.seed)
          : brave::random_environment_with_pit_count(flags.dims, flags.size,
                                                     flags.pits, flags.seed);
  if (flags.horizon > 0) cfg.horizon = flags.horizon;
  return cfg;
}

struct TrainFlags {
  std::string data;
  std::string out_dir = "run";
  long steps = 20000;
  int eval_interval = 100;
  int eval_episodes = 10;
  int batch_size = 256;
  int target_interval = 100;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<int> hidden{256, 256};
  double lr = 3e-4;
  double alpha = 1.0;
  double lambda = 1.0;
  double delta = 1.0;
  double gamma = 0.99;
  int beam_width = 10;
  std::string penalty_norm = "l1";
  int jobs = 1;
};

void add_train_flags(CLI::App* cmd, TrainFlags& flags) {
  cmd->add_option("--data", flags.data, "Dataset file")->required();
  cmd->add_option("--out", flags.out_dir, "Output directory");
  cmd->add_option("--steps", flags.steps, "Gradient steps");
  cmd->add_option("--eval-interval", flags.eval_interval, "Steps between evaluations");
  cmd->add_option("--eval-episodes", flags.eval_episodes, "Rollouts per evaluation");
  cmd->add_option("--batch-size", flags.batch_size, "Minibatch size");
  cmd->add_option("--target-interval", flags.target_interval,
                  "Steps between hard target syncs");
  cmd->add_option("--seeds", flags.seeds, "Training seeds")->delimiter(',');
  cmd->add_option("--hidden", flags.hidden, "Hidden layer sizes")->delimiter(',');
  cmd->add_option("--lr", flags.lr, "Learning rate");
  cmd->add_option("--alpha", flags.alpha, "TD term weight");
  cmd->add_option("--lambda", flags.lambda, "Target regularization coefficient");
  cmd->add_option("--delta", flags.delta, "Depth penalty");
  cmd->add_option("--gamma", flags.gamma, "Discount factor");
  cmd->add_option("--beam-width", flags.beam_width, "Beam width for evaluation");
  cmd->add_option("--penalty-norm", flags.penalty_norm, "Penalty norm: l1 or l2")
      ->check(CLI::IsMember({"l1", "l2"}));
  cmd->add_option("--jobs", flags.jobs, "Seeds trained in parallel");
}

brave::ExperimentSpec make_spec(const TrainFlags& flags) {
  brave::ExperimentSpec spec;
  spec.hidden_sizes = flags.hidden;
  spec.learning_rate = flags.lr;
  spec.train_opts.steps = flags.steps;
  spec.train_opts.batch_size = flags.batch_size;
  spec.train_opts.target_sync_interval = flags.target_interval;
  spec.train_opts.eval_interval = flags.eval_interval;
  spec.eval_episodes = flags.eval_episodes;
  spec.seeds = flags.seeds;
  spec.brave.alpha = flags.alpha;
  spec.brave.lambda = flags.lambda;
  spec.brave.delta = flags.delta;
  spec.brave.gamma = flags.gamma;
  spec.brave.beam_width = flags.beam_width;
  spec.brave.penalty_norm = flags.penalty_norm == "l2" ? brave::PenaltyNorm::L2
                                                       : brave::PenaltyNorm::L1;
  return spec;
}

json spec_manifest(const TrainFlags& flags, const brave::Dataset& ds) {
  json j;
  j["data"] = flags.data;
  j["env"] = json::parse(brave::env_to_json(ds.env));
  j["steps"] = flags.steps;
  j["eval_interval"] = flags.eval_interval;
  j["eval_episodes"] = flags.eval_episodes;
  j["batch_size"] = flags.batch_size;
  j["target_interval"] = flags.target_interval;
  j["seeds"] = flags.seeds;
  j["hidden"] = flags.hidden;
  j["lr"] = flags.lr;
  j["alpha"] = flags.alpha;
  j["lambda"] = flags.lambda;
  j["delta"] = flags.delta;
  j["gamma"] = flags.gamma;
  j["beam_width"] = flags.beam_width;
  j["penalty_norm"] = flags.penalty_norm;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw brave::FormatError("cannot open for writing: " + path.string());
  out << text;
}

int run_training(const TrainFlags& flags, bool baseline_dqn) {
  const brave::Dataset ds = brave::load(flags.data);
  const brave::ExperimentSpec spec = make_spec(flags);
  fs::create_directories(flags.out_dir);

  brave::RunSummary summary;
  std::vector<brave::ValueModel> models;
  if (baseline_dqn) {
    summary = brave::run_dqn_experiment(ds, spec, flags.jobs);
  } else {
    summary = brave::run_brave_experiment(ds, spec, flags.jobs, &models);
  }

  for (std::size_t i = 0; i < summary.seeds.size(); ++i) {
    const brave::SeedResult& r = summary.seeds[i];
    const fs::path csv = fs::path(flags.out_dir) /
                         ("seed_" + std::to_string(r.seed) + ".csv");
    brave::write_csv(r.log, csv.string());
    if (!baseline_dqn) {
      const fs::path ckpt = fs::path(flags.out_dir) /
                            ("seed_" + std::to_string(r.seed) + "_model.bin");
      models[i].save(ckpt.string());
    }
  }
  json manifest = spec_manifest(flags, ds);
  manifest["algorithm"] = baseline_dqn ? "constrained-dqn" : "brave";
  write_text(fs::path(flags.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  write_text(fs::path(flags.out_dir) / "summary.json",
             brave::summary_to_json(summary) + "\n");

  std::cout << "final return " << summary.final_mean << " +/- " << summary.final_std
            << " over " << summary.seeds.size() << " seeds; outputs in "
            << flags.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline RL toolkit for combinatorial action spaces"};
  app.require_subcommand(1);

  // gen-data ---------------------------------------------------------------
  EnvFlags gen_env;
  int gen_episodes = 500;
  double gen_p_opt = 0.1;
  std::string gen_out = "dataset.bin";
  std::string gen_save_env;
  CLI::App* gen = app.add_subcommand("gen-data", "Generate an offline dataset");
  add_env_flags(gen, gen_env);
  gen->add_option("--episodes", gen_episodes, "Episodes to roll out");
  gen->add_option("--p-opt", gen_p_opt, "Probability of the optimal action");
  gen->add_option("--out", gen_out, "Output dataset file")->required();
  gen->add_option("--save-env", gen_save_env, "Also write the environment JSON");

  // train / baseline-dqn ----------------------------------------------------
  TrainFlags train_flags;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the tree model");
  add_train_flags(train_cmd, train_flags);

  TrainFlags dqn_flags;
  CLI::App* dqn_cmd =
      app.add_subcommand("baseline-dqn", "Train the dataset-constrained DQN baseline");
  add_train_flags(dqn_cmd, dqn_flags);

  // eval ---------------------------------------------------------------------
  std::string eval_data, eval_model, eval_out;
  int eval_episodes = 10;
  int eval_beam = 10;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a saved checkpoint");
  eval_cmd->add_option("--data", eval_data, "Dataset file (supplies the environment)")
      ->required();
  eval_cmd->add_option("--model", eval_model, "Model checkpoint")->required();
  eval_cmd->add_option("--episodes", eval_episodes, "Rollout episodes");
  eval_cmd->add_option("--beam-width", eval_beam, "Beam width");
  eval_cmd->add_option("--out", eval_out, "Write the report JSON here");

  // sweep ---------------------------------------------------------------------
  TrainFlags sweep_flags;
  std::string sweep_param = "delta";
  std::vector<double> sweep_values;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Train once per value of one hyperparameter");
  add_train_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--param", sweep_param, "One of: delta, alpha, beam-width")
      ->check(CLI::IsMember({"delta", "alpha", "beam-width"}));
  sweep_cmd->add_option("--values", sweep_values, "Values to sweep")
      ->delimiter(',')
      ->required();

  // oracle-vi -------------------------------------------------------------------
  EnvFlags vi_env;
  std::string vi_data, vi_out;
  double vi_gamma = 1.0;
  CLI::App* vi_cmd =
      app.add_subcommand("oracle-vi", "Exact value iteration on a small instance");
  add_env_flags(vi_cmd, vi_env);
  vi_cmd->add_option("--data", vi_data, "Take the environment from this dataset");
  vi_cmd->add_option("--gamma", vi_gamma, "Discount factor");
  vi_cmd->add_option("--out", vi_out, "Write the value table JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const brave::EnvConfig cfg = resolve_env(gen_env);
      const brave::Dataset ds =
          brave::generate(cfg, gen_episodes, gen_p_opt, gen_env.seed);
      brave::save(ds, gen_out);
      if (!gen_save_env.empty()) {
        write_text(gen_save_env, brave::env_to_json(cfg) + "\n");
      }
      std::cout << "wrote " << ds.transitions.size() << " transitions over "
                << ds.episodes.size() << " episodes to " << gen_out << "\n";
      return 0;
    }
    if (train_cmd->parsed()) return run_training(train_flags, false);
    if (dqn_cmd->parsed()) return run_training(dqn_flags, true);

    if (eval_cmd->parsed()) {
      const brave::Dataset ds = brave::load(eval_data);
      const brave::ValueModel model = brave::ValueModel::load(eval_model);
      const std::vector<int> dims(static_cast<std::size_t>(ds.env.action_dim()), 2);
      const brave::ActionTree tree =
          brave::ActionTree::build_sparsified(dims, brave::unique_actions(ds));
      const brave::EvalStats st = brave::evaluate_policy(
          ds.env, brave::beam_policy(tree, model, ds.env, eval_beam), eval_episodes);
      json j;
      j["return_mean"] = st.mean;
      j["return_std"] = st.stdd;
      j["goal_rate"] = st.goal_rate;
      j["pit_rate"] = st.pit_rate;
      j["horizon_rate"] = st.horizon_rate;
      j["episodes"] = eval_episodes;
      j["beam_width"] = eval_beam;
      const std::string text = j.dump(2) + "\n";
      if (!eval_out.empty()) write_text(eval_out, text);
      std::cout << text;
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const fs::path root = sweep_flags.out_dir;
      for (double value : sweep_values) {
        TrainFlags run = sweep_flags;
        if (sweep_param == "delta") {
          run.delta = value;
        } else if (sweep_param == "alpha") {
          run.alpha = value;
        } else {
          run.beam_width = static_cast<int>(value);
        }
        std::ostringstream name;
        name << sweep_param << "_" << value;
        run.out_dir = (root / name.str()).string();
        std::cout << "=== " << name.str() << " ===\n";
        run_training(run, false);
      }
      return 0;
    }

    if (vi_cmd->parsed()) {
      const brave::EnvConfig cfg =
          vi_data.empty() ? resolve_env(vi_env) : brave::load(vi_data).env;
      const brave::ValueIterationResult vi = brave::value_iteration(cfg, vi_gamma);
      const brave::GreedyRollout roll = brave::rollout_greedy(cfg, vi);
      json j;
      j["sweeps"] = vi.sweeps;
      j["final_delta"] = vi.final_delta;
      j["start_value"] = vi.values[brave::state_index(cfg, cfg.start)];
      j["greedy_return"] = roll.undiscounted_return;
      j["greedy_outcome"] = brave::to_string(roll.outcome);
      j["gamma"] = vi_gamma;
      json table = json::array();
      for (std::size_t idx = 0; idx < vi.values.size(); ++idx) {
        json row;
        row["state"] = brave::state_from_index(cfg, idx);
        row["value"] = vi.values[idx];
        row["greedy_action"] = vi.greedy[idx];
        table.push_back(row);
      }
      j["values"] = table;
      const std::string text = j.dump(2) + "\n";
      if (!vi_out.empty()) write_text(vi_out, text);
      std::cout << "value iteration: " << vi.sweeps << " sweeps, start value "
                << vi.values[brave::state_index(cfg, cfg.start)] << ", greedy return "
                << roll.undiscounted_return << " (" << brave::to_string(roll.outcome)
                << ")\n";
      if (vi_out.empty() && vi.values.size() <= 64) std::cout << text;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
