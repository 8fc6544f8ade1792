#include "brave/cone_env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "brave/rng.hpp"

namespace brave {

const char* to_string(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::none: return "none";
    case TerminalKind::goal: return "goal";
    case TerminalKind::pit: return "pit";
    case TerminalKind::horizon: return "horizon";
  }
  return "none";
}

double euclidean(const GridState& a, const GridState& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i] - b[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

double pit_reward(const EnvConfig& cfg) {
  return -10.0 * euclidean(cfg.start, cfg.goal);
}

bool in_bounds(const EnvConfig& cfg, const GridState& s) {
  if (static_cast<int>(s.size()) != cfg.dims) return false;
  for (int c : s) {
    if (c < 0 || c >= cfg.size) return false;
  }
  return true;
}

bool is_interior(const EnvConfig& cfg, const GridState& s) {
  if (static_cast<int>(s.size()) != cfg.dims) return false;
  for (int c : s) {
    if (c <= 0 || c >= cfg.size - 1) return false;
  }
  return true;
}

bool is_pit(const EnvConfig& cfg, const GridState& s) {
  return cfg.pits.count(s) > 0;
}

void validate(const EnvConfig& cfg) {
  if (cfg.dims < 1) throw ConfigError("dims must be positive");
  if (cfg.size < 2) throw ConfigError("size must be at least 2");
  if (cfg.horizon < 1) throw ConfigError("horizon must be positive");
  if (!in_bounds(cfg, cfg.start)) throw ConfigError("start out of bounds");
  if (!in_bounds(cfg, cfg.goal)) throw ConfigError("goal out of bounds");
  if (cfg.start == cfg.goal) throw ConfigError("start equals goal");
  if (is_pit(cfg, cfg.start)) throw ConfigError("start is a pit");
  if (is_pit(cfg, cfg.goal)) throw ConfigError("goal is a pit");
  for (const GridState& p : cfg.pits) {
    if (!is_interior(cfg, p)) {
      throw ConfigError("pit cells must be strictly interior");
    }
  }
}

int default_horizon(int dims) { return dims <= 8 ? 100 : 200; }

std::vector<int> displacement(const ActionVector& action, int dims) {
  if (static_cast<int>(action.size()) != 2 * dims) {
    throw std::invalid_argument("action length must be 2*dims");
  }
  std::vector<int> disp(dims);
  for (int i = 0; i < dims; ++i) {
    disp[i] = action[2 * i] - action[2 * i + 1];
  }
  return disp;
}

GridState reset(const EnvConfig& cfg) { return cfg.start; }

StepOutcome step(const EnvConfig& cfg, const GridState& state,
                 const ActionVector& action, int steps_taken) {
  if (!in_bounds(cfg, state)) {
    throw std::invalid_argument("state out of bounds");
  }
  if (steps_taken < 0 || steps_taken >= cfg.horizon) {
    throw std::invalid_argument("steps_taken outside [0, horizon)");
  }
  const std::vector<int> disp = displacement(action, cfg.dims);

  StepOutcome out;
  out.next_state.resize(cfg.dims);
  for (int i = 0; i < cfg.dims; ++i) {
    out.next_state[i] = std::clamp(state[i] + disp[i], 0, cfg.size - 1);
  }

  if (out.next_state == cfg.goal) {
    out.reward = 10.0;
    out.terminal = true;
    out.terminal_kind = TerminalKind::goal;
  } else if (is_pit(cfg, out.next_state)) {
    out.reward = pit_reward(cfg);
    out.terminal = true;
    out.terminal_kind = TerminalKind::pit;
  } else {
    out.reward = -euclidean(out.next_state, cfg.goal);
    if (steps_taken + 1 == cfg.horizon) {
      out.terminal = true;
      out.terminal_kind = TerminalKind::horizon;
    }
  }
  return out;
}

namespace {

std::vector<GridState> interior_states(int dims, int size) {
  std::vector<GridState> cells;
  if (size < 3) return cells;
  const int span = size - 2;
  std::size_t total = 1;
  for (int i = 0; i < dims; ++i) total *= static_cast<std::size_t>(span);
  cells.reserve(total);
  GridState cur(dims, 1);
  for (std::size_t n = 0; n < total; ++n) {
    cells.push_back(cur);
    for (int i = dims - 1; i >= 0; --i) {
      if (++cur[i] <= span) break;
      cur[i] = 1;
    }
  }
  return cells;
}

}  // namespace

EnvConfig random_environment_with_pit_count(int dims, int size, int num_pits,
                                            std::uint64_t rng_seed) {
  if (dims < 1 || size < 2) throw ConfigError("invalid grid dimensions");
  if (num_pits < 0) throw ConfigError("negative pit count");

  EnvConfig cfg;
  cfg.dims = dims;
  cfg.size = size;
  cfg.start.assign(dims, 0);
  cfg.goal.assign(dims, size - 1);
  cfg.horizon = default_horizon(dims);
  cfg.seed = static_cast<std::int64_t>(rng_seed);

  std::vector<GridState> cells = interior_states(dims, size);
  std::erase(cells, cfg.start);
  std::erase(cells, cfg.goal);
  if (static_cast<std::size_t>(num_pits) > cells.size()) {
    throw ConfigError("pit count exceeds available interior cells");
  }

  std::mt19937_64 rng = make_rng(rng_seed);
  for (int i = 0; i < num_pits; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng_below(rng, cells.size() - i));
    std::swap(cells[i], cells[j]);
    cfg.pits.insert(cells[i]);
  }
  validate(cfg);
  return cfg;
}

EnvConfig random_environment(int dims, int size, double pit_fraction,
                             std::uint64_t rng_seed) {
  if (pit_fraction < 0.0 || pit_fraction > 1.0) {
    throw ConfigError("pit_fraction must lie in [0, 1]");
  }
  const std::size_t available = interior_states(dims, size).size();
  const int num_pits =
      static_cast<int>(std::llround(pit_fraction * static_cast<double>(available)));
  return random_environment_with_pit_count(dims, size, num_pits, rng_seed);
}

std::string env_to_json(const EnvConfig& cfg) {
  nlohmann::json j;
  j["dims"] = cfg.dims;
  j["size"] = cfg.size;
  j["pits"] = std::vector<GridState>(cfg.pits.begin(), cfg.pits.end());
  j["start"] = cfg.start;
  j["goal"] = cfg.goal;
  j["horizon"] = cfg.horizon;
  j["seed"] = cfg.seed;
  return j.dump();
}

EnvConfig env_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid environment JSON: ") + e.what());
  }
  try {
    EnvConfig cfg;
    cfg.dims = j.at("dims").get<int>();
    cfg.size = j.at("size").get<int>();
    for (const auto& p : j.at("pits")) {
      cfg.pits.insert(p.get<GridState>());
    }
    cfg.start = j.at("start").get<GridState>();
    cfg.goal = j.at("goal").get<GridState>();
    cfg.horizon = j.at("horizon").get<int>();
    cfg.seed = j.at("seed").get<std::int64_t>();
    validate(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("environment JSON missing field: ") + e.what());
  }
}

std::size_t state_count(const EnvConfig& cfg) {
  std::size_t n = 1;
  for (int i = 0; i < cfg.dims; ++i) n *= static_cast<std::size_t>(cfg.size);
  return n;
}

std::size_t state_index(const EnvConfig& cfg, const GridState& s) {
  std::size_t idx = 0;
  for (int i = 0; i < cfg.dims; ++i) {
    idx = idx * static_cast<std::size_t>(cfg.size) + static_cast<std::size_t>(s[i]);
  }
  return idx;
}

GridState state_from_index(const EnvConfig& cfg, std::size_t index) {
  GridState s(cfg.dims);
  for (int i = cfg.dims - 1; i >= 0; --i) {
    s[i] = static_cast<int>(index % static_cast<std::size_t>(cfg.size));
    index /= static_cast<std::size_t>(cfg.size);
  }
  return s;
}

std::vector<std::vector<int>> all_displacements(int dims) {
  std::size_t total = 1;
  for (int i = 0; i < dims; ++i) total *= 3;
  std::vector<std::vector<int>> out;
  out.reserve(total);
  std::vector<int> cur(dims, -1);
  for (std::size_t n = 0; n < total; ++n) {
    out.push_back(cur);
    for (int i = dims - 1; i >= 0; --i) {
      if (++cur[i] <= 1) break;
      cur[i] = -1;
    }
  }
  return out;
}

ActionVector canonical_action(const std::vector<int>& disp) {
  ActionVector a(2 * disp.size(), 0);
  for (std::size_t i = 0; i < disp.size(); ++i) {
    if (disp[i] > 0) {
      a[2 * i] = 1;
    } else if (disp[i] < 0) {
      a[2 * i + 1] = 1;
    }
  }
  return a;
}

}  // namespace brave
