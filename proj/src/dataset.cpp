#include "brave/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>

#include "brave/rng.hpp"

namespace brave {

namespace {

constexpr std::size_t kMaxFieldStates = 4'000'000;
constexpr double kMaxFieldOps = 4e9;

int chebyshev(const GridState& a, const GridState& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

}  // namespace

ShortestPathPlanner::ShortestPathPlanner(const EnvConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  if (cfg_.pits.empty()) {
    chebyshev_ = true;
    return;
  }
  disps_ = all_displacements(cfg_.dims);
  const std::size_t n = state_count(cfg_);
  if (n > kMaxFieldStates ||
      static_cast<double>(n) * static_cast<double>(disps_.size()) > kMaxFieldOps) {
    throw PlanningError("state space too large for exact planning with pits");
  }
  dist_.assign(n, -1);
  std::deque<std::size_t> queue;
  const std::size_t goal_idx = state_index(cfg_, cfg_.goal);
  dist_[goal_idx] = 0;
  queue.push_back(goal_idx);
  GridState next(cfg_.dims);
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const GridState s = state_from_index(cfg_, cur);
    const int d = dist_[cur];
    for (const std::vector<int>& disp : disps_) {
      bool ok = true;
      for (int i = 0; i < cfg_.dims; ++i) {
        next[i] = s[i] + disp[i];
        if (next[i] < 0 || next[i] >= cfg_.size) {
          ok = false;
          break;
        }
      }
      if (!ok || is_pit(cfg_, next)) continue;
      const std::size_t ni = state_index(cfg_, next);
      if (dist_[ni] < 0) {
        dist_[ni] = d + 1;
        queue.push_back(ni);
      }
    }
  }
}

int ShortestPathPlanner::distance_to_goal(const GridState& s) const {
  if (!in_bounds(cfg_, s)) throw PlanningError("state out of bounds");
  if (chebyshev_) return chebyshev(s, cfg_.goal);
  if (is_pit(cfg_, s)) return -1;
  return dist_[state_index(cfg_, s)];
}

ActionVector ShortestPathPlanner::optimal_action(const GridState& s) const {
  const int d = distance_to_goal(s);
  if (d == 0) throw PlanningError("already at goal");
  if (d < 0) throw PlanningError("no path to goal");

  if (chebyshev_) {
    // One axis at a time: the per-axis candidates are independent, so the
    // lexicographically smallest optimal action picks the smallest
    // primitive pair per axis. Pair order: (0,0) < (0,1) < (1,0).
    ActionVector a(2 * cfg_.dims, 0);
    for (int i = 0; i < cfg_.dims; ++i) {
      const int here = s[i];
      auto feasible = [&](int delta) {
        const int t = here + delta;
        return t >= 0 && t < cfg_.size && std::abs(t - cfg_.goal[i]) <= d - 1;
      };
      if (feasible(0)) continue;
      if (feasible(-1)) {
        a[2 * i + 1] = 1;
      } else {
        a[2 * i] = 1;
      }
    }
    return a;
  }

  bool found = false;
  ActionVector best;
  GridState next(cfg_.dims);
  const std::vector<std::vector<int>> disps = all_displacements(cfg_.dims);
  for (const std::vector<int>& disp : disps) {
    bool ok = true;
    for (int i = 0; i < cfg_.dims; ++i) {
      next[i] = s[i] + disp[i];
      if (next[i] < 0 || next[i] >= cfg_.size) {
        ok = false;
        break;
      }
    }
    if (!ok || is_pit(cfg_, next)) continue;
    if (dist_[state_index(cfg_, next)] != d - 1) continue;
    ActionVector a = canonical_action(disp);
    if (!found || a < best) {
      best = std::move(a);
      found = true;
    }
  }
  if (!found) throw PlanningError("no optimal move found");
  return best;
}

ActionVector astar_optimal_action(const EnvConfig& cfg, const GridState& state) {
  return ShortestPathPlanner(cfg).optimal_action(state);
}

bool is_valid_action(const EnvConfig& cfg, const GridState& s,
                     const ActionVector& a) {
  const std::vector<int> disp = displacement(a, cfg.dims);
  for (int i = 0; i < cfg.dims; ++i) {
    const int t = s[i] + disp[i];
    if (t < 0 || t >= cfg.size) return false;
  }
  return true;
}

namespace {

// Allowed primitive pairs for one axis, in ascending (hi, lo) order.
// Encodes pair p as 2*plus + minus.
inline int axis_pair_options(const EnvConfig& cfg, int coord, int out[4]) {
  int n = 0;
  for (int plus = 0; plus <= 1; ++plus) {
    for (int minus = 0; minus <= 1; ++minus) {
      const int t = coord + plus - minus;
      if (t >= 0 && t < cfg.size) out[n++] = 2 * plus + minus;
    }
  }
  return n;
}

}  // namespace

std::uint64_t valid_action_count(const EnvConfig& cfg, const GridState& s) {
  std::uint64_t count = 1;
  int opts[4];
  for (int i = 0; i < cfg.dims; ++i) {
    count *= static_cast<std::uint64_t>(axis_pair_options(cfg, s[i], opts));
  }
  return count;
}

ActionVector sample_valid_action(const EnvConfig& cfg, const GridState& s,
                                 std::mt19937_64& rng) {
  // The valid set is a per-axis product, so a uniform draw factorizes into
  // independent per-axis draws.
  ActionVector a(2 * cfg.dims, 0);
  int opts[4];
  for (int i = 0; i < cfg.dims; ++i) {
    const int n = axis_pair_options(cfg, s[i], opts);
    const int pick = opts[rng_below(rng, static_cast<std::uint64_t>(n))];
    a[2 * i] = pick >> 1;
    a[2 * i + 1] = pick & 1;
  }
  return a;
}

Dataset generate(const EnvConfig& cfg, int episodes, double p_opt,
                 std::uint64_t rng_seed) {
  if (episodes <= 0) throw ConfigError("episodes must be positive");
  if (p_opt < 0.0 || p_opt > 1.0) throw ConfigError("p_opt must lie in [0, 1]");
  validate(cfg);

  ShortestPathPlanner planner(cfg);
  Dataset ds;
  ds.env = cfg;

  std::uint64_t seed_stream = rng_seed;
  std::vector<std::uint64_t> episode_seeds(static_cast<std::size_t>(episodes));
  for (auto& s : episode_seeds) s = splitmix64(seed_stream);

  for (int e = 0; e < episodes; ++e) {
    std::mt19937_64 rng = make_rng(episode_seeds[static_cast<std::size_t>(e)]);
    const std::size_t begin = ds.transitions.size();
    GridState s = reset(cfg);
    auto choose = [&](const GridState& at) {
      if (rng_unit(rng) < p_opt) return planner.optimal_action(at);
      return sample_valid_action(cfg, at, rng);
    };
    ActionVector a = choose(s);
    for (int t = 0; t < cfg.horizon; ++t) {
      const StepOutcome out = step(cfg, s, a, t);
      Transition tr;
      tr.state = s;
      tr.action = a;
      tr.reward = out.reward;
      tr.next_state = out.next_state;
      tr.terminal = out.terminal;
      if (out.terminal) {
        tr.next_action.assign(static_cast<std::size_t>(cfg.action_dim()), 0);
        ds.transitions.push_back(std::move(tr));
        break;
      }
      ActionVector next_a = choose(out.next_state);
      tr.next_action = next_a;
      ds.transitions.push_back(std::move(tr));
      s = out.next_state;
      a = std::move(next_a);
    }
    ds.episodes.emplace_back(begin, ds.transitions.size());
  }
  return ds;
}

std::set<ActionVector> unique_actions(const Dataset& ds) {
  if (ds.transitions.empty()) throw ConfigError("dataset is empty");
  std::set<ActionVector> out;
  for (const Transition& tr : ds.transitions) out.insert(tr.action);
  return out;
}

namespace {

constexpr char kMagic[4] = {'B', 'R', 'V', 'E'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xFF));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::vector<std::uint8_t>& b, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_i32(std::vector<std::uint8_t>& b, std::int32_t v) {
  put_u32(b, static_cast<std::uint32_t>(v));
}

void put_f64(std::vector<std::uint8_t>& b, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(b, bits);
}

struct Reader {
  const std::vector<std::uint8_t>& b;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > b.size()) throw FormatError("truncated dataset file");
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  std::uint8_t u8() {
    need(1);
    return b[pos++];
  }
};

void put_vec(std::vector<std::uint8_t>& b, const std::vector<int>& v) {
  for (int x : v) put_i32(b, x);
}

std::vector<int> get_vec(Reader& r, int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = r.i32();
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize(const Dataset& ds) {
  std::vector<std::uint8_t> b;
  b.insert(b.end(), kMagic, kMagic + 4);
  put_u16(b, kVersion);
  const std::string env_json = env_to_json(ds.env);
  put_u32(b, static_cast<std::uint32_t>(env_json.size()));
  b.insert(b.end(), env_json.begin(), env_json.end());
  put_u64(b, ds.transitions.size());
  put_u64(b, ds.episodes.size());
  for (const Transition& tr : ds.transitions) {
    put_vec(b, tr.state);
    put_vec(b, tr.action);
    put_f64(b, tr.reward);
    put_vec(b, tr.next_state);
    put_vec(b, tr.next_action);
    b.push_back(tr.terminal ? 1 : 0);
  }
  for (const auto& [begin, end] : ds.episodes) {
    put_u64(b, begin);
    put_u64(b, end);
  }
  return b;
}

Dataset deserialize(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  r.need(4);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("bad magic header");
  }
  r.pos = 4;
  const std::uint16_t version = r.u16();
  if (version != kVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(version));
  }
  const std::uint32_t json_len = r.u32();
  r.need(json_len);
  const std::string env_json(bytes.begin() + static_cast<long>(r.pos),
                             bytes.begin() + static_cast<long>(r.pos + json_len));
  r.pos += json_len;

  Dataset ds;
  ds.env = env_from_json(env_json);
  const std::uint64_t n_tr = r.u64();
  const std::uint64_t n_ep = r.u64();
  const int d = ds.env.dims;
  ds.transitions.reserve(n_tr);
  for (std::uint64_t i = 0; i < n_tr; ++i) {
    Transition tr;
    tr.state = get_vec(r, d);
    tr.action = get_vec(r, 2 * d);
    tr.reward = r.f64();
    tr.next_state = get_vec(r, d);
    tr.next_action = get_vec(r, 2 * d);
    tr.terminal = r.u8() != 0;
    ds.transitions.push_back(std::move(tr));
  }
  ds.episodes.reserve(n_ep);
  for (std::uint64_t i = 0; i < n_ep; ++i) {
    const std::uint64_t begin = r.u64();
    const std::uint64_t end = r.u64();
    if (begin > end || end > ds.transitions.size()) {
      throw FormatError("corrupt episode ranges");
    }
    ds.episodes.emplace_back(begin, end);
  }
  if (r.pos != bytes.size()) throw FormatError("trailing bytes in dataset file");
  return ds;
}

void save(const Dataset& ds, const std::string& path) {
  const std::vector<std::uint8_t> bytes = serialize(ds);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path);
}

Dataset load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open for reading: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace brave
