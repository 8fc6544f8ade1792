#include "brave/value_model.hpp"

#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace brave {

double ModelOutput::masked_vmax() const {
  double best = std::numeric_limits<double>::lowest();
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (mask[j] && v[j] > best) best = v[j];
  }
  return best;
}

int ModelOutput::masked_argmax() const {
  int arg = -1;
  double best = std::numeric_limits<double>::lowest();
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (mask[j] && v[j] > best) {
      best = v[j];
      arg = static_cast<int>(j);
    }
  }
  return arg;
}

std::vector<double> normalize_state(const GridState& s, int grid_size) {
  std::vector<double> x(s.size());
  const double denom = grid_size > 1 ? static_cast<double>(grid_size - 1) : 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    x[i] = static_cast<double>(s[i]) / denom;
  }
  return x;
}

ValueModel::ValueModel(const ModelConfig& cfg)
    : cfg_(cfg), net_(cfg.input_dim(), cfg.hidden_sizes, cfg.output_dim(), cfg.seed) {
  if (cfg_.m_max < 1) throw ConfigError("m_max must be positive");
  if (cfg_.state_dim < 1 || cfg_.action_dim < 1) {
    throw ConfigError("state_dim and action_dim must be positive");
  }
}

std::vector<double> ValueModel::make_input(const std::vector<double>& state_features,
                                           const ActionVector& action) const {
  if (static_cast<int>(state_features.size()) != cfg_.state_dim) {
    throw std::invalid_argument("state feature dimension mismatch");
  }
  if (static_cast<int>(action.size()) != cfg_.action_dim) {
    throw std::invalid_argument("action dimension mismatch");
  }
  std::vector<double> input;
  input.reserve(static_cast<std::size_t>(cfg_.input_dim()));
  input.insert(input.end(), state_features.begin(), state_features.end());
  for (int a : action) input.push_back(static_cast<double>(a));
  return input;
}

namespace {

ModelOutput split_output(const std::vector<double>& raw,
                         const std::vector<std::uint8_t>& mask, int m_max) {
  if (static_cast<int>(mask.size()) != m_max) {
    throw std::invalid_argument("mask length must be m_max");
  }
  ModelOutput out;
  out.q = raw[0];
  out.v.assign(raw.begin() + 1, raw.end());
  out.mask = mask;
  return out;
}

}  // namespace

ModelOutput ValueModel::forward(const std::vector<double>& state_features,
                                const ActionVector& action,
                                const std::vector<std::uint8_t>& mask) const {
  return split_output(net_.run(make_input(state_features, action)), mask, cfg_.m_max);
}

ModelOutput ValueModel::forward_target(const std::vector<double>& state_features,
                                       const ActionVector& action,
                                       const std::vector<std::uint8_t>& mask) const {
  return split_output(net_.run_target(make_input(state_features, action)), mask,
                      cfg_.m_max);
}

double ValueModel::apply_step(const std::vector<double>& grad, double scale,
                              long step_index) {
  return net_.adam_step(grad, scale, cfg_.learning_rate, step_index);
}

namespace {

constexpr char kMagic[4] = {'B', 'R', 'V', 'M'};
constexpr std::uint16_t kVersion = 1;

}  // namespace

void ValueModel::save(const std::string& path) const {
  nlohmann::json j;
  j["state_dim"] = cfg_.state_dim;
  j["action_dim"] = cfg_.action_dim;
  j["hidden_sizes"] = cfg_.hidden_sizes;
  j["m_max"] = cfg_.m_max;
  j["learning_rate"] = cfg_.learning_rate;
  j["seed"] = cfg_.seed;
  const std::string cfg_json = j.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out.write(kMagic, 4);
  const std::uint16_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const std::uint32_t len = static_cast<std::uint32_t>(cfg_json.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(cfg_json.data(), static_cast<std::streamsize>(cfg_json.size()));
  const std::uint64_t n = net_.num_parameters();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(net_.parameters().data()),
            static_cast<std::streamsize>(n * sizeof(double)));
  if (!out) throw FormatError("write failed: " + path);
}

ValueModel ValueModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("bad magic header");
  }
  std::uint16_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || version != kVersion) {
    throw FormatError("unsupported checkpoint version");
  }
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in) throw FormatError("truncated checkpoint");
  std::string cfg_json(len, '\0');
  in.read(cfg_json.data(), static_cast<std::streamsize>(len));
  if (!in) throw FormatError("truncated checkpoint");

  ModelConfig cfg;
  try {
    const nlohmann::json j = nlohmann::json::parse(cfg_json);
    cfg.state_dim = j.at("state_dim").get<int>();
    cfg.action_dim = j.at("action_dim").get<int>();
    cfg.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
    cfg.m_max = j.at("m_max").get<int>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid checkpoint config: ") + e.what());
  }

  ValueModel model(cfg);
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n != model.num_parameters()) {
    throw FormatError("checkpoint parameter count mismatch");
  }
  in.read(reinterpret_cast<char*>(model.parameters().data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw FormatError("truncated checkpoint");
  model.sync_target();
  return model;
}

}  // namespace brave
