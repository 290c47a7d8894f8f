#include "udn/config.hpp"

#include <fstream>
#include <sstream>

namespace udn {

using nlohmann::json;

namespace {

const char* const kSweepKeys[] = {"K", "g", "h", "mu", "sigma2", "N"};

json parse_scalar_or_string(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (!v.is_discarded()) return v;
  return text;
}

template <typename T>
T get(const json& obj, const std::string& parent, const char* key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + parent + key + "' has the wrong type");
  }
}

std::vector<double> drift_list(const json& net, const char* key, int relays, double fallback) {
  const json& v = net.at(key);
  if (v.is_null()) return std::vector<double>(static_cast<std::size_t>(std::max(relays, 0)), fallback);
  auto list = get<std::vector<double>>(net, "network.", key);
  if (static_cast<int>(list.size()) != relays) {
    throw UsageError("config key 'network." + std::string(key) + "' has " +
                     std::to_string(list.size()) + " entries, K=" + std::to_string(relays));
  }
  return list;
}

}  // namespace

json default_config_json() {
  return json{
      {"network",
       {{"K", 2},
        {"g", 1.0},
        {"h", 1.0},
        {"mu", 1.0},
        {"mu1", nullptr},
        {"mu2", nullptr},
        {"sigma2", 0.0},
        {"law", "three_point"},
        {"N", 256},
        {"Nprime", 4096},
        {"P1", 1.0},
        {"P2", 1.0},
        {"nu", 0.0},
        {"beta", 0.0},
        {"interleaver_depth", 3},
        {"noise", true},
        {"noise_variance_scale", 1.0},
        {"decomposition", true}}},
      {"codebook", {{"M", 0}, {"rate_fraction", 0.8}, {"seed", 7}, {"path", nullptr}}},
      {"trials", 1000},
      {"seed", 1},
      {"auto_powers", true},
      {"margins", "desk"},
      {"margin_scale", 4.0},
      {"threads", 0},
      {"max_memory_gib", 4.0},
      {"sweep",
       {{"K", json::array()},
        {"g", json::array()},
        {"h", json::array()},
        {"mu", json::array()},
        {"sigma2", json::array()},
        {"N", json::array()}}},
  };
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw UsageError("config file " + path.string() + " is not valid JSON");
  if (!j.is_object()) throw UsageError("config file " + path.string() + " must hold a JSON object");
  return j;
}

namespace {

void merge_at(json& base, const json& overlay, const std::string& prefix) {
  for (const auto& [key, value] : overlay.items()) {
    if (!base.contains(key)) throw UsageError("unknown config key '" + prefix + key + "'");
    json& slot = base[key];
    if (slot.is_object()) {
      if (!value.is_object()) throw UsageError("config key '" + prefix + key + "' must be an object");
      merge_at(slot, value, prefix + key + ".");
    } else {
      slot = value;
    }
  }
}

}  // namespace

void merge_config(json& base, const json& overlay) {
  if (!overlay.is_object()) throw UsageError("configuration must be a JSON object");
  merge_at(base, overlay, "");
}

void apply_override(json& config, const std::string& key, const std::string& value) {
  json* node = &config;
  std::string path;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    path += (path.empty() ? "" : ".") + part;
    if (!node->is_object() || !node->contains(part)) {
      throw UsageError("unknown config key '" + path + "'");
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) throw UsageError("config key '" + key + "' is a section, not a value");

  json parsed = parse_scalar_or_string(value);
  if (parsed.is_string() && value.find(',') != std::string::npos) {
    parsed = json::array();
    std::istringstream is(value);
    std::string item;
    while (std::getline(is, item, ',')) parsed.push_back(parse_scalar_or_string(item));
  } else if (node->is_array() && !parsed.is_array()) {
    parsed = json::array({parsed});
  }
  *node = std::move(parsed);
}

RunConfig parse_config(const json& config) {
  json merged = default_config_json();
  merge_config(merged, config);

  RunConfig rc;
  ExperimentSpec& spec = rc.spec;
  NetworkConfig& cfg = spec.network;
  const json& net = merged.at("network");
  const std::string np = "network.";

  cfg.relays = get<int>(net, np, "K");
  cfg.g = get<double>(net, np, "g");
  cfg.h = get<double>(net, np, "h");
  const double mu = get<double>(net, np, "mu");
  cfg.mu_first = drift_list(net, "mu1", cfg.relays, mu);
  cfg.mu_second = drift_list(net, "mu2", cfg.relays, mu);
  cfg.sigma2 = get<double>(net, np, "sigma2");
  try {
    cfg.law = parse_state_law(get<std::string>(net, np, "law"));
  } catch (const ConfigError& e) {
    throw UsageError(std::string("config key 'network.law': ") + e.what());
  }
  cfg.outer_length = get<Index>(net, np, "N");
  cfg.repetitions = get<Index>(net, np, "Nprime");
  cfg.source_power = get<double>(net, np, "P1");
  if (net.at("P2").is_array()) {
    cfg.relay_power = get<std::vector<double>>(net, np, "P2");
  } else {
    cfg.relay_power.assign(static_cast<std::size_t>(std::max(cfg.relays, 0)),
                           get<double>(net, np, "P2"));
  }
  cfg.margins = {get<double>(net, np, "nu"), get<double>(net, np, "beta")};
  cfg.interleaver_depth = get<Index>(net, np, "interleaver_depth");
  cfg.noise = get<bool>(net, np, "noise");
  cfg.noise_variance_scale = get<double>(net, np, "noise_variance_scale");
  cfg.decomposition = get<bool>(net, np, "decomposition");
  cfg.seed = get<std::uint64_t>(merged, "", "seed");

  const json& cb = merged.at("codebook");
  spec.codebook.messages = get<std::uint64_t>(cb, "codebook.", "M");
  spec.codebook.rate_fraction = get<double>(cb, "codebook.", "rate_fraction");
  spec.codebook.seed = get<std::uint64_t>(cb, "codebook.", "seed");
  if (!cb.at("path").is_null()) spec.codebook.path = get<std::string>(cb, "codebook.", "path");

  spec.trials = get<Index>(merged, "", "trials");
  spec.auto_powers = get<bool>(merged, "", "auto_powers");
  try {
    spec.margin_preset = parse_margin_preset(get<std::string>(merged, "", "margins"));
  } catch (const ConfigError& e) {
    throw UsageError(std::string("config key 'margins': ") + e.what());
  }
  spec.margin_scale = get<double>(merged, "", "margin_scale");
  spec.threads = get<unsigned>(merged, "", "threads");
  spec.max_memory_bytes = get<double>(merged, "", "max_memory_gib") * 1024.0 * 1024.0 * 1024.0;

  const json& sw = merged.at("sweep");
  bool any = false;
  for (const char* k : kSweepKeys) any = any || !sw.at(k).empty();
  if (any) {
    SweepGrid grid;
    const std::string sp = "sweep.";
    grid.relays = get<std::vector<int>>(sw, sp, "K");
    grid.g = get<std::vector<double>>(sw, sp, "g");
    grid.h = get<std::vector<double>>(sw, sp, "h");
    grid.mu = get<std::vector<double>>(sw, sp, "mu");
    grid.sigma2 = get<std::vector<double>>(sw, sp, "sigma2");
    grid.outer_length = get<std::vector<Index>>(sw, sp, "N");
    // Dimensions left empty stay at the base network's value.
    if (grid.relays.empty()) grid.relays = {cfg.relays};
    if (grid.g.empty()) grid.g = {cfg.g};
    if (grid.h.empty()) grid.h = {cfg.h};
    if (grid.mu.empty()) grid.mu = {mu};
    if (grid.sigma2.empty()) grid.sigma2 = {cfg.sigma2};
    if (grid.outer_length.empty()) grid.outer_length = {cfg.outer_length};
    rc.grid = std::move(grid);
  }
  return rc;
}

}  // namespace udn
