#include "config.hpp"

#include <fstream>
#include <sstream>

#include "faota/errors.hpp"

namespace faota::cli {
namespace {

using ordered = nlohmann::ordered_json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

bool is_integer(const nlohmann::json& v) {
  return v.is_number_integer() || v.is_number_unsigned();
}

void check_type(const ordered& def, const nlohmann::json& value, const std::string& key) {
  if (def.is_null()) return;  // optional key; the typed accessor validates it
  bool ok = true;
  const char* want = "";
  if (is_integer(def)) {
    ok = is_integer(value) && value.get<long long>() >= 0;
    want = "a nonnegative integer";
  } else if (def.is_number()) {
    ok = value.is_number();
    want = "a number";
  } else if (def.is_string()) {
    ok = value.is_string();
    want = "a string";
  } else if (def.is_boolean()) {
    ok = value.is_boolean();
    want = "true or false";
  } else if (def.is_array()) {
    ok = value.is_array();
    want = "an array";
  } else if (def.is_object()) {
    ok = value.is_object();
    want = "an object";
  }
  if (!ok) throw ConfigError("config key '" + key + "' must be " + want + ", got " + value.dump());
}

// Keys that give the same quantity in two units. Setting one clears the other,
// so a later layer always wins regardless of which unit each layer used.
std::string unit_twin(const std::string& dotted) {
  if (dotted == "system.p_max") return "p_max_dbm";
  if (dotted == "system.p_max_dbm") return "p_max";
  if (dotted == "system.sigma2") return "sigma2_dbm";
  if (dotted == "system.sigma2_dbm") return "sigma2";
  return {};
}

void merge_into(ordered& target, const ordered& defaults, const nlohmann::json& overlay,
                const std::string& prefix) {
  for (const auto& [key, value] : overlay.items()) {
    const auto dotted = join(prefix, key);
    const auto twin = unit_twin(dotted);
    if (!twin.empty() && overlay.contains(twin) && !value.is_null() && !overlay[twin].is_null()) {
      throw ConfigError("config keys '" + dotted + "' and '" + join(prefix, twin) +
                        "' give the same quantity; set only one");
    }
  }
  for (const auto& [key, value] : overlay.items()) {
    const auto dotted = join(prefix, key);
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + dotted + "'");
    const auto& def = defaults.at(key);
    check_type(def, value, dotted);
    if (def.is_object()) {
      merge_into(target[key], def, value, dotted);
    } else {
      target[key] = value;
      if (const auto twin = unit_twin(dotted); !twin.empty() && !value.is_null()) {
        target[twin] = nullptr;
      }
    }
  }
}

template <class T>
T get_as(const ordered& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type: " + v.dump());
  }
}

std::size_t positive(const ordered& v, const std::string& key) {
  const auto n = get_as<long long>(v, key);
  if (n < 1) throw ConfigError("config key '" + key + "' must be >= 1");
  return static_cast<std::size_t>(n);
}

double positive_real(const ordered& v, const std::string& key) {
  const auto x = get_as<double>(v, key);
  if (!(x > 0.0)) throw ConfigError("config key '" + key + "' must be > 0");
  return x;
}

template <class Fn>
auto rethrow_domain(const std::string& key, Fn fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

}  // namespace

nlohmann::ordered_json default_config() {
  return ordered::parse(R"({
    "system": {
      "K": 20, "N": 10, "S": 15, "W": 0.5, "beta": 2.0,
      "p_max_dbm": 10.0, "p_max": null,
      "sigma2_dbm": 0.0, "sigma2": null,
      "tau": 0.05, "d": null
    },
    "mc": {
      "trials": 10000, "seed": 1, "threads": 1,
      "tau_grid": null, "n_grid": null,
      "variants": ["independent", "clayton:1", "clayton:2", "fpa"]
    },
    "fl": {
      "clients": 10, "rounds": 30, "lr": 0.01, "batch": 32, "local_steps": 1,
      "hidden": [32], "optimizer": "adam", "seed": 1, "seeds": null,
      "variants": ["ideal", "independent", "clayton:1", "clayton:2", "fpa"],
      "data": {
        "source": "synthetic", "images": null, "labels": null, "fallback": false,
        "train_fraction": 0.9, "classes": 10, "dims": 20, "samples": 3000,
        "separation": 2.5, "seed": 1
      }
    },
    "bound": {
      "lr": null, "mu": 1.0, "L": 1.0, "kappa": 1.0, "sigma_g2": 1.0,
      "batch": 32, "K": null, "F1_gap": 1.0,
      "schedule": null, "records": null, "constant": null, "T": 100
    },
    "output": { "dir": "results" }
  })");
}

Config::Config() : tree_(default_config()) {}

void Config::merge(const nlohmann::json& overlay, const std::string& origin) {
  if (!overlay.is_object()) throw ConfigError(origin + ": top level must be a JSON object");
  const auto defaults = default_config();
  merge_into(tree_, defaults, overlay, "");
}

void Config::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("system") || !j["system"].is_object() ||
      !j["system"].contains("tau")) {
    throw ConfigError("config file " + path.string() + " is missing required key 'tau' (system.tau)");
  }
  merge(j, path.string());
}

void Config::set(const std::string& key, const nlohmann::json& value) {
  nlohmann::json overlay = value;
  std::string rest = key;
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while ((pos = rest.find('.')) != std::string::npos) {
    parts.push_back(rest.substr(0, pos));
    rest = rest.substr(pos + 1);
  }
  parts.push_back(rest);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (it->empty()) throw ConfigError("malformed config key '" + key + "'");
    overlay = nlohmann::json{{*it, overlay}};
  }
  merge(overlay, "--set " + key);
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  }
  const auto key = assignment.substr(0, eq);
  const auto text = assignment.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }
  set(key, value);
}

const nlohmann::ordered_json& Config::at(const std::string& dotted) const {
  const ordered* node = &tree_;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      throw ConfigError("unknown config key '" + dotted + "'");
    }
    node = &node->at(part);
  }
  return *node;
}

namespace {

double power_watts(const Config& c, const std::string& linear_key) {
  const auto& linear = c.at(linear_key);
  if (!linear.is_null()) return positive_real(linear, linear_key);
  const auto dbm_key = linear_key + "_dbm";
  const auto& dbm = c.at(dbm_key);
  if (dbm.is_null()) throw ConfigError("config needs '" + linear_key + "' or '" + dbm_key + "'");
  return dbm_to_watts(get_as<double>(dbm, dbm_key));
}

}  // namespace

double Config::p_max_watts() const { return power_watts(*this, "system.p_max"); }

double Config::sigma2_watts() const { return power_watts(*this, "system.sigma2"); }

DependenceSpec parse_variant(const std::string& name, double default_beta) {
  if (name == "clayton") return Clayton{default_beta};
  return parse_dependence(name);
}

std::vector<DependenceSpec> Config::mc_variants() const {
  const auto& list = at("mc.variants");
  if (!list.is_array() || list.empty()) throw ConfigError("config key 'mc.variants' must be a nonempty array");
  const double beta = positive_real(at("system.beta"), "system.beta");
  std::vector<DependenceSpec> out;
  for (const auto& v : list) {
    const auto name = get_as<std::string>(v, "mc.variants");
    out.push_back(rethrow_domain("mc.variants", [&] { return parse_variant(name, beta); }));
  }
  return out;
}

McPlan Config::mc_plan() const {
  McPlan plan;
  plan.trials = positive(at("mc.trials"), "mc.trials");
  plan.seed = get_as<std::uint64_t>(at("mc.seed"), "mc.seed");
  plan.threads = static_cast<unsigned>(get_as<long long>(at("mc.threads"), "mc.threads"));
  plan.users = positive(at("system.K"), "system.K");
  plan.ports = positive(at("system.N"), "system.N");
  plan.selected = positive(at("system.S"), "system.S");
  if (plan.selected > plan.users) throw ConfigError("config key 'system.S' must not exceed system.K");
  plan.p_max = p_max_watts();
  plan.sigma2 = sigma2_watts();
  plan.tau = positive_real(at("system.tau"), "system.tau");
  plan.jakes_aperture = get_as<double>(at("system.W"), "system.W");
  if (!(plan.jakes_aperture >= 0.0)) throw ConfigError("config key 'system.W' must be >= 0");
  if (const auto& g = at("mc.tau_grid"); !g.is_null()) {
    plan.tau_grid = get_as<std::vector<double>>(g, "mc.tau_grid");
  }
  if (const auto& g = at("mc.n_grid"); !g.is_null()) {
    plan.port_grid = get_as<std::vector<std::size_t>>(g, "mc.n_grid");
    for (auto n : plan.port_grid) {
      if (n < 1) throw ConfigError("config key 'mc.n_grid' values must be >= 1");
    }
  }
  plan.variants = mc_variants();
  rethrow_domain("mc", [&] {
    plan.validate();
    return 0;
  });
  return plan;
}

std::vector<std::string> Config::fl_variants() const {
  const auto& list = at("fl.variants");
  if (!list.is_array() || list.empty()) throw ConfigError("config key 'fl.variants' must be a nonempty array");
  const double beta = positive_real(at("system.beta"), "system.beta");
  std::vector<std::string> out;
  for (const auto& v : list) {
    const auto name = get_as<std::string>(v, "fl.variants");
    if (name != "ideal") rethrow_domain("fl.variants", [&] { return parse_variant(name, beta); });
    out.push_back(name);
  }
  return out;
}

FlConfig Config::fl_config() const {
  FlConfig fl;
  fl.clients = positive(at("fl.clients"), "fl.clients");
  fl.rounds = positive(at("fl.rounds"), "fl.rounds");
  fl.learning_rate = get_as<double>(at("fl.lr"), "fl.lr");
  fl.batch_size = positive(at("fl.batch"), "fl.batch");
  fl.local_steps = positive(at("fl.local_steps"), "fl.local_steps");
  fl.hidden = get_as<std::vector<std::size_t>>(at("fl.hidden"), "fl.hidden");
  const auto opt = get_as<std::string>(at("fl.optimizer"), "fl.optimizer");
  if (opt == "adam") {
    fl.optimizer = LocalOptimizer::Adam;
  } else if (opt == "sgd") {
    fl.optimizer = LocalOptimizer::Sgd;
  } else {
    throw ConfigError("config key 'fl.optimizer' must be \"adam\" or \"sgd\"");
  }
  fl.seed = get_as<std::uint64_t>(at("fl.seed"), "fl.seed");
  rethrow_domain("fl", [&] {
    fl.validate();
    return 0;
  });
  return fl;
}

std::vector<std::uint64_t> Config::fl_seeds() const {
  const auto& s = at("fl.seeds");
  if (s.is_null()) return {get_as<std::uint64_t>(at("fl.seed"), "fl.seed")};
  auto seeds = get_as<std::vector<std::uint64_t>>(s, "fl.seeds");
  if (seeds.empty()) throw ConfigError("config key 'fl.seeds' must not be empty");
  return seeds;
}

OtaConfig Config::ota_config() const {
  OtaConfig o;
  o.p_max = p_max_watts();
  o.sigma2 = sigma2_watts();
  o.tau = positive_real(at("system.tau"), "system.tau");
  o.dimension = 1;  // replaced by the model size during training
  return o;
}

std::filesystem::path Config::output_dir() const {
  const auto dir = get_as<std::string>(at("output.dir"), "output.dir");
  if (dir.empty()) throw ConfigError("config key 'output.dir' must not be empty");
  return dir;
}

}  // namespace faota::cli
