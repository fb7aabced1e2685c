#include "ebm/experiments/config.hpp"

#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace ebm::experiments {

namespace {

using json = nlohmann::json;

template <typename T>
std::function<void(const json&)> bind(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

}  // namespace

std::string to_string(MicroKind kind) { return kind == MicroKind::euler ? "euler" : "adaptive"; }
std::string to_string(MacroForcing forcing) { return forcing == MacroForcing::constant ? "constant" : "variable"; }

MicroKind parse_micro_kind(const std::string& s) {
  if (s == "euler") return MicroKind::euler;
  if (s == "adaptive") return MicroKind::adaptive;
  throw ConfigError("unknown micro integrator '" + s + "' (expected euler or adaptive)");
}

MacroForcing parse_macro_forcing(const std::string& s) {
  if (s == "constant") return MacroForcing::constant;
  if (s == "variable") return MacroForcing::variable;
  throw ConfigError("unknown macro forcing '" + s + "' (expected constant or variable)");
}

void apply_json(ExperimentConfig& cfg, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a flat JSON object");

  auto& p = cfg.params;
  auto& f = cfg.forcing;
  std::map<std::string, std::function<void(const json&)>> setters{
      {"C1", bind(p.C1)}, {"C2", bind(p.C2)}, {"C3", bind(p.C3)}, {"T_s", bind(p.T_s)},
      {"eps1", bind(p.eps1)}, {"T_eps", bind(p.T_eps)}, {"alpha_max", bind(p.alpha_max)},
      {"alpha1", bind(p.alpha1)}, {"alpha2", bind(p.alpha2)}, {"alpha3", bind(p.alpha3)},
      {"alpha4", bind(p.alpha4)}, {"alpha_min", bind(p.alpha_min)}, {"k_diff", bind(p.k_diff)},
      {"Q1", bind(p.Q1)}, {"Q2", bind(p.Q2)},
      {"q1", bind(f.q1)}, {"a1", bind(f.a1)}, {"b1", bind(f.b1)},
      {"q2", bind(f.q2)}, {"a2", bind(f.a2)}, {"b2", bind(f.b2)},
      {"q3", bind(f.q3)}, {"a3", bind(f.a3)}, {"b3", bind(f.b3)}, {"q4", bind(f.q4)},
      {"include_random", bind(f.include_random)}, {"seed", bind(f.seed)},
      {"I", bind(cfg.I)}, {"T0", bind(cfg.T0)}, {"t_end", bind(cfg.t_end)},
      {"micro_step", bind(cfg.micro_step)}, {"macro_step", bind(cfg.macro_step)},
      {"rel_tol", bind(cfg.rel_tol)}, {"abs_tol", bind(cfg.abs_tol)},
      {"max_step", bind(cfg.max_step)}, {"initial_step", bind(cfg.initial_step)},
      {"error_target", bind(cfg.error_target)},
      {"N", bind(cfg.N)}, {"max_iterations", bind(cfg.max_iterations)}, {"workers", bind(cfg.workers)},
      {"micro", [&](const json& v) { cfg.micro = parse_micro_kind(v.get<std::string>()); }},
      {"macro_forcing", [&](const json& v) { cfg.macro_forcing = parse_macro_forcing(v.get<std::string>()); }},
      {"stop_tol",
       [&](const json& v) {
         if (v.is_null()) cfg.stop_tol.reset();
         else if (v.is_string() && v.get<std::string>() == "inf") cfg.stop_tol = std::numeric_limits<double>::infinity();
         else cfg.stop_tol = v.get<double>();
       }},
      {"fluctuation_file", [&](const json& v) { cfg.fluctuation_file = v.get<std::string>(); }},
  };
  for (const auto& [key, value] : doc.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig cfg;
  apply_json(cfg, buffer.str());
  return cfg;
}

ode::IntegratorSpec ExperimentConfig::micro_spec() const {
  if (micro == MicroKind::euler) return ode::IntegratorSpec::euler(micro_step);
  auto s = ode::IntegratorSpec::adaptive(rel_tol, abs_tol, /*bandwidth=*/1);
  if (max_step > 0.0) s.max_step = max_step;
  s.initial_step = initial_step;
  s.error_target = error_target;
  return s;
}

ode::IntegratorSpec ExperimentConfig::macro_spec() const { return ode::IntegratorSpec::euler(macro_step); }

parareal::PararealConfig ExperimentConfig::parareal_config() const {
  parareal::PararealConfig c;
  c.N = N;
  c.t_end = t_end;
  c.T0 = T0;
  c.micro_spec = micro_spec();
  c.macro_spec = macro_spec();
  c.macro_forcing = macro_forcing;
  c.max_iterations = max_iterations;
  c.stop_tol = stop_tol;
  c.workers = workers;
  return c;
}

void ExperimentConfig::finalize() {
  try {
    if (I < 2) throw ConfigError("I must be at least 2");
    if (!(t_end >= 1.0) || t_end != static_cast<double>(static_cast<int>(t_end)))
      throw ConfigError("t_end must be a positive integer number of years");
    forcing.t_end = static_cast<int>(t_end);
    if (fluctuation_file) {
      forcing.fluctuations = read_fluctuations(*fluctuation_file);
    } else {
      forcing.fluctuations = generate_fluctuations(forcing.seed, forcing.t_end);
    }
    forcing.validate();
    if (!(micro_step > 0.0) || !(macro_step > 0.0)) throw ConfigError("time steps must be positive");
    if (max_step < 0.0) throw ConfigError("max_step must be non-negative");
    parareal_config().validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace ebm::experiments
