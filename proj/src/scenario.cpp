#include "scenario.hpp"

#include <charconv>
#include <set>
#include <cmath>

#include "errors.hpp"

namespace bds::scenario {
namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::Config, key, std::string("missing key '") + key + "'");
  return *it;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw Error(ErrorKind::Config, key, "'" + key + "' must be a number");
  return v.get<double>();
}

long integer(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::fabs(d) < 9e15) return static_cast<long>(d);
  }
  throw Error(ErrorKind::Config, key, "'" + key + "' must be an integer");
}

}  // namespace

chain::TimeStep parse_time_step(const std::string& text) {
  if (text == "auto") return chain::TimeStep::automatic();
  const bool is_auto = text.rfind("auto:", 0) == 0;
  const std::string body = is_auto ? text.substr(5) : text;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || ptr != body.data() + body.size() || body.empty())
    throw Error(ErrorKind::Config, "t_S", "t_S must be a number or 'auto:theta', got '" + text + "'");
  if (is_auto) {
    if (!(value > 0.0 && value < 1.0)) throw Error(ErrorKind::Param, "theta", "theta must lie in (0,1)");
    return chain::TimeStep::automatic(value);
  }
  if (!(value > 0.0)) throw Error(ErrorKind::Param, "t_S", "t_S must be positive");
  return chain::TimeStep::explicit_value(value);
}

nlohmann::json time_step_json(const chain::TimeStep& step) {
  if (step.fixed) return *step.fixed;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, step.theta);
  return "auto:" + std::string(buf, res.ptr);
}

ScenarioConfig from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "config", "config must be a JSON object");
  static const std::set<std::string> known = {"family",         "params",       "N",   "set", "t_S",
                                              "lattice_cutoff", "epsilon_tail", "seed"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw Error(ErrorKind::Config, key, "unknown config key '" + key + "'");

  ScenarioConfig c;
  const json& fam = require(j, "family");
  if (!fam.is_string()) throw Error(ErrorKind::Config, "family", "'family' must be a string");
  c.family = fam.get<std::string>();
  if (auto it = j.find("params"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw Error(ErrorKind::Config, "params", "'params' must be an object");
    for (const auto& [key, value] : it->items()) {
      if (key == "N") {
        c.N = static_cast<int>(integer(value, "params.N"));
        continue;
      }
      c.params[key] = number(value, "params." + key);
    }
  }
  if (auto it = j.find("N"); it != j.end() && !it->is_null()) c.N = static_cast<int>(integer(*it, "N"));
  if (auto it = j.find("set"); it != j.end() && !it->is_null()) {
    const std::string s = it->is_string() ? it->get<std::string>() : "";
    if (s == "basic")
      c.set = catalog::SetTag::Basic;
    else if (s == "minus")
      c.set = catalog::SetTag::Minus;
    else
      throw Error(ErrorKind::Config, "set", "'set' must be \"basic\" or \"minus\"");
  }
  if (auto it = j.find("t_S"); it != j.end() && !it->is_null()) {
    if (it->is_number()) {
      const double t = it->get<double>();
      if (!(t > 0.0)) throw Error(ErrorKind::Param, "t_S", "t_S must be positive");
      c.step = chain::TimeStep::explicit_value(t);
    } else if (it->is_string()) {
      c.step = parse_time_step(it->get<std::string>());
    } else {
      throw Error(ErrorKind::Config, "t_S", "t_S must be a number or 'auto:theta'");
    }
  }
  if (auto it = j.find("lattice_cutoff"); it != j.end() && !it->is_null()) {
    c.lattice_cutoff = integer(*it, "lattice_cutoff");
    if (*c.lattice_cutoff < 1) throw Error(ErrorKind::Param, "lattice_cutoff", "lattice_cutoff must be positive");
  }
  if (auto it = j.find("epsilon_tail"); it != j.end() && !it->is_null()) {
    c.epsilon_tail = number(*it, "epsilon_tail");
    if (!(c.epsilon_tail > 0.0 && c.epsilon_tail < 1.0))
      throw Error(ErrorKind::Param, "epsilon_tail", "epsilon_tail must lie in (0,1)");
  }
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0))
      throw Error(ErrorKind::Config, "seed", "'seed' must be a nonnegative integer");
    c.seed = it->get<std::uint64_t>();
  }
  return c;
}

nlohmann::json to_json(const ScenarioConfig& c) {
  json j;
  j["family"] = c.family;
  j["params"] = json::object();
  for (const auto& [k, v] : c.params) j["params"][k] = v;
  j["N"] = c.N ? json(*c.N) : json(nullptr);
  j["set"] = c.set == catalog::SetTag::Basic ? "basic" : "minus";
  j["t_S"] = time_step_json(c.step);
  j["lattice_cutoff"] = c.lattice_cutoff ? json(*c.lattice_cutoff) : json(nullptr);
  j["epsilon_tail"] = c.epsilon_tail;
  j["seed"] = c.seed;
  return j;
}

catalog::ValidatedFamily family(const ScenarioConfig& config) {
  const auto id = catalog::family_from_name(config.family);
  if (!id) throw Error(ErrorKind::Param, "family", "unknown family '" + config.family + "'");
  catalog::FamilySpec spec;
  spec.id = *id;
  spec.params = config.params;
  spec.N = config.N;
  auto fam = catalog::validate(spec);
  if (config.set == catalog::SetTag::Minus && !fam.has_minus_set())
    throw Error(ErrorKind::InvolutionUndefined, "set",
                std::string(fam.info().display) + " has no second set of polynomials");
  return fam;
}

spectral::ChainOptions chain_options(const ScenarioConfig& config) {
  spectral::ChainOptions o;
  o.step = config.step;
  o.eps_tail = config.epsilon_tail;
  o.cutoff = config.lattice_cutoff;
  return o;
}

spectral::SpectralBasis solve(const ScenarioConfig& config) {
  const auto fam = family(config);
  if (fam.finite() && config.lattice_cutoff)
    throw Error(ErrorKind::Param, "lattice_cutoff", "lattice_cutoff applies to semi-infinite families only");
  const auto options = chain_options(config);
  return config.set == catalog::SetTag::Minus ? spectral::minus_chain_solver(fam, options)
                                              : spectral::solve(fam, options);
}

}  // namespace bds::scenario
