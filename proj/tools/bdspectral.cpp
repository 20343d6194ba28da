// Command-line front end over the C API.
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdspectral/bdspectral.h"

using nlohmann::json;

namespace {

struct ScenarioFlags {
  std::string config_path;
  std::optional<std::string> family;
  std::optional<int> N;
  std::optional<double> p, a, b, c, d, q;
  std::optional<std::string> set;
  std::optional<std::string> t_S;
  std::optional<long> lattice_cutoff;
  std::optional<double> epsilon_tail;
  std::optional<std::uint64_t> seed;
  std::string dump_config;
};

struct OutputFlags {
  std::string out;
  std::string sidecar;
};

// Failures that happen in the front end itself, outside the library.
struct CliError {
  int code;
  std::string kind;
  std::string subject;
  std::string message;
};

void print_error(const std::string& error_json) { std::cerr << error_json << "\n"; }

[[noreturn]] void fail(int code, std::string kind, std::string subject, std::string message) {
  throw CliError{code, std::move(kind), std::move(subject), std::move(message)};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(BDS_IO_ERROR, "IoError", path, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(BDS_IO_ERROR, "IoError", path, "cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) fail(BDS_IO_ERROR, "IoError", path, "failed writing '" + path + "'");
}

void add_scenario_flags(CLI::App* app, ScenarioFlags& f) {
  app->add_option("--config", f.config_path, "scenario JSON file; flags override its values");
  app->add_option("--family", f.family, "family name (see `list`)");
  app->add_option("--N", f.N, "lattice size of finite families");
  app->add_option("--p", f.p);
  app->add_option("--a", f.a);
  app->add_option("--b", f.b);
  app->add_option("--c", f.c);
  app->add_option("--d", f.d);
  app->add_option("--q", f.q);
  app->add_option("--set", f.set, "basic or minus");
  app->add_option("--t_S,--ts", f.t_S, "time step, a number or auto:theta");
  app->add_option("--lattice-cutoff", f.lattice_cutoff, "force the truncation point of semi-infinite lattices");
  app->add_option("--epsilon-tail", f.epsilon_tail, "stationary tail mass allowed past the cutoff");
  app->add_option("--seed", f.seed);
  app->add_option("--dump-config", f.dump_config, "write the normalised scenario JSON here");
}

void add_output_flags(CLI::App* app, OutputFlags& o) {
  app->add_option("--out,-o", o.out, "CSV output path (default stdout)");
  app->add_option("--sidecar", o.sidecar, "sidecar JSON path (default: next to --out, else stderr)");
}

// config file < BDSPECTRAL_SEED < flags
std::string scenario_json(const ScenarioFlags& f) {
  json j = json::object();
  if (!f.config_path.empty()) {
    try {
      j = json::parse(read_text(f.config_path));
    } catch (const json::parse_error& e) {
      fail(BDS_DOMAIN_ERROR, "ConfigError", f.config_path, e.what());
    }
    if (!j.is_object()) fail(BDS_DOMAIN_ERROR, "ConfigError", f.config_path, "config must be a JSON object");
  }
  if (const char* env = std::getenv("BDSPECTRAL_SEED")) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*env == '\0' || *end != '\0' || errno != 0 || *env == '-')
      fail(BDS_DOMAIN_ERROR, "ConfigError", "BDSPECTRAL_SEED", "BDSPECTRAL_SEED must be a nonnegative integer");
    j["seed"] = v;
  }
  if (f.family) j["family"] = *f.family;
  if (f.N) j["N"] = *f.N;
  if (!j.contains("params") || j["params"].is_null()) j["params"] = json::object();
  auto param = [&](const char* name, const std::optional<double>& v) {
    if (v) j["params"][name] = *v;
  };
  param("p", f.p);
  param("a", f.a);
  param("b", f.b);
  param("c", f.c);
  param("d", f.d);
  param("q", f.q);
  if (f.set) j["set"] = *f.set;
  if (f.t_S) {
    char* end = nullptr;
    const double v = std::strtod(f.t_S->c_str(), &end);
    if (!f.t_S->empty() && *end == '\0')
      j["t_S"] = v;
    else
      j["t_S"] = *f.t_S;
  }
  if (f.lattice_cutoff) j["lattice_cutoff"] = *f.lattice_cutoff;
  if (f.epsilon_tail) j["epsilon_tail"] = *f.epsilon_tail;
  if (f.seed) j["seed"] = *f.seed;
  return j.dump();
}

struct ScenarioDeleter {
  void operator()(bds_scenario* s) const { bds_scenario_destroy(s); }
};
struct ResultDeleter {
  void operator()(bds_result* r) const { bds_result_destroy(r); }
};
using ScenarioPtr = std::unique_ptr<bds_scenario, ScenarioDeleter>;
using ResultPtr = std::unique_ptr<bds_result, ResultDeleter>;

// Library failures carry their JSON in bds_last_error.
struct LibraryFailure {
  int code;
};

void check(bds_status status) {
  if (status != BDS_OK) throw LibraryFailure{static_cast<int>(status)};
}

ScenarioPtr open_scenario(const ScenarioFlags& f) {
  bds_scenario* raw = nullptr;
  check(bds_scenario_create(scenario_json(f).c_str(), &raw));
  ScenarioPtr s(raw);
  if (!f.dump_config.empty()) {
    char* text = nullptr;
    check(bds_scenario_config(s.get(), &text));
    const std::string copy = text;
    bds_free_string(text);
    write_text(f.dump_config, copy);
  }
  return s;
}

std::string sidecar_path(const OutputFlags& o) {
  if (!o.sidecar.empty()) return o.sidecar;
  if (o.out.empty()) return {};
  const auto slash = o.out.find_last_of('/');
  const auto dot = o.out.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return o.out.substr(0, dot) + ".json";
  return o.out + ".json";
}

void emit(const bds_result* r, const OutputFlags& o) {
  if (o.out.empty())
    std::cout << bds_result_csv(r);
  else
    write_text(o.out, bds_result_csv(r));
  const std::string side = sidecar_path(o);
  if (side.empty())
    std::cerr << bds_result_json(r);
  else
    write_text(side, bds_result_json(r));
}

template <typename Call>
void run_result(Call&& call, const OutputFlags& o) {
  bds_result* raw = nullptr;
  const bds_status status = call(&raw);
  ResultPtr r(raw);
  if (r) emit(r.get(), o);
  check(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact spectral solutions of birth and death chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bds_version());

  OutputFlags list_out;
  auto* list = app.add_subcommand("list", "families with parameters, lattice kind and branch count");
  add_output_flags(list, list_out);

  ScenarioFlags solve_flags;
  OutputFlags solve_out;
  auto* solve = app.add_subcommand("solve", "closed-form distributions and transition matrices");
  add_scenario_flags(solve, solve_flags);
  add_output_flags(solve, solve_out);
  solve->require_subcommand(1);
  std::string from = "delta:0";
  std::optional<long> steps;
  std::optional<double> time;
  auto* stationary = solve->add_subcommand("stationary", "stationary distribution")->fallthrough();
  auto* evolve = solve->add_subcommand("evolve", "distribution after --steps steps")->fallthrough();
  evolve->add_option("--steps", steps)->required();
  evolve->add_option("--from", from, "delta:Y, uniform or file:PATH");
  auto* transition =
      solve->add_subcommand("transition", "transition matrix after --steps steps or time --time")->fallthrough();
  auto* t_steps = transition->add_option("--steps", steps);
  auto* t_time = transition->add_option("--time", time);
  t_steps->excludes(t_time);
  auto* continuous = solve->add_subcommand("continuous", "continuous-time distribution at --time")->fallthrough();
  continuous->add_option("--time", time)->required();
  continuous->add_option("--from", from, "delta:Y, uniform or file:PATH");

  ScenarioFlags verify_flags;
  OutputFlags verify_out;
  double corrupt = 0.0;
  auto* verify = app.add_subcommand("verify", "invariant and oracle suites; exit 1 on failure");
  add_scenario_flags(verify, verify_flags);
  add_output_flags(verify, verify_out);
  verify->add_option("--corrupt-dn2", corrupt, "test hook: scale d_1^2 by this factor first")->group("");
  verify->require_subcommand(1);
  auto* fast = verify->add_subcommand("fast")->fallthrough();
  auto* full = verify->add_subcommand("full")->fallthrough();

  ScenarioFlags sim_flags;
  OutputFlags sim_out;
  long sim_start = 0, sim_steps = 25;
  std::uint64_t samples = 100000;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo walks compared with the closed form");
  add_scenario_flags(simulate, sim_flags);
  add_output_flags(simulate, sim_out);
  simulate->add_option("--start", sim_start);
  simulate->add_option("--steps", sim_steps);
  simulate->add_option("--samples", samples);

  ScenarioFlags mirror_flags;
  OutputFlags mirror_out;
  long mirror_steps = 1;
  std::string mirror_from = "delta:0";
  auto* mirror = app.add_subcommand("mirror", "mirror-symmetric chains");
  add_scenario_flags(mirror, mirror_flags);
  add_output_flags(mirror, mirror_out);
  mirror->require_subcommand(1);
  auto* mirror_spectrum = mirror->add_subcommand("spectrum", "kappa, kappa_S and kappa_M")->fallthrough();
  auto* mirror_evolve = mirror->add_subcommand("evolve", "evolution under L^S")->fallthrough();
  mirror_evolve->add_option("--steps", mirror_steps);
  mirror_evolve->add_option("--from", mirror_from, "delta:Y, uniform or file:PATH");

  ScenarioFlags dual_flags;
  OutputFlags dual_out;
  auto* dual = app.add_subcommand("dual", "rates of the reflected chain J L J");
  add_scenario_flags(dual, dual_flags);
  add_output_flags(dual, dual_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(json{{"error", "UsageError"}, {"subject", ""}, {"message", e.what()}, {"status", BDS_DOMAIN_ERROR}}
                    .dump());
    return BDS_DOMAIN_ERROR;
  }

  try {
    if (*list) {
      run_result([](bds_result** r) { return bds_list_families(r); }, list_out);
    } else if (*solve) {
      auto s = open_scenario(solve_flags);
      if (*stationary) {
        run_result([&](bds_result** r) { return bds_stationary(s.get(), r); }, solve_out);
      } else if (*evolve) {
        run_result([&](bds_result** r) { return bds_evolve(s.get(), from.c_str(), *steps, r); }, solve_out);
      } else if (*transition) {
        if (time)
          run_result([&](bds_result** r) { return bds_transition_continuous(s.get(), *time, r); }, solve_out);
        else
          run_result([&](bds_result** r) { return bds_transition(s.get(), steps.value_or(1), r); }, solve_out);
      } else if (*continuous) {
        run_result([&](bds_result** r) { return bds_evolve_continuous(s.get(), from.c_str(), *time, r); }, solve_out);
      }
    } else if (*verify) {
      auto s = open_scenario(verify_flags);
      const int level = *full ? 1 : 0;
      (void)fast;
      run_result([&](bds_result** r) { return bds_verify(s.get(), level, corrupt, r); }, verify_out);
    } else if (*simulate) {
      auto s = open_scenario(sim_flags);
      run_result([&](bds_result** r) { return bds_simulate(s.get(), sim_start, sim_steps, samples, r); }, sim_out);
    } else if (*mirror) {
      auto s = open_scenario(mirror_flags);
      if (*mirror_spectrum)
        run_result([&](bds_result** r) { return bds_mirror_spectrum(s.get(), r); }, mirror_out);
      else
        run_result([&](bds_result** r) { return bds_mirror_evolve(s.get(), mirror_from.c_str(), mirror_steps, r); },
                   mirror_out);
    } else if (*dual) {
      auto s = open_scenario(dual_flags);
      run_result([&](bds_result** r) { return bds_dual(s.get(), r); }, dual_out);
    }
  } catch (const LibraryFailure& f) {
    print_error(bds_last_error());
    return f.code == BDS_VERIFY_FAILED || f.code == BDS_DOMAIN_ERROR || f.code == BDS_IO_ERROR ? f.code
                                                                                                : BDS_DOMAIN_ERROR;
  } catch (const CliError& e) {
    print_error(json{{"error", e.kind}, {"subject", e.subject}, {"message", e.message}, {"status", e.code}}.dump());
    return e.code;
  }
  return 0;
}
