#include "bdspectral/bdspectral.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "export.hpp"
#include "mirror.hpp"
#include "oracle.hpp"
#include "scenario.hpp"
#include "verify.hpp"

using nlohmann::json;

struct bds_scenario {
  bds::scenario::ScenarioConfig config;
  bds::spectral::SpectralBasis basis;
};

struct bds_result {
  std::string csv;
  std::string sidecar;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
};

namespace {

thread_local std::string last_error = "null";

void set_error(std::string_view kind, const std::string& subject, const std::string& message, bds_status status) {
  last_error = json{{"error", kind}, {"subject", subject}, {"message", message}, {"status", static_cast<int>(status)}}
                   .dump();
}

template <typename Fn>
bds_status guarded(Fn&& fn) {
  try {
    last_error = "null";
    return fn();
  } catch (const bds::Error& e) {
    const bds_status s = e.kind() == bds::ErrorKind::Io ? BDS_IO_ERROR : BDS_DOMAIN_ERROR;
    set_error(bds::error_kind_name(e.kind()), e.subject(), e.what(), s);
    return s;
  } catch (const json::exception& e) {
    set_error("ConfigError", "config", e.what(), BDS_DOMAIN_ERROR);
    return BDS_DOMAIN_ERROR;
  } catch (const std::bad_alloc&) {
    set_error("InternalError", "memory", "out of memory", BDS_INTERNAL_ERROR);
    return BDS_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    set_error("InternalError", "", e.what(), BDS_INTERNAL_ERROR);
    return BDS_INTERNAL_ERROR;
  }
}

bds_status invalid(const char* what) {
  set_error("InvalidArgument", what, std::string("null ") + what, BDS_INVALID_ARGUMENT);
  return BDS_INVALID_ARGUMENT;
}

json lattice_json(const bds::chain::ChainOperators& ops) {
  return {{"points", ops.lattice.points()},
          {"truncated", ops.lattice.truncated},
          {"last", ops.lattice.last},
          {"tail_mass", ops.lattice.tail_mass}};
}

json context(const bds_scenario& s, std::string_view command) {
  const auto& ops = s.basis.ops;
  return {{"command", command},
          {"config", bds::scenario::to_json(s.config)},
          {"t_S", ops.t_S},
          {"rate_bound", ops.rate_bound},
          {"lattice", lattice_json(ops)},
          {"modes", {{"primary", s.basis.primary.E.size()},
                     {"secondary", s.basis.secondary ? s.basis.secondary->E.size() : 0}}},
          {"residuals", bds::verify::residual_summary(s.basis)}};
}

bds_result* make_result(std::string csv, const json& sidecar, std::size_t rows, std::size_t cols,
                        std::vector<double> data) {
  auto* r = new bds_result;
  r->csv = std::move(csv);
  r->sidecar = sidecar.dump(2) + "\n";
  r->rows = rows;
  r->cols = cols;
  r->data = std::move(data);
  return r;
}

bds_result* distribution_result(const bds::chain::Distribution& d, json sidecar) {
  sidecar["distribution"] = {{"total", d.total()},
                             {"tail_mass", d.tail_mass},
                             {"negative_probability", d.negative_probability}};
  return make_result(bds::io::distribution_csv(d), sidecar, d.values.size(), 1, d.values);
}

bds_result* matrix_result(const bds::Matrix& m, json sidecar) {
  double worst = 0.0;
  for (std::size_t y = 0; y < m.cols(); ++y) {
    double col = 0.0;
    for (std::size_t x = 0; x < m.rows(); ++x) col += m(x, y);
    worst = std::max(worst, std::fabs(col - 1.0));
  }
  sidecar["matrix"] = {{"rows", m.rows()}, {"cols", m.cols()}, {"max_column_sum_error", worst}};
  return make_result(bds::io::matrix_csv(m), sidecar, m.rows(), m.cols(), m.data());
}

bds::chain::Distribution initial_distribution(const bds_scenario& s, const char* spec) {
  const std::size_t points = s.basis.points();
  const std::string text = spec ? spec : "delta:0";
  if (text == "uniform") {
    bds::chain::Distribution d;
    d.values.assign(points, 1.0 / static_cast<double>(points));
    return d;
  }
  if (text.rfind("delta:", 0) == 0) {
    const std::string at = text.substr(6);
    std::size_t used = 0;
    long y = -1;
    try {
      y = std::stol(at, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != at.size() || at.empty())
      throw bds::Error(bds::ErrorKind::Config, "initial", "bad delta point '" + at + "'");
    if (y < 0 || static_cast<std::size_t>(y) >= points)
      throw bds::Error(bds::ErrorKind::Lattice, "x=" + at, "delta point outside the lattice");
    return bds::chain::Distribution::delta(points, static_cast<std::size_t>(y));
  }
  if (text.rfind("file:", 0) == 0) return bds::io::read_distribution_csv(text.substr(5), points);
  throw bds::Error(bds::ErrorKind::Config, "initial", "initial must be delta:Y, uniform or file:PATH");
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* bds_version(void) { return "1.0.0"; }

const char* bds_last_error(void) { return last_error.c_str(); }

void bds_free_string(char* s) { std::free(s); }

bds_status bds_list_families(bds_result** out) {
  if (!out) return invalid("out");
  return guarded([&] {
    std::string csv = "family,name,parameters,lattice,branches,constraints\n";
    json rows = json::array();
    for (const auto& f : bds::catalog::families()) {
      std::string params;
      for (const auto& p : f.params) params += (params.empty() ? "" : " ") + std::string(p);
      if (f.lattice == bds::catalog::LatticeKind::Finite) params += params.empty() ? "N" : " N";
      const char* lattice = f.lattice == bds::catalog::LatticeKind::Finite ? "finite" : "semi-infinite";
      const int branches = f.has_minus_set ? 2 : 1;
      csv += csv_field(f.name) + ',' + csv_field(f.display) + ',' + csv_field(params) + ',' + lattice + ',' +
             std::to_string(branches) + ',' + csv_field(f.constraints) + '\n';
      rows.push_back({{"family", f.name},
                      {"name", f.display},
                      {"parameters", params},
                      {"lattice", lattice},
                      {"branches", branches},
                      {"constraints", f.constraints}});
    }
    *out = make_result(std::move(csv), json{{"command", "list"}, {"families", rows}}, 0, 0, {});
    return BDS_OK;
  });
}

bds_status bds_scenario_create(const char* config_json, bds_scenario** out) {
  if (!config_json) return invalid("config_json");
  if (!out) return invalid("out");
  return guarded([&] {
    auto config = bds::scenario::from_json(json::parse(config_json));
    auto basis = bds::scenario::solve(config);
    *out = new bds_scenario{std::move(config), std::move(basis)};
    return BDS_OK;
  });
}

void bds_scenario_destroy(bds_scenario* scenario) { delete scenario; }

bds_status bds_scenario_config(const bds_scenario* s, char** json_out) {
  if (!s) return invalid("scenario");
  if (!json_out) return invalid("json_out");
  return guarded([&] {
    *json_out = copy_string(bds::scenario::to_json(s->config).dump(2) + "\n");
    return BDS_OK;
  });
}

bds_status bds_rates(const bds_scenario* s, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  return guarded([&] {
    const auto& ops = s->basis.ops;
    std::vector<double> data;
    for (std::size_t x = 0; x < ops.birth.size(); ++x) {
      data.push_back(ops.birth[x]);
      data.push_back(ops.death[x]);
    }
    *out = make_result(bds::io::columns_csv({"birth", "death"}, {ops.birth, ops.death}), context(*s, "rates"),
                       ops.birth.size(), 2, std::move(data));
    return BDS_OK;
  });
}

bds_status bds_stationary(const bds_scenario* s, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  return guarded([&] {
    *out = distribution_result(s->basis.ops.pi, context(*s, "stationary"));
    return BDS_OK;
  });
}

bds_status bds_evolve(const bds_scenario* s, const char* initial, long steps, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  return guarded([&] {
    const auto start = initial_distribution(*s, initial);
    const auto d = bds::spectral::evolve_discrete(s->basis, bds::spectral::expand(s->basis, start), steps);
    json side = context(*s, "evolve");
    side["steps"] = steps;
    side["initial"] = initial ? initial : "delta:0";
    *out = distribution_result(d, side);
    return BDS_OK;
  });
}

bds_status bds_evolve_continuous(const bds_scenario* s, const char* initial, double t, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  return guarded([&] {
    const auto start = initial_distribution(*s, initial);
    const auto d = bds::spectral::evolve_continuous(s->basis, bds::spectral::expand(s->basis, start), t);
    json side = context(*s, "continuous");
    side["time"] = t;
    side["initial"] = initial ? initial : "delta:0";
    *out = distribution_result(d, side);
    return BDS_OK;
  });
}

bds_status bds_transition(const bds_scenario* s, long steps, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  return guarded([&] {
    json side = context(*s, "transition");
    side["steps"] = steps;
    *out = matrix_result(bds::spectral::transition_matrix_discrete(s->basis, steps), side);
    return BDS_OK;
  });
}

bds_status bds_transition_continuous(const bds_scenario* s, double t, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  return guarded([&] {
    json side = context(*s, "transition");
    side["time"] = t;
    *out = matrix_result(bds::spectral::transition_matrix_continuous(s->basis, t), side);
    return BDS_OK;
  });
}

bds_status bds_verify(const bds_scenario* s, int level, double corrupt_dn2, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  if (level != 0 && level != 1) return invalid("level");
  return guarded([&] {
    bds::verify::VerifyOptions options;
    options.level = level == 1 ? bds::verify::Level::Full : bds::verify::Level::Fast;
    options.seed = s->config.seed;
    if (corrupt_dn2 > 0.0) options.corrupt_dn2 = corrupt_dn2;
    const auto report = bds::verify::run(s->basis, options);

    std::string csv = "check,value,tolerance,asserted,passed\n";
    std::vector<double> data;
    for (const auto& c : report.checks) {
      csv += c.name + ',' + bds::io::format_number(c.value) + ',' + bds::io::format_number(c.tolerance) + ',' +
             (c.asserted ? "true" : "false") + ',' + (c.passed ? "true" : "false") + '\n';
      data.insert(data.end(), {c.value, c.tolerance});
    }
    json side = context(*s, "verify");
    side["level"] = level == 1 ? "full" : "fast";
    side["report"] = bds::verify::to_json(report);
    if (options.corrupt_dn2) side["corrupt_dn2"] = *options.corrupt_dn2;
    const std::size_t rows = report.checks.size();
    *out = make_result(std::move(csv), side, rows, 2, std::move(data));
    if (report.passed()) return BDS_OK;
    std::string names;
    for (const auto& n : report.failing()) names += (names.empty() ? "" : ",") + n;
    set_error("VerificationFailure", names, "failing checks: " + names, BDS_VERIFY_FAILED);
    return BDS_VERIFY_FAILED;
  });
}

bds_status bds_simulate(const bds_scenario* s, long start, long steps, uint64_t samples, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  return guarded([&] {
    const auto& ops = s->basis.ops;
    if (start < 0) throw bds::Error(bds::ErrorKind::Lattice, "start", "start point outside the lattice");
    const auto sim = bds::oracle::simulate(ops, static_cast<std::size_t>(start), steps, samples, s->config.seed);
    const auto from = bds::chain::Distribution::delta(s->basis.points(), static_cast<std::size_t>(start));
    const auto expected = bds::spectral::evolve_discrete(s->basis, bds::spectral::expand(s->basis, from), steps);
    const auto empirical = sim.empirical();

    json side = context(*s, "simulate");
    side["start"] = start;
    side["steps"] = steps;
    side["samples"] = samples;
    side["seed"] = s->config.seed;
    side["tail_events"] = sim.tail_events;
    side["flagged"] = sim.flagged;
    try {
      side["chi_square"] = bds::io::to_json(bds::oracle::chi_square(sim.counts, sim.tail_events, expected, samples));
    } catch (const bds::Error& e) {
      if (e.kind() != bds::ErrorKind::DegenerateBins) throw;
      side["chi_square"] = nullptr;
      side["chi_square_note"] = e.what();
    }

    std::vector<double> counts(sim.counts.begin(), sim.counts.end());
    std::vector<double> data;
    for (std::size_t x = 0; x < counts.size(); ++x)
      data.insert(data.end(), {counts[x], empirical.values[x], expected.values[x]});
    *out = make_result(bds::io::columns_csv({"count", "empirical", "expected"}, {counts, empirical.values, expected.values}),
                       side, counts.size(), 3, std::move(data));
    return BDS_OK;
  });
}

bds_status bds_mirror_spectrum(const bds_scenario* s, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  return guarded([&] {
    const auto mc = bds::mirror::build_mirror(s->basis);
    const auto& E = mc.base.primary.E;
    const auto& kappa = mc.base.primary.kappa;
    std::vector<double> data;
    for (std::size_t n = 0; n < E.size(); ++n) data.insert(data.end(), {E[n], kappa[n], mc.kappa_S[n], mc.kappa_M[n]});
    *out = make_result(bds::io::columns_csv({"E", "kappa", "kappa_S", "kappa_M"}, {E, kappa, mc.kappa_S, mc.kappa_M}, "n"),
                       context(*s, "mirror spectrum"), E.size(), 4, std::move(data));
    return BDS_OK;
  });
}

bds_status bds_mirror_evolve(const bds_scenario* s, const char* initial, long steps, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  return guarded([&] {
    const auto mc = bds::mirror::build_mirror(s->basis);
    const auto start = initial_distribution(*s, initial);
    const auto d = bds::mirror::evolve_LS(mc, start, steps);
    json side = context(*s, "mirror evolve");
    side["steps"] = steps;
    side["initial"] = initial ? initial : "delta:0";
    double l1 = 0.0;
    for (std::size_t x = 0; x < d.values.size(); ++x) l1 += std::fabs(d.values[x] - s->basis.ops.pi.values[x]);
    side["distance_to_stationary"] = l1;
    *out = distribution_result(d, side);
    return BDS_OK;
  });
}

bds_status bds_dual(const bds_scenario* s, bds_result** out) {
  if (!s) return invalid("scenario");
  if (!out) return invalid("out");
  return guarded([&] {
    const auto dual = bds::mirror::dual_system(s->basis);
    const auto& a = s->basis.ops;
    const auto& d = dual.ops;
    std::vector<double> data;
    for (std::size_t x = 0; x < a.birth.size(); ++x) data.insert(data.end(), {a.birth[x], a.death[x], d.birth[x], d.death[x]});
    json side = context(*s, "dual");
    double gap = 0.0;
    for (std::size_t n = 0; n < dual.primary.E.size(); ++n)
      gap = std::max(gap, std::fabs(dual.primary.E[n] - s->basis.primary.E[n]));
    side["eigenvalue_difference"] = gap;
    *out = make_result(bds::io::columns_csv({"birth", "death", "dual_birth", "dual_death"},
                                            {a.birth, a.death, d.birth, d.death}),
                       side, a.birth.size(), 4, std::move(data));
    return BDS_OK;
  });
}

const char* bds_result_csv(const bds_result* r) { return r ? r->csv.c_str() : ""; }
const char* bds_result_json(const bds_result* r) { return r ? r->sidecar.c_str() : ""; }
size_t bds_result_rows(const bds_result* r) { return r ? r->rows : 0; }
size_t bds_result_cols(const bds_result* r) { return r ? r->cols : 0; }
const double* bds_result_data(const bds_result* r) { return r && !r->data.empty() ? r->data.data() : nullptr; }
void bds_result_destroy(bds_result* r) { delete r; }

}  // extern "C"
