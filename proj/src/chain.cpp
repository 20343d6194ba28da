#include "chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace bds::chain {
namespace {

constexpr double kWindowInflation = 1.05;
constexpr double kLimitBand = 0.01;
constexpr long kMaxCutoff = 200000;

void check_rates(const std::vector<double>& birth, const std::vector<double>& death, const Lattice& lattice) {
  if (birth.size() != lattice.points() || death.size() != lattice.points())
    throw Error(ErrorKind::Lattice, "rates", "rate vectors do not match the lattice size");
  for (std::size_t x = 0; x < birth.size(); ++x) {
    if (!(birth[x] >= 0.0) || !(death[x] >= 0.0) || !std::isfinite(birth[x]) || !std::isfinite(death[x]))
      throw Error(ErrorKind::Param, "x=" + std::to_string(x), "rates must be finite and nonnegative");
  }
  if (death[0] != 0.0) throw Error(ErrorKind::Param, "x=0", "D(0) must vanish");
  if (!lattice.truncated && birth.back() != 0.0)
    throw Error(ErrorKind::Param, "x=" + std::to_string(lattice.last), "B(N) must vanish");
  for (std::size_t x = 0; x + 1 < birth.size(); ++x) {
    if (!(birth[x] > 0.0)) throw Error(ErrorKind::Param, "x=" + std::to_string(x), "B(x) must be positive");
    if (!(death[x + 1] > 0.0))
      throw Error(ErrorKind::Param, "x=" + std::to_string(x + 1), "D(x) must be positive");
  }
}

}  // namespace

double Distribution::total() const {
  return std::accumulate(values.begin(), values.end(), 0.0) + tail_mass;
}

Distribution Distribution::delta(std::size_t points, std::size_t at) {
  Distribution d;
  d.values.assign(points, 0.0);
  d.values.at(at) = 1.0;
  return d;
}

double max_total_rate(const std::vector<double>& birth, const std::vector<double>& death, const Lattice& lattice,
                      std::optional<double> limit) {
  std::vector<double> total(birth.size());
  for (std::size_t x = 0; x < total.size(); ++x) total[x] = birth[x] + death[x];
  const double window = *std::max_element(total.begin(), total.end());
  if (!lattice.truncated) return window;
  if (limit) return std::max(window, *limit);
  const std::size_t n = total.size();
  if (n >= 4) {
    const bool rising = total[n - 1] > total[n - 2] * (1.0 + 1e-9) && total[n - 2] > total[n - 3] * (1.0 + 1e-9) &&
                        total[n - 3] > total[n - 4] * (1.0 + 1e-9);
    if (rising && total[n - 1] >= window)
      throw Error(ErrorKind::Unbounded, "x=" + std::to_string(n - 1), "B+D still growing at the cutoff");
  }
  return window * kWindowInflation;
}

ChainOperators build(std::vector<double> birth, std::vector<double> death, const Lattice& lattice, TimeStep step,
                     std::optional<double> rate_limit) {
  check_rates(birth, death, lattice);
  ChainOperators ops;
  ops.lattice = lattice;
  ops.rate_bound = max_total_rate(birth, death, lattice, rate_limit);
  if (step.fixed) {
    const double t = *step.fixed;
    if (!(t > 0.0)) throw Error(ErrorKind::Param, "t_S", "t_S must be positive");
    if (!(t * ops.rate_bound < 1.0))
      throw Error(ErrorKind::StepTooLarge, "t_S",
                  "t_S * max(B+D) = " + std::to_string(t * ops.rate_bound) + " is not below 1");
    ops.t_S = t;
  } else {
    if (!(step.theta > 0.0 && step.theta < 1.0)) throw Error(ErrorKind::Param, "theta", "theta must lie in (0,1)");
    ops.t_S = step.theta / ops.rate_bound;
  }

  const std::size_t n = lattice.points();
  ops.log_phi0.assign(n, 0.0);
  for (std::size_t x = 0; x + 1 < n; ++x)
    ops.log_phi0[x + 1] = ops.log_phi0[x] + 0.5 * (std::log(birth[x]) - std::log(death[x + 1]));
  ops.phi0.resize(n);
  std::transform(ops.log_phi0.begin(), ops.log_phi0.end(), ops.phi0.begin(), [](double l) { return std::exp(l); });

  // Normalise in log space: shift by the largest log weight first.
  const double peak = *std::max_element(ops.log_phi0.begin(), ops.log_phi0.end());
  std::vector<double> w(n);
  for (std::size_t x = 0; x < n; ++x) w[x] = std::exp(2.0 * (ops.log_phi0[x] - peak));
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  ops.pi.values.resize(n);
  const double inside = 1.0 - lattice.tail_mass;
  for (std::size_t x = 0; x < n; ++x) ops.pi.values[x] = inside * w[x] / sum;
  ops.pi.tail_mass = lattice.tail_mass;

  ops.birth = std::move(birth);
  ops.death = std::move(death);
  return ops;
}

Cutoff choose_cutoff(const RateFunction& rates, double eps_tail, std::optional<double> limit,
                     std::optional<long> forced) {
  if (!(eps_tail > 0.0 && eps_tail < 1.0)) throw Error(ErrorKind::Param, "epsilon_tail", "must lie in (0,1)");
  // log phi0(x)^2 by running product, extended until the remaining terms
  // cannot matter at double precision.
  std::vector<double> logw{0.0};
  std::vector<double> total;
  double peak = 0.0;
  for (long x = 0;; ++x) {
    const auto [b, d] = rates(x);
    total.push_back(b + d);
    const auto [b1, d1] = rates(x + 1);
    if (!(b > 0.0) || !(d1 > 0.0))
      throw Error(ErrorKind::Param, "x=" + std::to_string(x), "rates must stay positive on a semi-infinite lattice");
    logw.push_back(logw.back() + std::log(b) - std::log(d1));
    peak = std::max(peak, logw.back());
    const long need = forced ? *forced + 2 : 0;
    const bool settled = !limit || std::fabs(total.back() - *limit) <= kLimitBand * std::fabs(*limit);
    if (x + 1 >= need && settled && logw.back() < peak - 120.0 && logw.back() < logw[logw.size() - 2]) break;
    if (x > kMaxCutoff)
      throw Error(ErrorKind::Convergence, "cutoff", "stationary weights do not decay; no finite cutoff exists");
  }
  const std::size_t n = logw.size();
  std::vector<double> w(n);
  for (std::size_t x = 0; x < n; ++x) w[x] = std::exp(logw[x] - peak);
  // suffix[x] = sum_{y >= x} w[y]
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t x = n; x-- > 0;) suffix[x] = suffix[x + 1] + w[x];
  const double all = suffix[0];

  if (forced) {
    if (*forced < 1) throw Error(ErrorKind::Param, "lattice_cutoff", "cutoff must be at least 1");
    return {*forced, suffix[static_cast<std::size_t>(*forced) + 1] / all};
  }
  for (std::size_t M = 1; M + 1 < n; ++M) {
    const double tail = suffix[M + 1] / all;
    if (tail >= eps_tail) continue;
    if (limit && std::fabs(total[M] - *limit) > kLimitBand * std::fabs(*limit)) continue;
    return {static_cast<long>(M), tail};
  }
  throw Error(ErrorKind::Convergence, "cutoff", "no cutoff meets the tail and rate-limit conditions");
}

ChainOperators build_semi_infinite(const RateFunction& rates, double eps_tail, TimeStep step,
                                   std::optional<double> rate_limit, std::optional<long> forced_cutoff) {
  const Cutoff cut = choose_cutoff(rates, eps_tail, rate_limit, forced_cutoff);
  std::vector<double> birth(cut.M + 1), death(cut.M + 1);
  for (long x = 0; x <= cut.M; ++x) std::tie(birth[x], death[x]) = rates(x);
  return build(std::move(birth), std::move(death), Lattice::window(cut.M, cut.tail_mass), step, rate_limit);
}

Distribution apply_L(const ChainOperators& ops, const Distribution& dist) {
  const std::size_t n = ops.lattice.points();
  if (dist.values.size() != n) throw Error(ErrorKind::Lattice, "distribution", "size does not match the lattice");
  const double t = ops.t_S;
  Distribution out;
  out.values.resize(n);
  out.tail_mass = dist.tail_mass;
  for (std::size_t x = 0; x < n; ++x) {
    double v = (1.0 - t * (ops.birth[x] + ops.death[x])) * dist.values[x];
    if (x > 0) v += t * ops.birth[x - 1] * dist.values[x - 1];
    if (x + 1 < n) v += t * ops.death[x + 1] * dist.values[x + 1];
    out.values[x] = v;
  }
  if (ops.lattice.truncated) out.tail_mass += t * ops.birth[n - 1] * dist.values[n - 1];
  return out;
}

std::vector<double> apply_LBD(const ChainOperators& ops, const std::vector<double>& v) {
  return LBD(ops).apply(v);
}

Factorized build_H(const ChainOperators& ops) {
  const std::size_t n = ops.lattice.points();
  Factorized f;
  f.H.diag.resize(n);
  f.H.lower.resize(n - 1);
  f.H.upper.resize(n - 1);
  f.A.diag.resize(n);
  f.A.lower.assign(n - 1, 0.0);
  f.A.upper.resize(n - 1);
  for (std::size_t x = 0; x < n; ++x) {
    f.H.diag[x] = ops.birth[x] + ops.death[x];
    f.A.diag[x] = std::sqrt(ops.birth[x]);
    if (x + 1 < n) {
      const double off = -std::sqrt(ops.birth[x] * ops.death[x + 1]);
      f.H.upper[x] = off;
      f.H.lower[x] = off;
      f.A.upper[x] = -std::sqrt(ops.death[x + 1]);
    }
  }
  return f;
}

Tridiagonal Htilde(const ChainOperators& ops) {
  const std::size_t n = ops.lattice.points();
  Tridiagonal t;
  t.diag.resize(n);
  t.lower.resize(n - 1);
  t.upper.resize(n - 1);
  for (std::size_t x = 0; x < n; ++x) {
    t.diag[x] = ops.birth[x] + ops.death[x];
    if (x + 1 < n) {
      t.upper[x] = -ops.birth[x];
      t.lower[x] = -ops.death[x + 1];
    }
  }
  return t;
}

Tridiagonal LBD(const ChainOperators& ops) {
  const std::size_t n = ops.lattice.points();
  Tridiagonal t;
  t.diag.resize(n);
  t.lower.resize(n - 1);
  t.upper.resize(n - 1);
  for (std::size_t x = 0; x < n; ++x) {
    t.diag[x] = -(ops.birth[x] + ops.death[x]);
    if (x + 1 < n) {
      t.lower[x] = ops.birth[x];
      t.upper[x] = ops.death[x + 1];
    }
  }
  return t;
}

Tridiagonal L(const ChainOperators& ops) {
  Tridiagonal t = LBD(ops);
  for (auto& v : t.diag) v = 1.0 + ops.t_S * v;
  for (auto& v : t.lower) v *= ops.t_S;
  for (auto& v : t.upper) v *= ops.t_S;
  return t;
}

std::vector<double> eigenvector_by_recurrence(const std::vector<double>& birth, const std::vector<double>& death,
                                              double E, const Lattice& lattice) {
  const std::size_t n = lattice.points();
  if (birth.size() < n || death.size() < n)
    throw Error(ErrorKind::Lattice, "rates", "rate vectors shorter than the lattice");
  std::vector<double> P(n, 0.0);
  P[0] = 1.0;
  for (std::size_t x = 0; x + 1 < n; ++x) {
    if (birth[x] == 0.0)
      throw Error(ErrorKind::DivisionByZero, "x=" + std::to_string(x), "B(x) vanishes before the last point");
    const double back = x > 0 ? death[x] * (P[x] - P[x - 1]) : 0.0;
    P[x + 1] = P[x] + (back - E * P[x]) / birth[x];
  }
  return P;
}

}  // namespace bds::chain
