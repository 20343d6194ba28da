#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace bds::spectral {
namespace {

using catalog::SetTag;

constexpr double kModeFloor = 1e-16;
constexpr int kQuietModes = 3;
constexpr double kMaxLogQPower = 250.0 * 2.302585092994046;  // q^-n below 1e250
constexpr unsigned kMaxModes = 4000;
constexpr double kNegativeFlag = -1e-10;

using catalog::Extended;

int alternating(std::size_t x) { return (x % 2 == 0) ? 1 : -1; }

std::vector<Extended> log_ground_extended(const catalog::ValidatedFamily& fam, SetTag set, std::size_t points) {
  std::vector<Extended> out(points, 0.0L);
  for (std::size_t x = 0; x + 1 < out.size(); ++x) {
    const auto r0 = catalog::rates_extended(fam, set, static_cast<long>(x));
    const auto r1 = catalog::rates_extended(fam, set, static_cast<long>(x) + 1);
    out[x + 1] = out[x] + (std::log(r0.birth) - std::log(r1.death)) / 2;
  }
  return out;
}

template <typename Real>
Real power(Real kappa, long steps) {
  if (steps < 0) throw Error(ErrorKind::Param, "steps", "step count must be nonnegative");
  Real result = 1;
  Real base = kappa;
  for (long e = steps; e > 0; e >>= 1) {
    if (e & 1) result *= base;
    base *= base;
  }
  return result;
}

std::vector<double> log_ground_on(const catalog::ValidatedFamily& fam, SetTag set, std::size_t points) {
  std::vector<double> out(points, 0.0);
  for (std::size_t x = 0; x + 1 < out.size(); ++x) {
    const auto r0 = catalog::rates(fam, set, static_cast<long>(x));
    const auto r1 = catalog::rates(fam, set, static_cast<long>(x) + 1);
    out[x + 1] = out[x] + 0.5 * (std::log(r0.birth) - std::log(r1.death));
  }
  return out;
}

Branch build_branch(const catalog::ValidatedFamily& fam, SetTag chain, SetTag set, const chain::ChainOperators& ops,
                    double& residual) {
  const std::size_t points = ops.lattice.points();
  const std::vector<Extended> logg = log_ground_extended(fam, set, points);
  Branch b;
  b.set = set;
  std::vector<std::vector<Extended>> rows;

  unsigned cap = kMaxModes;
  if (fam.finite()) {
    cap = static_cast<unsigned>(fam.N()) + 1;
  } else {
    const double lq = -std::log(fam.params().q);
    cap = std::min<unsigned>(cap, static_cast<unsigned>(kMaxLogQPower / lq));
  }

  auto mode = [&](unsigned n, double& peak) {
    std::vector<Extended> v(points);
    peak = 0.0;
    for (std::size_t x = 0; x < points; ++x) {
      const int sign_set = set == SetTag::Minus ? alternating(x) : 1;
      const int sign_chain = chain == SetTag::Minus ? alternating(x) : 1;
      v[x] = sign_chain * catalog::normalized_vector_extended(fam, set, n, static_cast<long>(x), logg[x], sign_set);
      peak = std::max(peak, static_cast<double>(std::fabs(v[x])));
    }
    return v;
  };
  std::vector<unsigned> kept;
  int quiet = 0;
  double last_peak = 0.0;
  for (unsigned n = 0; n < cap; ++n) {
    double peak = 0.0;
    std::vector<Extended> v = mode(n, peak);
    if (!fam.finite()) {
      if (peak < kModeFloor) {
        if (++quiet == kQuietModes) break;
        continue;
      }
      // Quiet modes followed by a loud one are kept.
      for (; quiet > 0; --quiet) {
        const unsigned m = n - static_cast<unsigned>(quiet);
        double unused = 0.0;
        rows.push_back(mode(m, unused));
        kept.push_back(m);
      }
    }
    rows.push_back(std::move(v));
    kept.push_back(n);
    last_peak = peak;
  }
  if (!fam.finite() && quiet < kQuietModes) residual = std::max(residual, last_peak);

  b.vectors = Matrix(rows.size(), points);
  b.precise.reserve(rows.size() * points);
  for (std::size_t n = 0; n < rows.size(); ++n)
    for (std::size_t x = 0; x < points; ++x) {
      b.vectors(n, x) = static_cast<double>(rows[n][x]);
      b.precise.push_back(rows[n][x]);
    }
  for (unsigned n : kept) {
    const Extended E = catalog::eigenvalue_extended(fam, chain, set, n);
    b.E.push_back(static_cast<double>(E));
    b.E_precise.push_back(E);
    b.log_dn2.push_back(catalog::log_norm_const(fam, set, n).log_abs);
    b.kappa_precise.push_back(1 - ops.t_S * E);
    b.kappa.push_back(static_cast<double>(b.kappa_precise.back()));
  }
  return b;
}

template <typename Weight>
chain::Distribution evolve(const SpectralBasis& basis, const ExpansionCoefficients& coeffs, Weight weight) {
  const std::size_t points = basis.points();
  std::vector<Extended> sum(points, 0.0L);
  auto accumulate = [&](const Branch& b, const std::vector<Extended>& c) {
    for (std::size_t n = 0; n < b.E.size(); ++n) {
      const Extended f = c[n] * weight(b, n);
      if (f == 0) continue;
      for (std::size_t x = 0; x < points; ++x) sum[x] += f * b.precise_at(n, x);
    }
  };
  accumulate(basis.primary, coeffs.c);
  if (basis.secondary && coeffs.c_minus) accumulate(*basis.secondary, *coeffs.c_minus);

  chain::Distribution out;
  out.values.resize(points);
  double total = 0.0;
  for (std::size_t x = 0; x < points; ++x) {
    out.values[x] = static_cast<double>(basis.primary.precise_at(0, x) * sum[x]);
    total += out.values[x];
    if (out.values[x] < kNegativeFlag) out.negative_probability = true;
  }
  if (basis.ops.lattice.truncated) out.tail_mass = std::max(0.0, 1.0 - total);
  return out;
}

template <typename Weight>
Matrix kernel(const SpectralBasis& basis, Weight weight) {
  const std::size_t points = basis.points();
  std::vector<Extended> S(points * points, 0.0L);
  auto accumulate = [&](const Branch& b) {
    for (std::size_t n = 0; n < b.E.size(); ++n) {
      const Extended f = weight(b, n);
      if (f == 0) continue;
      for (std::size_t x = 0; x < points; ++x) {
        const Extended vx = f * b.precise_at(n, x);
        if (vx == 0) continue;
        Extended* row = &S[x * points];
        for (std::size_t y = 0; y < points; ++y) row[y] += vx * b.precise_at(n, y);
      }
    }
  };
  accumulate(basis.primary);
  if (basis.secondary) accumulate(*basis.secondary);
  Matrix K(points, points);
  for (std::size_t x = 0; x < points; ++x)
    for (std::size_t y = 0; y < points; ++y)
      K(x, y) = static_cast<double>(S[x * points + y] * basis.primary.precise_at(0, x) /
                                    basis.primary.precise_at(0, y));
  return K;
}

}  // namespace

std::vector<double> eigenvector(const catalog::ValidatedFamily& fam, SetTag chain, SetTag set, unsigned n,
                                long last) {
  if (fam.finite()) last = std::min<long>(last, fam.N());
  const std::vector<double> logg = log_ground_on(fam, set, static_cast<std::size_t>(last) + 1);
  std::vector<double> v(logg.size());
  for (std::size_t x = 0; x < v.size(); ++x) {
    const int sign_set = set == SetTag::Minus ? alternating(x) : 1;
    const int sign_chain = chain == SetTag::Minus ? alternating(x) : 1;
    v[x] = sign_chain * catalog::normalized_vector(fam, set, n, static_cast<long>(x), logg[x], sign_set);
  }
  return v;
}

double kappa_power(double kappa, long steps) { return power(kappa, steps); }

Extended kappa_power(Extended kappa, long steps) { return power(kappa, steps); }

chain::ChainOperators family_chain(const catalog::ValidatedFamily& fam, SetTag chain, const ChainOptions& options) {
  if (chain == SetTag::Minus && !fam.has_minus_set())
    throw Error(ErrorKind::InvolutionUndefined, std::string(fam.info().name), "family has no minus chain");
  if (fam.finite()) {
    const auto n = static_cast<std::size_t>(fam.N()) + 1;
    std::vector<double> birth(n), death(n);
    for (std::size_t x = 0; x < n; ++x) {
      const auto r = catalog::rates(fam, chain, static_cast<long>(x));
      birth[x] = r.birth;
      death[x] = r.death;
    }
    return chain::build(std::move(birth), std::move(death), chain::Lattice::finite(fam.N()), options.step);
  }
  auto rates = [&](long x) {
    const auto r = catalog::rates(fam, chain, x);
    return std::make_pair(r.birth, r.death);
  };
  return chain::build_semi_infinite(rates, options.eps_tail, options.step, catalog::total_rate_limit(fam, chain),
                                    options.cutoff);
}

SpectralBasis make_basis(const catalog::ValidatedFamily& fam, SetTag chain, chain::ChainOperators ops) {
  double residual = 0.0;
  Branch primary = build_branch(fam, chain, chain, ops, residual);
  std::optional<Branch> secondary;
  if (fam.has_minus_set()) secondary = build_branch(fam, chain, catalog::other(chain), ops, residual);
  double lo = primary.vectors(0, 0), hi = lo;
  for (std::size_t x = 0; x < ops.lattice.points(); ++x) {
    lo = std::min(lo, primary.vectors(0, x));
    hi = std::max(hi, primary.vectors(0, x));
  }
  const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return SpectralBasis{fam, chain, std::move(ops), std::move(primary), std::move(secondary), residual, condition, false};
}

SpectralBasis solve(const catalog::ValidatedFamily& fam, const ChainOptions& options) {
  return make_basis(fam, SetTag::Basic, family_chain(fam, SetTag::Basic, options));
}

SpectralBasis minus_chain_solver(const catalog::ValidatedFamily& fam, const ChainOptions& options) {
  if (!fam.has_minus_set())
    throw Error(ErrorKind::InvolutionUndefined, std::string(fam.info().name),
                std::string(fam.info().display) + " has no second set of polynomials");
  return make_basis(fam, SetTag::Minus, family_chain(fam, SetTag::Minus, options));
}

ExpansionCoefficients expand(const SpectralBasis& basis, const chain::Distribution& dist) {
  const std::size_t points = basis.points();
  if (dist.values.size() != points) throw Error(ErrorKind::Lattice, "distribution", "size does not match the lattice");
  auto project = [&](const Branch& b) {
    std::vector<Extended> c(b.E.size(), 0.0L);
    for (std::size_t n = 0; n < c.size(); ++n) {
      Extended s = 0;
      for (std::size_t x = 0; x < points; ++x)
        if (dist.values[x] != 0.0) s += b.precise_at(n, x) / basis.primary.precise_at(0, x) * dist.values[x];
      c[n] = s;
    }
    return c;
  };
  ExpansionCoefficients out;
  out.c = project(basis.primary);
  if (basis.secondary) out.c_minus = project(*basis.secondary);
  return out;
}

chain::Distribution evolve_discrete(const SpectralBasis& basis, const ExpansionCoefficients& coeffs, long steps) {
  return evolve(basis, coeffs, [&](const Branch& b, std::size_t n) { return power(b.kappa_precise[n], steps); });
}

chain::Distribution evolve_continuous(const SpectralBasis& basis, const ExpansionCoefficients& coeffs, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::Param, "t", "time must be nonnegative");
  return evolve(basis, coeffs, [&](const Branch& b, std::size_t n) { return std::exp(-b.E_precise[n] * t); });
}

Matrix transition_matrix_discrete(const SpectralBasis& basis, long steps) {
  power(1.0, steps);
  return kernel(basis, [&](const Branch& b, std::size_t n) { return power(b.kappa_precise[n], steps); });
}

Matrix transition_matrix_continuous(const SpectralBasis& basis, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::Param, "t", "time must be nonnegative");
  return kernel(basis, [&](const Branch& b, std::size_t n) { return std::exp(-b.E_precise[n] * t); });
}

SpectralMatrices spectral_matrices(const SpectralBasis& basis) {
  const std::size_t points = basis.points();
  SpectralMatrices m{Matrix(points, points), Matrix(points, points), Matrix(points, points)};
  std::vector<Extended> H(points * points, 0.0L);
  auto accumulate = [&](const Branch& b) {
    for (std::size_t n = 0; n < b.E.size(); ++n)
      for (std::size_t x = 0; x < points; ++x)
        for (std::size_t y = 0; y < points; ++y)
          H[x * points + y] += b.E_precise[n] * b.precise_at(n, x) * b.precise_at(n, y);
  };
  accumulate(basis.primary);
  if (basis.secondary) accumulate(*basis.secondary);
  for (std::size_t x = 0; x < points; ++x)
    for (std::size_t y = 0; y < points; ++y) {
      const Extended h = H[x * points + y];
      const Extended lbd = -basis.primary.precise_at(0, x) * h / basis.primary.precise_at(0, y);
      m.H(x, y) = static_cast<double>(h);
      m.LBD(x, y) = static_cast<double>(lbd);
      m.L(x, y) = static_cast<double>((x == y ? 1.0L : 0.0L) + basis.ops.t_S * lbd);
    }
  return m;
}

}  // namespace bds::spectral
