#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "catalog.hpp"
#include "errors.hpp"
#include "export.hpp"

namespace bds::verify {
namespace {

using catalog::SetTag;

constexpr double kOrthoFinite = 1e-10;
constexpr double kOrthoTruncated = 1e-8;
constexpr double kEigenResidual = 1e-10;
constexpr double kSpectrumRel = 1e-8;
constexpr double kSemidefinite = 1e-10;
constexpr double kStepBound = 1e-10;
constexpr double kKappaBound = 1e-12;
constexpr double kStationary = 1e-12;
constexpr double kIdentityFinite = 1e-9;
constexpr double kIdentityTruncated = 1e-8;
constexpr double kPowerAbs = 1e-9;
// Kernel entries (x, y) carry rounding of order eps * g(x) / g(y). On a
// truncated window the kernel tolerances grow by this multiple of
// eps * max g / min g, and that floor is itself capped.
constexpr double kConditionSlack = 16.0;
constexpr double kConditionCap = 1e-5;
constexpr double kPValueFloor = 1e-3;
constexpr double kGeneratorStep = 1e-6;
constexpr double kGeneratorTol = 1e-5;
constexpr unsigned kExtendedModes = 16;
constexpr double kExtendedTailFloor = 1e-20;
constexpr long kExtendedMax = 4000;
constexpr long kPowers[] = {1, 2, 5, 10, 50};
constexpr unsigned kResidualModesTruncated = 30;

void add(VerifyReport& r, std::string name, double value, double tol, bool asserted = true) {
  const bool ok = !asserted || (std::isfinite(value) && value <= tol);
  r.checks.push_back({std::move(name), value, tol, asserted, ok});
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

spectral::SpectralBasis corrupted(const spectral::SpectralBasis& basis, double factor) {
  spectral::SpectralBasis b = basis;
  if (b.primary.vectors.rows() > 1) {
    const double s = std::sqrt(factor);
    for (std::size_t x = 0; x < b.points(); ++x) {
      b.primary.vectors(1, x) *= s;
      b.primary.precise[b.points() + x] *= s;
    }
    b.primary.log_dn2[1] += std::log(factor);
  }
  return b;
}

std::vector<std::vector<double>> rows_of(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t n = 0; n < m.rows(); ++n)
    for (std::size_t x = 0; x < m.cols(); ++x) out[n][x] = m(n, x);
  return out;
}

void orthogonality_checks(VerifyReport& r, const spectral::SpectralBasis& basis, std::optional<double> corrupt) {
  const auto& fam = basis.family;
  if (!basis.ops.lattice.truncated) {
    const auto v = rows_of(basis.primary.vectors);
    add(r, "orthonormality", gram_error(v, v, false), kOrthoFinite);
    return;
  }
  const SetTag chain = basis.chain;
  const auto count = static_cast<unsigned>(std::min<std::size_t>(kExtendedModes, basis.primary.E.size()));
  auto u = extended_vectors(fam, chain, chain, count, basis.ops.lattice.last);
  if (corrupt && u.size() > 1)
    for (double& x : u[1]) x *= std::sqrt(*corrupt);
  add(r, "orthonormality", gram_error(u, u, false), kOrthoTruncated);
  if (basis.secondary) {
    const auto count2 = static_cast<unsigned>(std::min<std::size_t>(kExtendedModes, basis.secondary->E.size()));
    const auto w = extended_vectors(fam, chain, catalog::other(chain), count2, basis.ops.lattice.last);
    add(r, "orthonormality_second_set", gram_error(w, w, false), kOrthoTruncated);
    add(r, "cross_orthogonality", gram_error(u, w, true), kOrthoTruncated);
  }
}

void eigen_checks(VerifyReport& r, const spectral::SpectralBasis& basis) {
  const auto& fam = basis.family;
  const std::size_t points = basis.points();
  std::size_t modes = basis.primary.E.size();
  if (basis.ops.lattice.truncated) modes = std::min<std::size_t>(modes, kResidualModesTruncated);
  double worst = 0.0;
  for (std::size_t n = 0; n < modes; ++n) {
    std::vector<double> p(points);
    for (std::size_t x = 0; x < points; ++x)
      p[x] = catalog::polynomial(fam, basis.chain, static_cast<unsigned>(n), static_cast<long>(x));
    worst = std::max(worst, eigen_residual(basis.ops, p, basis.primary.E[n]));
  }
  add(r, "eigen_residual", worst, kEigenResidual);

  if (basis.secondary) {
    const auto H = chain::build_H(basis.ops).H;
    const std::size_t rows = basis.ops.lattice.truncated ? points - 1 : points;
    const std::size_t modes2 = std::min<std::size_t>(basis.secondary->E.size(), kResidualModesTruncated);
    double worst2 = 0.0;
    for (std::size_t n = 0; n < modes2; ++n) {
      std::vector<double> v(points);
      for (std::size_t x = 0; x < points; ++x) v[x] = basis.secondary->vectors(n, x);
      const auto Hv = H.apply(v);
      double res = 0.0;
      for (std::size_t x = 0; x < rows; ++x) res = std::max(res, std::fabs(Hv[x] - basis.secondary->E[n] * v[x]));
      worst2 = std::max(worst2, res / std::max(1.0, max_abs(v)));
    }
    add(r, "eigen_residual_second_set", worst2, kEigenResidual);
  }
}

void spectrum_checks(VerifyReport& r, const spectral::SpectralBasis& basis) {
  const auto Ht = chain::Htilde(basis.ops);
  const auto numeric = oracle::spectrum_tridiagonal(Ht);
  r.oracle.spectrum_numeric = numeric;

  std::vector<double> closed = basis.primary.E;
  if (basis.secondary) closed.insert(closed.end(), basis.secondary->E.begin(), basis.secondary->E.end());
  std::sort(closed.begin(), closed.end());
  r.oracle.spectrum_closed = closed;

  if (!basis.ops.lattice.truncated) {
    const double scale = max_abs(closed);
    double worst = 0.0;
    if (numeric.size() != closed.size()) {
      worst = std::numeric_limits<double>::infinity();
    } else {
      for (std::size_t i = 0; i < closed.size(); ++i)
        worst = std::max(worst, std::fabs(numeric[i] - closed[i]) / std::max(std::fabs(closed[i]), scale));
    }
    add(r, "spectrum", worst, kSpectrumRel);
  } else {
    // Low-lying window eigenvalues against the nearest closed-form value.
    double worst = 0.0;
    const std::size_t k = std::min<std::size_t>(5, numeric.size());
    for (std::size_t i = 0; i < k; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double e : closed) best = std::min(best, std::fabs(e - numeric[i]));
      worst = std::max(worst, best);
    }
    add(r, "spectrum_truncated", worst, 0.0, false);
  }

  add(r, "semidefinite", std::max(0.0, -numeric.front()), kSemidefinite);
  const auto step = oracle::spectrum_tridiagonal(chain::L(basis.ops));
  add(r, "step_spectrum_bound", std::max(0.0, std::max(std::fabs(step.front()), std::fabs(step.back())) - 1.0),
      kStepBound);

  double kappa_excess = 0.0;
  auto scan = [&](const spectral::Branch& b) {
    for (double k : b.kappa) kappa_excess = std::max(kappa_excess, std::fabs(k) - 1.0);
  };
  scan(basis.primary);
  if (basis.secondary) scan(*basis.secondary);
  add(r, "kappa_bound", std::max(0.0, kappa_excess), kKappaBound);
}

void kernel_checks(VerifyReport& r, const spectral::SpectralBasis& basis) {
  const auto& ops = basis.ops;
  const bool truncated = ops.lattice.truncated;
  const std::size_t points = basis.points();

  const auto moved = chain::apply_L(ops, ops.pi);
  double stationary = 0.0;
  for (std::size_t x = 0; x < points; ++x) stationary = std::max(stationary, std::fabs(moved.values[x] - ops.pi.values[x]));
  add(r, "stationarity", stationary, kStationary + ops.lattice.tail_mass);

  double allowance = 0.0;
  if (truncated) {
    const double floor = static_cast<double>(std::numeric_limits<catalog::Extended>::epsilon()) * basis.kernel_condition;
    add(r, "kernel_condition", floor, kConditionCap);
    allowance = kConditionSlack * floor;
  }

  const auto id = identity_residual(spectral::transition_matrix_discrete(basis, 0), truncated);
  if (truncated) {
    add(r, "identity_off_diagonal", id.off_diagonal, std::max(kIdentityTruncated, allowance));
    add(r, "identity_diagonal_inner", id.diagonal_inner, std::max(kIdentityTruncated, allowance));
    add(r, "identity_diagonal_full", id.diagonal, 0.0, false);
  } else {
    add(r, "identity", std::max(id.off_diagonal, id.diagonal), kIdentityFinite);
  }

  // A truncated window loses every path that steps past the cutoff, so the
  // window power falls short of the true kernel by at most the column's lost
  // mass.
  const Matrix L = oracle::to_dense(chain::L(ops));
  double excess = 0.0;
  for (long steps : kPowers) {
    const Matrix dense = oracle::dense_power(L, steps);
    const Matrix closed = spectral::transition_matrix_discrete(basis, steps);
    oracle::compare(r.oracle, closed, dense);
    for (std::size_t y = 0; y < points; ++y) {
      double lost = 0.0;
      if (truncated) {
        double col = 0.0;
        for (std::size_t x = 0; x < points; ++x) col += dense(x, y);
        lost = std::max(0.0, 1.0 - col);
        r.oracle.tail_bound_used = std::max(r.oracle.tail_bound_used, lost);
      }
      for (std::size_t x = 0; x < points; ++x)
        excess = std::max(excess, std::fabs(closed(x, y) - dense(x, y)) - lost);
    }
  }
  add(r, "oracle_power", std::max(0.0, excess), std::max(kPowerAbs, allowance));
}

void full_checks(VerifyReport& r, const spectral::SpectralBasis& basis, const VerifyOptions& options) {
  const auto& ops = basis.ops;
  const auto start = chain::Distribution::delta(basis.points(), 0);
  const auto coeffs = spectral::expand(basis, start);

  const auto sim = oracle::simulate(ops, 0, options.walk_steps, options.samples, options.seed);
  const auto expected = spectral::evolve_discrete(basis, coeffs, options.walk_steps);
  const auto chi = oracle::chi_square(sim.counts, sim.tail_events, expected, sim.samples);
  r.oracle.chi_square = chi;
  r.checks.push_back({"monte_carlo_p_value", chi.p_value, kPValueFloor, true, chi.p_value > kPValueFloor});

  // Forward difference in units of the fastest rate.
  const double h = kGeneratorStep / ops.rate_bound;
  const auto later = spectral::evolve_continuous(basis, coeffs, h);
  const auto gen = chain::apply_LBD(ops, start.values);
  double worst = 0.0;
  for (std::size_t x = 0; x < basis.points(); ++x)
    worst = std::max(worst, std::fabs((later.values[x] - start.values[x]) / h - gen[x]) / ops.rate_bound);
  add(r, "generator_consistency", worst, kGeneratorTol);
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<std::string> VerifyReport::failing() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

IdentityResidual identity_residual(const Matrix& K, bool truncated) {
  IdentityResidual r;
  const std::size_t n = K.rows();
  const std::size_t inner = truncated ? (2 * n + 2) / 3 : n;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) {
        const double e = std::fabs(K(x, x) - 1.0);
        r.diagonal = std::max(r.diagonal, e);
        if (x < inner) r.diagonal_inner = std::max(r.diagonal_inner, e);
      } else {
        r.off_diagonal = std::max(r.off_diagonal, std::fabs(K(x, y)));
      }
    }
  return r;
}

std::vector<std::vector<double>> extended_vectors(const catalog::ValidatedFamily& fam, SetTag chain, SetTag set,
                                                  unsigned count, long window_last) {
  long last = std::max<long>(64, 4 * window_last);
  for (;;) {
    std::vector<std::vector<double>> out;
    double tail = 0.0;
    for (unsigned n = 0; n < count; ++n) {
      out.push_back(spectral::eigenvector(fam, chain, set, n, last));
      const auto& v = out.back();
      for (std::size_t x = v.size() - v.size() / 8; x < v.size(); ++x) tail = std::max(tail, std::fabs(v[x]));
    }
    if (fam.finite() || tail < kExtendedTailFloor || last >= kExtendedMax) return out;
    last = std::min(2 * last, kExtendedMax);
  }
}

double gram_error(const std::vector<std::vector<double>>& u, const std::vector<std::vector<double>>& v, bool cross) {
  double worst = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n)
    for (std::size_t m = 0; m < v.size(); ++m) {
      double s = 0.0;
      const std::size_t len = std::min(u[n].size(), v[m].size());
      for (std::size_t x = 0; x < len; ++x) s += u[n][x] * v[m][x];
      const double target = (!cross && n == m) ? 1.0 : 0.0;
      worst = std::max(worst, std::fabs(s - target));
    }
  return worst;
}

double eigen_residual(const chain::ChainOperators& ops, const std::vector<double>& p, double E) {
  const auto Ht = chain::Htilde(ops);
  const auto Hp = Ht.apply(p);
  const std::size_t rows = ops.lattice.truncated ? p.size() - 1 : p.size();
  double res = 0.0;
  for (std::size_t x = 0; x < rows; ++x) res = std::max(res, std::fabs(Hp[x] - E * p[x]));
  return res / std::max(1.0, max_abs(p));
}

VerifyReport run(const spectral::SpectralBasis& input, const VerifyOptions& options) {
  if (options.corrupt_dn2 && !(*options.corrupt_dn2 > 0.0))
    throw Error(ErrorKind::Param, "corrupt_dn2", "corruption factor must be positive");
  const spectral::SpectralBasis basis = options.corrupt_dn2 ? corrupted(input, *options.corrupt_dn2) : input;
  VerifyReport r;
  orthogonality_checks(r, basis, options.corrupt_dn2);
  eigen_checks(r, basis);
  spectrum_checks(r, basis);
  kernel_checks(r, basis);
  if (options.level == Level::Full) full_checks(r, basis, options);
  return r;
}

nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"value", io::number_json(c.value)},
                      {"tolerance", c.tolerance},
                      {"asserted", c.asserted},
                      {"passed", c.passed}});
  return {{"passed", r.passed()}, {"failing", r.failing()}, {"checks", checks}, {"oracle", io::to_json(r.oracle)}};
}

nlohmann::json residual_summary(const spectral::SpectralBasis& basis) {
  const auto& ops = basis.ops;
  const auto moved = chain::apply_L(ops, ops.pi);
  double stationary = 0.0;
  for (std::size_t x = 0; x < basis.points(); ++x)
    stationary = std::max(stationary, std::fabs(moved.values[x] - ops.pi.values[x]));
  const auto id = identity_residual(spectral::transition_matrix_discrete(basis, 0), ops.lattice.truncated);
  nlohmann::json j = {{"stationarity", stationary},
                      {"identity_off_diagonal", id.off_diagonal},
                      {"identity_diagonal", id.diagonal},
                      {"identity_diagonal_inner", id.diagonal_inner},
                      {"mode_truncation", basis.truncation_residual},
                      {"kernel_condition", io::number_json(basis.kernel_condition)}};
  if (!ops.lattice.truncated) {
    const auto v = rows_of(basis.primary.vectors);
    j["orthonormality"] = gram_error(v, v, false);
  }
  return j;
}

}  // namespace bds::verify
