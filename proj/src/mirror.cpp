#include "mirror.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace bds::mirror {
namespace {

constexpr double kRateTol = 1e-14;
constexpr double kParityTol = 1e-10;

Matrix dense(const Tridiagonal& t) {
  const std::size_t n = t.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = t.diag[i];
    if (i + 1 < n) {
      m(i + 1, i) = t.lower[i];
      m(i, i + 1) = t.upper[i];
    }
  }
  return m;
}

// Right multiplication by J reverses the column order.
Matrix times_J(const Matrix& a) {
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, a.cols() - 1 - j);
  return r;
}

}  // namespace

std::vector<double> reflect(const std::vector<double>& v) { return {v.rbegin(), v.rend()}; }

MirrorChain build_mirror(spectral::SpectralBasis basis) {
  const auto& ops = basis.ops;
  if (ops.lattice.truncated)
    throw Error(ErrorKind::NotMirrorSymmetric, "lattice", "mirror symmetry needs a finite lattice");
  const long N = ops.lattice.last;
  for (long x = 0; x <= N; ++x) {
    const double b = ops.birth[x];
    const double d = ops.death[N - x];
    if (std::fabs(d - b) > kRateTol * std::max(1.0, std::fabs(b)))
      throw Error(ErrorKind::NotMirrorSymmetric, "x=" + std::to_string(x), "D(N-x) differs from B(x)");
  }
  if (!basis.reflected) {
    for (unsigned n = 0; n <= static_cast<unsigned>(N); ++n) {
      const double parity = n % 2 == 0 ? 1.0 : -1.0;
      for (long x = 0; x <= N; ++x) {
        const double here = catalog::polynomial(basis.family, basis.chain, n, x);
        const double there = catalog::polynomial(basis.family, basis.chain, n, N - x);
        if (std::fabs(there - parity * here) > kParityTol * std::max(1.0, std::fabs(here)))
          throw Error(ErrorKind::NotMirrorSymmetric, "n=" + std::to_string(n) + ",x=" + std::to_string(x),
                      "eigenvector parity fails");
      }
    }
  }
  MirrorChain mc{std::move(basis), {}, {}};
  const auto& kappa = mc.base.primary.kappa;
  mc.kappa_S.resize(kappa.size());
  mc.kappa_M.resize(kappa.size());
  for (std::size_t n = 0; n < kappa.size(); ++n) {
    const bool even = n % 2 == 0;
    mc.kappa_S[n] = even ? kappa[n] : 0.0;
    mc.kappa_M[n] = even ? kappa[n] : -kappa[n];
  }
  return mc;
}

chain::Distribution apply_LM(const MirrorChain& mc, const chain::Distribution& dist) {
  chain::Distribution flipped = dist;
  flipped.values = reflect(dist.values);
  return chain::apply_L(mc.base.ops, flipped);
}

chain::Distribution apply_LS(const MirrorChain& mc, const chain::Distribution& dist) {
  const chain::Distribution a = chain::apply_L(mc.base.ops, dist);
  const chain::Distribution b = apply_LM(mc, dist);
  chain::Distribution out;
  out.values.resize(a.values.size());
  for (std::size_t x = 0; x < out.values.size(); ++x) out.values[x] = 0.5 * (a.values[x] + b.values[x]);
  out.tail_mass = 0.5 * (a.tail_mass + b.tail_mass);
  return out;
}

const std::vector<double>& eigensystem_LS(const MirrorChain& mc) { return mc.kappa_S; }

chain::Distribution evolve_LS(const MirrorChain& mc, const chain::Distribution& initial, long steps) {
  const auto& basis = mc.base;
  const spectral::ExpansionCoefficients c = spectral::expand(basis, initial);
  const std::size_t points = basis.points();
  std::vector<catalog::Extended> sum(points, 0.0L);
  for (std::size_t n = 0; n < c.c.size(); ++n) {
    if (mc.kappa_S[n] == 0.0 && steps > 0) continue;
    const catalog::Extended f = c.c[n] * spectral::kappa_power(basis.primary.kappa_precise[n], steps);
    if (f == 0) continue;
    for (std::size_t x = 0; x < points; ++x) sum[x] += f * basis.primary.precise_at(n, x);
  }
  chain::Distribution out;
  out.values.resize(points);
  for (std::size_t x = 0; x < points; ++x) {
    out.values[x] = static_cast<double>(basis.primary.precise_at(0, x) * sum[x]);
    if (out.values[x] < -1e-10) out.negative_probability = true;
  }
  return out;
}

Matrix LM_matrix(const MirrorChain& mc) { return times_J(dense(chain::L(mc.base.ops))); }

Matrix LS_matrix(const MirrorChain& mc) {
  const Matrix l = dense(chain::L(mc.base.ops));
  const Matrix lm = times_J(l);
  Matrix s(l.rows(), l.cols());
  for (std::size_t i = 0; i < s.data().size(); ++i) s.data()[i] = 0.5 * (l.data()[i] + lm.data()[i]);
  return s;
}

Matrix LBD_M_matrix(const MirrorChain& mc) { return times_J(dense(chain::LBD(mc.base.ops))); }

spectral::SpectralBasis dual_system(const spectral::SpectralBasis& basis) {
  const auto& ops = basis.ops;
  if (ops.lattice.truncated) throw Error(ErrorKind::Lattice, "lattice", "the dual system needs a finite lattice");
  std::vector<double> birth = reflect(ops.death);
  std::vector<double> death = reflect(ops.birth);
  chain::ChainOperators dual =
      chain::build(std::move(birth), std::move(death), ops.lattice, chain::TimeStep::explicit_value(ops.t_S));
  auto reflect_rows = [](const spectral::Branch& b) {
    spectral::Branch r = b;
    const std::size_t cols = b.vectors.cols();
    for (std::size_t n = 0; n < b.vectors.rows(); ++n)
      for (std::size_t x = 0; x < cols; ++x) {
        r.vectors(n, x) = b.vectors(n, cols - 1 - x);
        r.precise[n * cols + x] = b.precise_at(n, cols - 1 - x);
      }
    return r;
  };
  spectral::SpectralBasis out{basis.family,
                              basis.chain,
                              std::move(dual),
                              reflect_rows(basis.primary),
                              std::nullopt,
                              basis.truncation_residual,
                              basis.kernel_condition,
                              !basis.reflected};
  if (basis.secondary) out.secondary = reflect_rows(*basis.secondary);
  return out;
}

}  // namespace bds::mirror
