#include <doctest.h>

#include <cmath>

#include "catalog.hpp"
#include "chain.hpp"
#include "oracle.hpp"
#include "spectral.hpp"
#include "support/reference.hpp"

using namespace bds;
using catalog::SetTag;

namespace {

spectral::SpectralBasis krawtchouk_half() {
  const auto fam = catalog::validate({catalog::FamilyId::Krawtchouk, {{"p", 0.5}}, 2});
  return spectral::solve(fam, {chain::TimeStep::explicit_value(0.5)});
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("expansion coefficients") {
    const auto basis = krawtchouk_half();
    const auto cpi = spectral::expand(basis, basis.ops.pi);
    CHECK(std::fabs(static_cast<double>(cpi.c[0]) - 1.0) < 1e-15);
    for (std::size_t n = 1; n < cpi.c.size(); ++n) CHECK(std::fabs(static_cast<double>(cpi.c[n])) < 1e-15);
    for (std::size_t y = 0; y < 3; ++y) {
      const auto c = spectral::expand(basis, chain::Distribution::delta(3, y));
      CHECK(std::fabs(static_cast<double>(c.c[0]) - 1.0) < 1e-15);
      for (std::size_t n = 0; n < 3; ++n)
        CHECK(static_cast<double>(c.c[n]) ==
              doctest::Approx(basis.primary.vectors(n, y) / basis.primary.vectors(0, y)).epsilon(1e-14));
    }
  }

  TEST_CASE("evolution on Krawtchouk p=1/2, N=2") {
    const auto basis = krawtchouk_half();
    const auto start = chain::Distribution::delta(3, 0);
    const auto c = spectral::expand(basis, start);
    const auto zero = spectral::evolve_discrete(basis, c, 0);
    for (std::size_t x = 0; x < 3; ++x) CHECK(std::fabs(zero.values[x] - start.values[x]) < 1e-15);
    const auto one = spectral::evolve_discrete(basis, c, 1);
    const auto direct = chain::apply_L(basis.ops, start);
    for (std::size_t x = 0; x < 3; ++x) CHECK(std::fabs(one.values[x] - direct.values[x]) < 1e-15);
    const auto T2 = spectral::transition_matrix_discrete(basis, 2);
    CHECK(T2(0, 0) == doctest::Approx(0.375).epsilon(1e-14));
    const auto t0 = spectral::evolve_continuous(basis, c, 0.0);
    for (std::size_t x = 0; x < 3; ++x) CHECK(std::fabs(t0.values[x] - start.values[x]) < 1e-15);
    const auto far = spectral::evolve_continuous(basis, c, 60.0);
    for (std::size_t x = 0; x < 3; ++x) CHECK(std::fabs(far.values[x] - basis.ops.pi.values[x]) < 1e-14);
  }

  TEST_CASE("orthonormal eigenvectors and kernels against dense powers") {
    for (const auto& pt : ref::finite_points()) {
      const auto fam = catalog::validate(pt.spec);
      CAPTURE(pt.label);
      const auto basis = spectral::solve(fam);
      const std::size_t n = basis.points();
      const auto& V = basis.primary.vectors;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
          double dot = 0.0;
          for (std::size_t x = 0; x < n; ++x) dot += V(a, x) * V(b, x);
          CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) < 1e-12);
        }
      for (std::size_t k = 1; k < n; ++k) CHECK(basis.primary.E[k] > basis.primary.E[k - 1]);
      for (double kap : basis.primary.kappa) {
        CHECK(kap <= 1.0);
        CHECK(kap > -1.0);
      }

      CHECK(ref::max_abs_diff(spectral::transition_matrix_discrete(basis, 0), Matrix::identity(n)) < 1e-12);
      const auto L = oracle::to_dense(chain::L(basis.ops));
      CHECK(ref::max_abs_diff(spectral::transition_matrix_discrete(basis, 1), L) < 1e-11);
      CHECK(ref::max_abs_diff(spectral::transition_matrix_discrete(basis, 7), oracle::dense_power(L, 7)) < 1e-10);
      CHECK(ref::max_abs_diff(spectral::transition_matrix_continuous(basis, 0.0), Matrix::identity(n)) < 1e-12);

      const auto c = spectral::expand(basis, chain::Distribution::delta(n, n / 2));
      const auto d = spectral::evolve_discrete(basis, c, 13);
      CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-11));
      CHECK_FALSE(d.negative_probability);
    }
  }

  TEST_CASE("continuous and discrete evolution agree as the step shrinks") {
    const auto fam = catalog::validate({catalog::FamilyId::Hahn, {{"a", 1.5}, {"b", 0.7}}, 6});
    const double t = 0.4;
    const auto exact = [&] {
      const auto basis = spectral::solve(fam);
      return spectral::evolve_continuous(basis, spectral::expand(basis, chain::Distribution::delta(7, 0)), t);
    }();
    auto error_at = [&](double ts) {
      const auto basis = spectral::solve(fam, {chain::TimeStep::explicit_value(ts)});
      const long steps = std::lround(t / ts);
      const auto d = spectral::evolve_discrete(basis, spectral::expand(basis, chain::Distribution::delta(7, 0)), steps);
      double e = 0.0;
      for (std::size_t x = 0; x < 7; ++x) e = std::max(e, std::fabs(d.values[x] - exact.values[x]));
      return e;
    };
    const double e1 = error_at(0.004), e2 = error_at(0.002);
    CHECK(e2 < e1);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.1));
  }

  TEST_CASE("two-set families resolve the identity on their window") {
    for (const auto& pt : ref::semi_infinite_points()) {
      const auto fam = catalog::validate(pt.spec);
      CAPTURE(pt.label);
      const auto basis = spectral::solve(fam);
      CHECK(basis.secondary.has_value() == fam.has_minus_set());
      const auto I = spectral::transition_matrix_discrete(basis, 0);
      const std::size_t n = basis.points();
      const std::size_t inner = 2 * n / 3;
      double off = 0.0, diag = 0.0;
      for (std::size_t x = 0; x < inner; ++x)
        for (std::size_t y = 0; y < inner; ++y)
          (x == y ? diag : off) = std::max(x == y ? diag : off, std::fabs(I(x, y) - (x == y ? 1.0 : 0.0)));
      CHECK(off < 1e-8);
      CHECK(diag < 1e-8);
      const auto c = spectral::expand(basis, chain::Distribution::delta(n, 0));
      const auto d = spectral::evolve_discrete(basis, c, 20);
      double window = 0.0;
      for (double v : d.values) window += v;
      CHECK(window == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("kappa powers") {
    CHECK(spectral::kappa_power(0.5, 0) == 1.0);
    CHECK(spectral::kappa_power(-0.5, 3) == -0.125);
    CHECK(spectral::kappa_power(0.0, 0) == 1.0);
  }
}
