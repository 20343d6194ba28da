#include <doctest.h>

#include <cmath>
#include <numeric>

#include "catalog.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "spectral.hpp"
#include "support/reference.hpp"

using namespace bds;

namespace {

chain::ChainOperators krawtchouk_half(chain::TimeStep step = chain::TimeStep::automatic()) {
  return chain::build({1.0, 0.5, 0.0}, {0.0, 0.5, 1.0}, chain::Lattice::finite(2), step);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::fabs(e));
  return m;
}

}  // namespace

TEST_SUITE("chain") {
  TEST_CASE("rate bound") {
    CHECK(chain::max_total_rate({1.0, 0.5, 0.0}, {0.0, 0.5, 1.0}, chain::Lattice::finite(2)) == 1.0);
    for (double a : {0.8, 1.5}) {
      const auto fam = catalog::validate({catalog::FamilyId::QCharlier, {{"a", a}, {"q", 0.5}}, {}});
      const auto ops = spectral::family_chain(fam, catalog::SetTag::Basic, {});
      CHECK(ops.rate_bound == doctest::Approx(std::max(a, 1.0)).epsilon(1e-12));
    }
    // Decaying rates with no known limit: the window max, inflated.
    const double bound = chain::max_total_rate({1.0, 0.5, 0.25, 0.125}, {0.0, 0.0, 0.0, 0.0},
                                               chain::Lattice::window(3, 0.0));
    CHECK(bound >= 1.0);
    CHECK(bound <= 1.05 + 1e-15);
  }

  TEST_CASE("Krawtchouk p=1/2, N=2 operators") {
    const auto ops = krawtchouk_half(chain::TimeStep::automatic(0.5));
    CHECK(ops.t_S == 0.5);
    const auto L = chain::L(ops);
    for (double d : L.diag) CHECK(d == 0.5);
    CHECK(ops.pi.values[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(ops.pi.values[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ops.pi.values[2] == doctest::Approx(0.25).epsilon(1e-15));
    const auto moved = chain::apply_L(ops, chain::Distribution::delta(3, 0));
    CHECK(moved.values == std::vector<double>{0.5, 0.5, 0.0});
  }

  TEST_CASE("step size above the bound is rejected") {
    try {
      krawtchouk_half(chain::TimeStep::explicit_value(2.0));
      FAIL("expected StepTooLarge");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::StepTooLarge);
    }
    CHECK_THROWS_AS(krawtchouk_half(chain::TimeStep::explicit_value(1.0)), Error);
    CHECK_NOTHROW(krawtchouk_half(chain::TimeStep::explicit_value(0.999)));
  }

  TEST_CASE("eigenvectors by recurrence") {
    const std::vector<double> birth{1.0, 0.5, 0.0}, death{0.0, 0.5, 1.0};
    const auto lat = chain::Lattice::finite(2);
    CHECK(chain::eigenvector_by_recurrence(birth, death, 0.0, lat) == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(chain::eigenvector_by_recurrence(birth, death, 1.0, lat) == std::vector<double>{1.0, 0.0, -1.0});
    CHECK(chain::eigenvector_by_recurrence(birth, death, 2.0, lat) == std::vector<double>{1.0, -1.0, 1.0});
    CHECK_THROWS_AS(chain::eigenvector_by_recurrence({0.0, 1.0, 0.0}, death, 1.0, lat), Error);
  }

  TEST_CASE("stochasticity, stationarity and factorisation across families") {
    for (const auto& pt : ref::finite_points()) {
      const auto fam = catalog::validate(pt.spec);
      CAPTURE(pt.label);
      const auto ops = spectral::family_chain(fam, catalog::SetTag::Basic, {});
      const std::size_t n = ops.lattice.points();

      CHECK(std::accumulate(ops.pi.values.begin(), ops.pi.values.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-13));
      for (double p : ops.pi.values) CHECK(p > 0.0);

      const auto Ld = oracle::to_dense(chain::L(ops));
      for (std::size_t y = 0; y < n; ++y) {
        double col = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
          CHECK(Ld(x, y) >= 0.0);
          col += Ld(x, y);
        }
        CHECK(col == doctest::Approx(1.0).epsilon(1e-14));
      }

      const auto after = chain::apply_L(ops, ops.pi);
      for (std::size_t x = 0; x < n; ++x) CHECK(std::fabs(after.values[x] - ops.pi.values[x]) < 1e-14);
      CHECK(max_abs(chain::apply_LBD(ops, ops.pi.values)) < 1e-13 * ops.rate_bound);

      // (L - I)/t_S is the generator.
      const auto G = oracle::to_dense(chain::LBD(ops));
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          CHECK(std::fabs((Ld(x, y) - (x == y ? 1.0 : 0.0)) / ops.t_S - G(x, y)) < 1e-12 * ops.rate_bound);

      // H = A^T A, and H~ has the same spectrum as H.
      const auto f = chain::build_H(ops);
      const auto A = oracle::to_dense(f.A);
      Matrix At(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) At(i, j) = A(j, i);
      CHECK(ref::max_abs_diff(At * A, oracle::to_dense(f.H)) < 1e-13 * ops.rate_bound);
      const auto sh = oracle::spectrum_symmetric_tridiagonal(f.H);
      const auto st = oracle::spectrum_tridiagonal(chain::Htilde(ops));
      for (std::size_t k = 0; k < n; ++k) CHECK(std::fabs(sh[k] - st[k]) < 1e-11 * ops.rate_bound);
      for (double e : sh) CHECK(e > -1e-12 * ops.rate_bound);
      // Spectrum of L stays in (-1, 1].
      CHECK(1.0 - ops.t_S * sh.back() > -1.0);
    }
  }

  TEST_CASE("truncated window records its tail") {
    const auto fam = catalog::validate({catalog::FamilyId::QCharlier, {{"a", 0.8}, {"q", 0.5}}, {}});
    const auto ops = spectral::family_chain(fam, catalog::SetTag::Basic, {});
    CHECK(ops.lattice.truncated);
    CHECK(ops.lattice.tail_mass < 1e-12);
    CHECK(ops.pi.total() == doctest::Approx(1.0).epsilon(1e-14));
    const auto forced = spectral::family_chain(fam, catalog::SetTag::Basic, {chain::TimeStep::automatic(), 1e-12, 3});
    CHECK(forced.lattice.last == 3);
    CHECK(forced.lattice.tail_mass > 0.0);
  }
}
