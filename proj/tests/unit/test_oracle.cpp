#include <doctest.h>

#include <cmath>

#include "catalog.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "spectral.hpp"

using namespace bds;

namespace {

chain::ChainOperators krawtchouk_half() {
  return chain::build({1.0, 0.5, 0.0}, {0.0, 0.5, 1.0}, chain::Lattice::finite(2), chain::TimeStep::explicit_value(0.5));
}

chain::Distribution dist(std::vector<double> v) {
  chain::Distribution d;
  d.values = std::move(v);
  return d;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("dense powers of L") {
    const auto L = oracle::to_dense(chain::L(krawtchouk_half()));
    const auto I = oracle::dense_power(L, 0);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(I(i, j) == (i == j ? 1.0 : 0.0));
    CHECK(oracle::dense_power(L, 1).data() == L.data());
    CHECK(oracle::dense_power(L, 2)(0, 0) == 0.375);
  }

  TEST_CASE("tridiagonal spectra") {
    Tridiagonal t{{-1.0, -1.0}, {2.0, 2.0, 2.0}, {-1.0, -1.0}};
    const auto s = oracle::spectrum_symmetric_tridiagonal(t);
    CHECK(s[0] == doctest::Approx(2.0 - std::sqrt(2.0)));
    CHECK(s[1] == doctest::Approx(2.0));
    CHECK(s[2] == doctest::Approx(2.0 + std::sqrt(2.0)));
    const auto h = oracle::spectrum_tridiagonal(chain::Htilde(krawtchouk_half()));
    CHECK(std::fabs(h[0]) < 1e-15);
    CHECK(h[1] == doctest::Approx(1.0));
    CHECK(h[2] == doctest::Approx(2.0));
  }

  TEST_CASE("simulation starts at its start and does not depend on thread count") {
    const auto ops = krawtchouk_half();
    const auto zero = oracle::simulate(ops, 1, 0, 1000, 7, 1);
    CHECK(zero.counts == std::vector<std::uint64_t>{0, 1000, 0});
    const auto a = oracle::simulate(ops, 0, 10, 20000, 42, 1);
    const auto b = oracle::simulate(ops, 0, 10, 20000, 42, 4);
    const auto c = oracle::simulate(ops, 0, 10, 20000, 42, 0);
    CHECK(a.counts == b.counts);
    CHECK(a.counts == c.counts);
    const auto other = oracle::simulate(ops, 0, 10, 20000, 43, 1);
    CHECK(a.counts != other.counts);
  }

  TEST_CASE("walks match the closed form") {
    const auto fam = catalog::validate({catalog::FamilyId::Krawtchouk, {{"p", 0.5}}, 2});
    const auto basis = spectral::solve(fam, {chain::TimeStep::explicit_value(0.5)});
    const auto expected = spectral::evolve_discrete(basis, spectral::expand(basis, chain::Distribution::delta(3, 0)), 10);
    const auto sim = oracle::simulate(basis.ops, 0, 10, 1000000, 1);
    const auto chi = oracle::chi_square(sim.counts, sim.tail_events, expected, sim.samples);
    CHECK(chi.p_value > 0.001);
  }

  TEST_CASE("chi-square") {
    const auto expected = dist({0.25, 0.5, 0.25});
    const auto exact = oracle::chi_square({250, 500, 250}, 0, expected, 1000);
    CHECK(exact.statistic == 0.0);
    CHECK(exact.p_value == 1.0);
    CHECK(exact.dof == 2);
    const auto off = oracle::chi_square({300, 450, 250}, 0, expected, 1000);
    CHECK(off.statistic == doctest::Approx(50.0 * 50.0 / 250.0 + 50.0 * 50.0 / 500.0));
    CHECK(off.p_value < 1e-3);
    try {
      oracle::chi_square({1000}, 0, dist({1.0}), 1000);
      FAIL("expected DegenerateBins");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateBins);
    }
  }

  TEST_CASE("element-wise comparison") {
    oracle::OracleReport r;
    oracle::compare(r, std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.5});
    CHECK(r.max_abs_err == 0.5);
    CHECK(r.max_rel_err == doctest::Approx(0.2));
  }
}
