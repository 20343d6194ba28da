#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "catalog.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "mirror.hpp"
#include "oracle.hpp"
#include "spectral.hpp"

using namespace bds;
using catalog::FamilyId;
using catalog::SetTag;

namespace {

spectral::SpectralBasis basis_of(FamilyId id, std::map<std::string, double> params, int N) {
  return spectral::solve(catalog::validate({id, std::move(params), N}));
}

chain::Distribution random_distribution(std::size_t n) {
  chain::Distribution d;
  for (std::size_t x = 0; x < n; ++x) d.values.push_back(1.0 + std::sin(3.0 * x + 1.0));
  double s = 0.0;
  for (double v : d.values) s += v;
  for (double& v : d.values) v /= s;
  return d;
}

}  // namespace

TEST_SUITE("mirror") {
  TEST_CASE("Krawtchouk p=1/2 is mirror symmetric") {
    const auto mc = mirror::build_mirror(basis_of(FamilyId::Krawtchouk, {{"p", 0.5}}, 2));
    CHECK(mc.kappa_S == std::vector<double>{1.0, 0.0, 0.0});
  }

  TEST_CASE("asymmetric rates are rejected") {
    try {
      mirror::build_mirror(basis_of(FamilyId::Krawtchouk, {{"p", 0.3}}, 4));
      FAIL("expected NotMirrorSymmetric");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotMirrorSymmetric);
    }
    const auto semi = spectral::solve(catalog::validate({FamilyId::QCharlier, {{"a", 0.8}, {"q", 0.5}}, {}}));
    CHECK_THROWS_AS(mirror::build_mirror(semi), Error);
  }

  TEST_CASE("Hahn a=b has odd polynomials and vanishing odd kappa_S") {
    const auto fam = catalog::validate({FamilyId::Hahn, {{"a", 1.0}, {"b", 1.0}}, 4});
    for (long x = 0; x <= 4; ++x)
      CHECK(catalog::polynomial(fam, SetTag::Basic, 1, 4 - x) ==
            doctest::Approx(-catalog::polynomial(fam, SetTag::Basic, 1, x)));
    const auto mc = mirror::build_mirror(spectral::solve(fam));
    CHECK(mc.kappa_S[1] == 0.0);
    CHECK(mc.kappa_S[3] == 0.0);
    CHECK(mc.kappa_S[2] == mc.base.primary.kappa[2]);
  }

  TEST_CASE("operator identities") {
    for (double a : {1.0, 2.5}) {
      const auto mc = mirror::build_mirror(basis_of(FamilyId::Hahn, {{"a", a}, {"b", a}}, 6));
      const std::size_t n = 7;
      const auto d = random_distribution(n);

      // L^M L^M d = L (J L J) d.
      const auto twice = mirror::apply_LM(mc, mirror::apply_LM(mc, d));
      chain::Distribution jd = d;
      jd.values = mirror::reflect(d.values);
      auto ljd = chain::apply_L(mc.base.ops, jd);
      ljd.values = mirror::reflect(ljd.values);
      const auto expected = chain::apply_L(mc.base.ops, ljd);
      for (std::size_t x = 0; x < n; ++x) CHECK(std::fabs(twice.values[x] - expected.values[x]) < 1e-15);

      // (I + J)(I - J) = 0.
      chain::Distribution anti;
      for (std::size_t x = 0; x < n; ++x) anti.values.push_back(d.values[x] - d.values[n - 1 - x]);
      for (double v : mirror::apply_LS(mc, anti).values) CHECK(std::fabs(v) < 1e-16);

      // Closed-form L^S evolution matches repeated application.
      chain::Distribution stepped = d;
      for (long l = 0; l < 9; ++l) stepped = mirror::apply_LS(mc, stepped);
      const auto closed = mirror::evolve_LS(mc, d, 9);
      for (std::size_t x = 0; x < n; ++x) CHECK(std::fabs(closed.values[x] - stepped.values[x]) < 1e-14);
      const auto same = mirror::evolve_LS(mc, d, 0);
      for (std::size_t x = 0; x < n; ++x) CHECK(std::fabs(same.values[x] - d.values[x]) < 1e-15);

      // Spectra of L^S and L^M.
      auto expect_S = mc.kappa_S;
      auto expect_M = mc.kappa_M;
      std::sort(expect_S.begin(), expect_S.end());
      std::sort(expect_M.begin(), expect_M.end());
      const auto got_S = oracle::spectrum_similar_symmetric(mirror::LS_matrix(mc), mc.base.ops.phi0);
      const auto got_M = oracle::spectrum_similar_symmetric(mirror::LM_matrix(mc), mc.base.ops.phi0);
      for (std::size_t k = 0; k < n; ++k) {
        CHECK(std::fabs(got_S[k] - expect_S[k]) < 1e-13);
        CHECK(std::fabs(got_M[k] - expect_M[k]) < 1e-13);
      }
    }
  }

  TEST_CASE("accelerated chain converges at least as fast") {
    const auto mc = mirror::build_mirror(basis_of(FamilyId::Krawtchouk, {{"p", 0.5}}, 8));
    const auto start = chain::Distribution::delta(9, 0);
    const auto plain = spectral::evolve_discrete(mc.base, spectral::expand(mc.base, start), 10);
    const auto fast = mirror::evolve_LS(mc, start, 10);
    double dp = 0.0, df = 0.0;
    for (std::size_t x = 0; x < 9; ++x) {
      dp += std::fabs(plain.values[x] - mc.base.ops.pi.values[x]);
      df += std::fabs(fast.values[x] - mc.base.ops.pi.values[x]);
    }
    CHECK(df <= dp);
  }

  TEST_CASE("dual system reflects the rates") {
    const auto basis = basis_of(FamilyId::Krawtchouk, {{"p", 0.3}}, 3);
    const auto dual = mirror::dual_system(basis);
    for (long x = 0; x <= 3; ++x) {
      CHECK(dual.ops.birth[x] == basis.ops.death[3 - x]);
      CHECK(dual.ops.death[x] == basis.ops.birth[3 - x]);
    }
    const auto a = oracle::spectrum_tridiagonal(chain::Htilde(basis.ops));
    const auto b = oracle::spectrum_tridiagonal(chain::Htilde(dual.ops));
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::fabs(a[k] - b[k]) < 1e-13);
    const auto T = spectral::transition_matrix_discrete(dual, 3);
    const auto direct = oracle::dense_power(oracle::to_dense(chain::L(dual.ops)), 3);
    for (std::size_t i = 0; i < T.data().size(); ++i) CHECK(std::fabs(T.data()[i] - direct.data()[i]) < 1e-13);
  }
}
