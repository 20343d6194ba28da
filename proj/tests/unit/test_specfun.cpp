#include <doctest.h>

#include <cmath>

#include "catalog.hpp"
#include "chain.hpp"
#include "errors.hpp"
#include "specfun.hpp"

using namespace bds;
using specfun::SeriesParam;
using specfun::SeriesSpec;

TEST_SUITE("specfun") {
  TEST_CASE("pochhammer") {
    CHECK(specfun::pochhammer(0.37, 0) == 1.0);
    CHECK(specfun::pochhammer(1.0, 4) == 24.0);
    CHECK(specfun::pochhammer(2.0, 3) == 24.0);
    CHECK(specfun::pochhammer(-2.0, 3) == 0.0);
  }

  TEST_CASE("q_pochhammer") {
    CHECK(specfun::q_pochhammer(0.8, 0.3, 0) == 1.0);
    CHECK(specfun::q_pochhammer(0.5, 0.5, 2) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(specfun::q_pochhammer(0.0, 0.7, 9) == 1.0);
    CHECK_THROWS_AS(specfun::q_pochhammer(0.5, 1.0, 2), Error);
  }

  TEST_CASE("q_pochhammer_inf against long products") {
    CHECK(specfun::q_pochhammer_inf(0.0, 0.4) == 1.0);
    double brute = 1.0;
    for (int j = 0; j < 60; ++j) brute *= 1.0 - 0.5 * std::pow(0.5, j);
    CHECK(std::fabs(specfun::q_pochhammer_inf(0.5, 0.5) / brute - 1.0) < 1e-15);
    const double finite = specfun::q_pochhammer(0.5, 0.5, 50);
    CHECK(std::fabs(specfun::q_pochhammer_inf(0.5, 0.5) / finite - 1.0) < 1e-15);
  }

  TEST_CASE("log forms agree with direct products") {
    const auto lp = specfun::log_q_pochhammer(3.0, 0.6, 5);
    CHECK(lp.value() == doctest::Approx(specfun::q_pochhammer(3.0, 0.6, 5)).epsilon(1e-13));
    const auto lo = specfun::log_pochhammer(-2.5, 4);
    CHECK(lo.value() == doctest::Approx(specfun::pochhammer(-2.5, 4)).epsilon(1e-13));
  }

  TEST_CASE("ordinary terminating series") {
    SeriesSpec trivial{{SeriesParam(0.0L), SeriesParam(0.0L, -3)}, {SeriesParam(0.0L, -5)}, 0.7L, 0, {}};
    CHECK(specfun::hyper_terminating(trivial) == 1.0);

    SeriesSpec kraw{{SeriesParam(0.0L, -1), SeriesParam(0.0L, -1)}, {SeriesParam(0.0L, -2)}, 2.0L, 1, {}};
    CHECK(std::fabs(specfun::hyper_terminating(kraw)) < 1e-15);

    SeriesSpec dead{{SeriesParam(0.0L, -1), SeriesParam(0.0L)}, {SeriesParam(0.0L, -4)}, 3.0L, 1, {}};
    CHECK(specfun::hyper_terminating(dead) == 1.0);
  }

  TEST_CASE("missing terminating parameter is rejected") {
    SeriesSpec bad{{SeriesParam(0.5L), SeriesParam(0.7L)}, {SeriesParam(1.5L)}, 1.0L, 2, {}};
    CHECK_THROWS_AS(specfun::hyper_terminating(bad), Error);
  }

  TEST_CASE("vanishing denominator is a pole") {
    SeriesSpec pole{{SeriesParam(0.0L, -3)}, {SeriesParam(0.0L, -1)}, 1.0L, 3, {}};
    try {
      specfun::hyper_terminating(pole);
      FAIL("expected a pole");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Pole);
    }
  }

  TEST_CASE("basic series matches the three-term recurrence") {
    const double q = 0.5;
    SeriesSpec s{{SeriesParam(1.0L, -1), SeriesParam(1.0L, -1)}, {SeriesParam(0.0L)}, -q * q, 1, q};
    const double series = specfun::q_hyper_terminating(s);
    const auto fam = catalog::validate({catalog::FamilyId::QCharlier, {{"a", 1.0}, {"q", q}}, {}});
    std::vector<double> birth, death;
    for (long x = 0; x <= 3; ++x) {
      const auto r = catalog::rates(fam, catalog::SetTag::Basic, x);
      birth.push_back(r.birth);
      death.push_back(r.death);
    }
    const auto rec = chain::eigenvector_by_recurrence(birth, death, 1.0 - q, chain::Lattice::window(3, 0.0));
    CHECK(std::fabs(series - rec[1]) < 1e-12);
  }

  TEST_CASE("every family's series is 1 at n=0 and at x=0") {
    for (const auto& info : catalog::families()) {
      catalog::FamilySpec spec{info.id, {}, {}};
      switch (info.id) {
        case catalog::FamilyId::Krawtchouk: spec.params = {{"p", 0.4}}; break;
        case catalog::FamilyId::Hahn:
        case catalog::FamilyId::DualHahn: spec.params = {{"a", 1.5}, {"b", 0.7}}; break;
        case catalog::FamilyId::Racah: spec.params = {{"a", 8.0}, {"b", 0.7}, {"d", 0.5}}; break;
        case catalog::FamilyId::AffineQKrawtchouk: spec.params = {{"p", 0.5}, {"q", 0.7}}; break;
        case catalog::FamilyId::QKrawtchouk: spec.params = {{"p", 0.5}, {"q", 0.7}}; break;
        case catalog::FamilyId::QuantumQKrawtchouk: spec.params = {{"p", 2.0 * std::pow(0.8, -5)}, {"q", 0.8}}; break;
        case catalog::FamilyId::QHahn:
        case catalog::FamilyId::DualQHahn: spec.params = {{"a", 0.3}, {"b", 0.6}, {"q", 0.7}}; break;
        case catalog::FamilyId::QRacah:
          spec.params = {{"a", 0.4 * std::pow(0.8, 5) * 0.5}, {"b", 0.6}, {"d", 0.5}, {"q", 0.8}};
          break;
        case catalog::FamilyId::AlSalamCarlitzII: spec.params = {{"a", 0.7}, {"q", 0.5}}; break;
        case catalog::FamilyId::QMeixner: spec.params = {{"b", 0.5}, {"c", 2.0}, {"q", 0.5}}; break;
        case catalog::FamilyId::QCharlier: spec.params = {{"a", 0.8}, {"q", 0.5}}; break;
        case catalog::FamilyId::DualBigQJacobi: spec.params = {{"a", 0.6}, {"b", 1.5}, {"c", -0.7}, {"q", 0.5}}; break;
        case catalog::FamilyId::DualBigQLaguerre: spec.params = {{"a", 0.6}, {"b", -0.7}, {"q", 0.5}}; break;
      }
      if (info.lattice == catalog::LatticeKind::Finite) spec.N = 5;
      const auto fam = catalog::validate(spec);
      CAPTURE(info.name);
      for (long x = 0; x <= 5; ++x) CHECK(catalog::polynomial(fam, catalog::SetTag::Basic, 0, x) == 1.0);
      for (unsigned n = 0; n <= 5; ++n)
        CHECK(catalog::polynomial(fam, catalog::SetTag::Basic, n, 0) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}
