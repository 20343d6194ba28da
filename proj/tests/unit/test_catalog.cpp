#include <doctest.h>

#include <cmath>
#include <set>

#include "catalog.hpp"
#include "errors.hpp"
#include "support/reference.hpp"

using namespace bds;
using catalog::FamilyId;
using catalog::SetTag;

namespace {

catalog::ValidatedFamily make(FamilyId id, std::map<std::string, double> params, std::optional<int> N = {}) {
  return catalog::validate({id, std::move(params), N});
}

ErrorKind kind_of(const std::function<void()>& f, std::string* subject = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (subject) *subject = e.subject();
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("catalog") {
  TEST_CASE("fifteen families with unique names that resolve") {
    CHECK(catalog::families().size() == 15);
    std::set<std::string_view> names;
    for (const auto& f : catalog::families()) {
      names.insert(f.name);
      CHECK(catalog::family_from_name(f.name) == f.id);
    }
    CHECK(names.size() == 15);
    CHECK(catalog::family_from_name("Dual-Big_Q Laguerre") == FamilyId::DualBigQLaguerre);
    CHECK_FALSE(catalog::family_from_name("meixner").has_value());
  }

  TEST_CASE("validation") {
    CHECK_NOTHROW(make(FamilyId::Krawtchouk, {{"p", 0.5}}, 2));
    std::string subject;
    CHECK(kind_of([] { make(FamilyId::Krawtchouk, {{"p", 1.0}}, 2); }, &subject) == ErrorKind::Param);
    CHECK(subject == "p");
    const double q = 0.6, d = 0.5;
    CHECK(kind_of([&] { make(FamilyId::QRacah, {{"a", 0.01}, {"b", q * d}, {"d", d}, {"q", q}}, 3); }, &subject) ==
          ErrorKind::Param);
    CHECK(subject == "b");
    CHECK(kind_of([] { make(FamilyId::Krawtchouk, {{"p", 0.5}}); }) == ErrorKind::Param);
    CHECK(kind_of([] { make(FamilyId::QCharlier, {{"a", 0.5}, {"q", 0.5}}, 4); }) == ErrorKind::Param);
    CHECK(kind_of([] { make(FamilyId::Krawtchouk, {{"p", 0.5}, {"z", 1.0}}, 2); }) == ErrorKind::Param);
    CHECK(kind_of([] { make(FamilyId::Racah, {{"a", 9.0}, {"b", 0.5}, {"c", -3.0}, {"d", 0.5}}, 3); }) ==
          ErrorKind::Param);
  }

  TEST_CASE("rates at the boundary") {
    const auto k = make(FamilyId::Krawtchouk, {{"p", 0.5}}, 2);
    auto r0 = catalog::rates(k, SetTag::Basic, 0);
    CHECK(r0.birth == 1.0);
    CHECK(r0.death == 0.0);
    auto r2 = catalog::rates(k, SetTag::Basic, 2);
    CHECK(r2.birth == 0.0);
    CHECK(r2.death == 1.0);
    const auto c = make(FamilyId::QCharlier, {{"a", 0.8}, {"q", 0.5}});
    auto rc = catalog::rates(c, SetTag::Basic, 0);
    CHECK(rc.birth == doctest::Approx(0.8));
    CHECK(rc.death == 0.0);
  }

  TEST_CASE("eigenvalues as printed") {
    const auto h = make(FamilyId::Hahn, {{"a", 1.5}, {"b", 0.7}}, 6);
    for (unsigned n = 0; n <= 6; ++n)
      CHECK(catalog::eigenvalue(h, SetTag::Basic, n) == doctest::Approx(n * (n + 1.5 + 0.7 - 1.0)));
    const auto m = make(FamilyId::QMeixner, {{"b", 0.5}, {"c", 2.0}, {"q", 0.5}});
    CHECK(catalog::eigenvalue(m, SetTag::Basic, 0) == 0.0);
    CHECK(catalog::second_eigenvalue(m, SetTag::Basic, 0) == doctest::Approx(3.0));
  }

  TEST_CASE("sinusoidal coordinate") {
    const auto dh = make(FamilyId::DualHahn, {{"a", 1.5}, {"b", 0.7}}, 6);
    const double q = 0.7, d = 0.5;
    const auto qr = make(FamilyId::QRacah, {{"a", 0.2 * std::pow(q, 6) * d}, {"b", 0.6}, {"d", d}, {"q", q}}, 6);
    for (long x = 0; x <= 6; ++x) {
      CHECK(catalog::eta(dh, x) == doctest::Approx(x * (x + 1.5 + 0.7 - 1.0)));
      CHECK(catalog::eta(qr, x) == doctest::Approx((std::pow(q, -x) - 1.0) * (1.0 - d * std::pow(q, x))));
    }
  }

  TEST_CASE("Krawtchouk polynomials at p=1/2, N=2") {
    const auto k = make(FamilyId::Krawtchouk, {{"p", 0.5}}, 2);
    CHECK(catalog::polynomial(k, SetTag::Basic, 1, 0) == doctest::Approx(1.0));
    CHECK(std::fabs(catalog::polynomial(k, SetTag::Basic, 1, 1)) < 1e-15);
    CHECK(catalog::polynomial(k, SetTag::Basic, 1, 2) == doctest::Approx(-1.0));
    CHECK(catalog::weight(k, SetTag::Basic, 0) == 1.0);
  }

  TEST_CASE("involution") {
    const auto c = make(FamilyId::QCharlier, {{"a", 0.8}, {"q", 0.5}});
    CHECK(catalog::involution(c).params().a == doctest::Approx(1.25));
    const auto l = make(FamilyId::DualBigQLaguerre, {{"a", 0.6}, {"b", -0.7}, {"q", 0.5}});
    const auto li = catalog::involution(l);
    CHECK(li.params().a == -0.7);
    CHECK(li.params().b == 0.6);
    CHECK(li.involuted());
    CHECK(catalog::involution(li) == l);
    CHECK(catalog::involution(catalog::involution(c)) == c);
    CHECK(kind_of([] { catalog::involution(make(FamilyId::Krawtchouk, {{"p", 0.5}}, 2)); }) ==
          ErrorKind::InvolutionUndefined);
  }

  TEST_CASE("involution swaps basic and minus rates") {
    for (const auto& pt : ref::semi_infinite_points()) {
      const auto fam = catalog::validate(pt.spec);
      if (!fam.has_minus_set()) continue;
      CAPTURE(pt.label);
      const auto img = catalog::involution(fam);
      for (long x = 0; x <= 20; ++x) {
        const auto minus = catalog::rates(fam, SetTag::Minus, x);
        const auto via = catalog::rates(img, SetTag::Basic, x);
        CHECK(via.birth == doctest::Approx(minus.birth).epsilon(1e-14));
        CHECK(via.death == doctest::Approx(minus.death).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("rates are positive inside the lattice and vanish at its ends") {
    for (const auto& pt : ref::finite_points()) {
      const auto fam = catalog::validate(pt.spec);
      CAPTURE(pt.label);
      const int N = fam.N();
      for (long x = 0; x <= N; ++x) {
        const auto r = catalog::rates(fam, SetTag::Basic, x);
        if (x < N) CHECK(r.birth > 0.0); else CHECK(r.birth == 0.0);
        if (x > 0) CHECK(r.death > 0.0); else CHECK(r.death == 0.0);
      }
    }
    for (const auto& pt : ref::semi_infinite_points()) {
      const auto fam = catalog::validate(pt.spec);
      CAPTURE(pt.label);
      for (SetTag chain : {SetTag::Basic, SetTag::Minus}) {
        if (chain == SetTag::Minus && !fam.has_minus_set()) continue;
        for (long x = 0; x <= 60; ++x) {
          const auto r = catalog::rates(fam, chain, x);
          CHECK(r.birth > 0.0);
          if (x > 0) CHECK(r.death > 0.0); else CHECK(r.death == 0.0);
        }
      }
    }
  }

  TEST_CASE("norm constants are positive and weights match detailed balance") {
    for (const auto& pt : ref::finite_points()) {
      const auto fam = catalog::validate(pt.spec);
      CAPTURE(pt.label);
      for (unsigned n = 0; n <= static_cast<unsigned>(fam.N()); ++n)
        CHECK(catalog::norm_const(fam, SetTag::Basic, n) > 0.0);
      for (long x = 0; x < fam.N(); ++x) {
        const auto r0 = catalog::rates(fam, SetTag::Basic, x);
        const auto r1 = catalog::rates(fam, SetTag::Basic, x + 1);
        const double ratio = catalog::weight(fam, SetTag::Basic, x + 1) / catalog::weight(fam, SetTag::Basic, x);
        CHECK(ratio == doctest::Approx(r0.birth / r1.death).epsilon(1e-11));
      }
    }
  }

  TEST_CASE("q-Charlier is q-Meixner at b=0, c=a") {
    const auto c = make(FamilyId::QCharlier, {{"a", 0.8}, {"q", 0.5}});
    const auto m = make(FamilyId::QMeixner, {{"b", 0.0}, {"c", 0.8}, {"q", 0.5}});
    for (long x = 0; x <= 20; ++x) {
      CHECK(catalog::rates(c, SetTag::Basic, x).birth == doctest::Approx(catalog::rates(m, SetTag::Basic, x).birth));
      CHECK(catalog::rates(c, SetTag::Basic, x).death == doctest::Approx(catalog::rates(m, SetTag::Basic, x).death));
      for (unsigned n = 0; n <= 5; ++n)
        CHECK(catalog::polynomial(c, SetTag::Basic, n, x) ==
              doctest::Approx(catalog::polynomial(m, SetTag::Basic, n, x)).epsilon(1e-14));
    }
  }

  TEST_CASE("dual big q-Laguerre is the b->0 limit of dual big q-Jacobi") {
    const auto l = make(FamilyId::DualBigQLaguerre, {{"a", 0.6}, {"b", -0.7}, {"q", 0.5}});
    const auto j = make(FamilyId::DualBigQJacobi, {{"a", 0.6}, {"b", 1e-12}, {"c", -0.7}, {"q", 0.5}});
    for (long x = 0; x <= 20; ++x) {
      CHECK(catalog::rates(l, SetTag::Basic, x).birth ==
            doctest::Approx(catalog::rates(j, SetTag::Basic, x).birth).epsilon(1e-8));
      CHECK(catalog::rates(l, SetTag::Basic, x).death ==
            doctest::Approx(catalog::rates(j, SetTag::Basic, x).death).epsilon(1e-8));
    }
  }
}
