#include "catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <type_traits>

#include "errors.hpp"

namespace bds::catalog {
namespace {

using specfun::SignedLog;

const std::array<FamilyInfo, kFamilyCount> kFamilies = {{
    {FamilyId::Krawtchouk, "krawtchouk", "Krawtchouk", {"p"}, LatticeKind::Finite, false, "x", "0<p<1"},
    {FamilyId::Hahn, "hahn", "Hahn", {"a", "b"}, LatticeKind::Finite, false, "x", "a>0, b>0"},
    {FamilyId::DualHahn, "dualhahn", "dual Hahn", {"a", "b"}, LatticeKind::Finite, false, "x(x+a+b-1)",
     "a>0, b>0"},
    {FamilyId::Racah, "racah", "Racah", {"a", "b", "d"}, LatticeKind::Finite, false, "x(x+d)",
     "c=-N (derived), a>=b, d>0, a>N+d, 0<b<1+d"},
    {FamilyId::AffineQKrawtchouk, "affineqkrawtchouk", "affine q-Krawtchouk", {"p", "q"}, LatticeKind::Finite,
     false, "q^-x - 1", "0<q<1, 0<p<1/q"},
    {FamilyId::QKrawtchouk, "qkrawtchouk", "q-Krawtchouk", {"p", "q"}, LatticeKind::Finite, false, "q^-x - 1",
     "0<q<1, p>0"},
    {FamilyId::QuantumQKrawtchouk, "quantumqkrawtchouk", "quantum q-Krawtchouk", {"p", "q"},
     LatticeKind::Finite, false, "q^-x - 1", "0<q<1, p>q^-N"},
    {FamilyId::QHahn, "qhahn", "q-Hahn", {"a", "b", "q"}, LatticeKind::Finite, false, "q^-x - 1",
     "0<q<1, 0<a<1, 0<b<1"},
    {FamilyId::DualQHahn, "dualqhahn", "dual q-Hahn", {"a", "b", "q"}, LatticeKind::Finite, false,
     "(q^-x - 1)(1 - ab q^(x-1))", "0<q<1, 0<a<1, 0<b<1"},
    {FamilyId::QRacah, "qracah", "q-Racah", {"a", "b", "d", "q"}, LatticeKind::Finite, false,
     "(q^-x - 1)(1 - d q^x)", "c=q^-N (derived), 0<q<1, a<=b, 0<d<1, 0<a<q^N d, qd<b<1"},
    {FamilyId::AlSalamCarlitzII, "alsalamcarlitz2", "Al-Salam-Carlitz II", {"a", "q"},
     LatticeKind::SemiInfinite, false, "q^-x - 1", "0<q<1, 0<a<1/q"},
    {FamilyId::QMeixner, "qmeixner", "q-Meixner", {"b", "c", "q"}, LatticeKind::SemiInfinite, true,
     "q^-x - 1", "0<q<1, 0<=b<1/q, c>0; involution (b,c)->(-bc,1/c)"},
    {FamilyId::QCharlier, "qcharlier", "q-Charlier", {"a", "q"}, LatticeKind::SemiInfinite, true, "q^-x - 1",
     "0<q<1, a>0; involution a->1/a"},
    {FamilyId::DualBigQJacobi, "dualbigqjacobi", "dual big q-Jacobi", {"a", "b", "c", "q"},
     LatticeKind::SemiInfinite, true, "(q^-x - 1)(1 - ab q^(x+1))",
     "0<q<1, 0<a<1/q, 0<b<1/q, c<0; involution (a,b,c)->(c,ab/c,a)"},
    {FamilyId::DualBigQLaguerre, "dualbigqlaguerre", "dual big q-Laguerre", {"a", "b", "q"},
     LatticeKind::SemiInfinite, true, "q^-x - 1", "0<q<1, 0<a<1/q, b<0; involution a<->b"},
}};

std::string normalize_name(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '-' || ch == '_' || ch == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

bool present(double v) { return !std::isnan(v); }

double* slot(Params& p, const std::string& name) {
  if (name == "p") return &p.p;
  if (name == "a") return &p.a;
  if (name == "b") return &p.b;
  if (name == "c") return &p.c;
  if (name == "d") return &p.d;
  if (name == "q") return &p.q;
  return nullptr;
}

[[noreturn]] void reject(const std::string& param, const std::string& why) {
  throw Error(ErrorKind::Param, param, "parameter " + param + ": " + why);
}

void require(bool ok, const std::string& param, const std::string& why) {
  if (!ok) reject(param, why);
}

// Params in the working precision. The derived q-Racah c = q^-N is formed
// in that precision rather than widened from double.
template <typename R>
struct ParamSet {
  R p, a, b, c, d, q;
  int N;
};

template <typename R>
ParamSet<R> widen(FamilyId id, const Params& s) {
  ParamSet<R> r{R(s.p), R(s.a), R(s.b), R(s.c), R(s.d), R(s.q), s.N};
  if (id == FamilyId::QRacah) r.c = std::pow(r.q, R(-s.N));
  return r;
}

template <typename R>
using SL = specfun::BasicSignedLog<R>;

template <typename R>
ParamSet<R> involute(FamilyId id, const ParamSet<R>& p) {
  ParamSet<R> r = p;
  switch (id) {
    case FamilyId::QMeixner:
      r.b = -p.b * p.c;
      r.c = 1 / p.c;
      break;
    case FamilyId::QCharlier:
      r.a = 1 / p.a;
      break;
    case FamilyId::DualBigQJacobi:
      r.a = p.c;
      r.b = p.a * p.b / p.c;
      r.c = p.a;
      break;
    case FamilyId::DualBigQLaguerre:
      std::swap(r.a, r.b);
      break;
    default:
      throw Error(ErrorKind::InvolutionUndefined, std::string(info(id).name),
                  std::string(info(id).display) + " has no second set of polynomials");
  }
  return r;
}

// Params of the basic-set formulas that describe `set` of `fam`. Involuted
// points are rebuilt from their pre-image so that every precision applies the
// involution itself.
template <typename R>
ParamSet<R> set_params(const ValidatedFamily& fam, SetTag set) {
  const ParamSet<R> base = widen<R>(fam.id(), fam.involuted() ? fam.origin() : fam.params());
  const bool image = fam.involuted() != (set == SetTag::Minus);
  return image ? involute(fam.id(), base) : base;
}

template <typename R>
R qpow(R q, std::type_identity_t<R> e) {
  return std::pow(q, e);
}

template <typename R>
struct QP {
  R q;
  // Factors below this no longer change an infinite product.
  static constexpr R kGuard = std::numeric_limits<R>::epsilon() / 256;

  R operator()(R a, long k) const {
    R r = 1;
    R aqj = a;
    for (long j = 0; j < k; ++j) {
      r *= 1 - aqj;
      aqj *= q;
    }
    return r;
  }
  SL<R> log(R a, long k) const {
    SL<R> r;
    R aqj = a;
    for (long j = 0; j < k; ++j) {
      r *= SL<R>::of(1 - aqj);
      aqj *= q;
    }
    return r;
  }
  SL<R> log_inf(R a) const {
    SL<R> r;
    R aqj = a;
    for (int j = 0; std::fabs(aqj) >= kGuard; ++j) {
      if (j > 100000) throw Error(ErrorKind::Convergence, "q", "infinite q-product did not converge");
      r *= SL<R>::of(1 - aqj);
      aqj *= q;
    }
    return r;
  }
  // (q;q)_N / ((q;q)_x (q;q)_{N-x})
  R binom(int N, long x) const { return (*this)(q, N) / ((*this)(q, x) * (*this)(q, N - x)); }
  SL<R> log_binom(int N, long x) const {
    SL<R> r = log(q, N);
    r /= log(q, x);
    r /= log(q, N - x);
    return r;
  }
};

template <typename R>
R binomial(int N, long x) {
  if (N > 1000) return std::exp(std::lgamma(R(N + 1)) - std::lgamma(R(x + 1)) - std::lgamma(R(N - x + 1)));
  R r = 1;
  for (long j = 1; j <= x; ++j) r = r * R(N - x + j) / R(j);
  return r;
}

template <typename R>
R poch(R a, long k) {
  R r = 1;
  for (long j = 0; j < k; ++j) r *= a + R(j);
  return r;
}

template <typename R>
SL<R> lpoch(R a, long k) {
  SL<R> r;
  for (long j = 0; j < k; ++j) r *= SL<R>::of(a + R(j));
  return r;
}

template <typename R>
SL<R> L(R v) {
  return SL<R>::of(v);
}

// Racah d-tilde and q-Racah d-tilde.
template <typename R>
R racah_dt(const ParamSet<R>& p) {
  return p.a + p.b + p.c - p.d - 1;
}
template <typename R>
R qracah_dt(const ParamSet<R>& p) {
  return p.a * p.b * p.c / (p.d * p.q);
}

// (1 - ab q^{x+1}) / ((1 - ab q^{2x+1})(1 - ab q^{2x+2})), with the x=0 factor
// cancelled so that ab q = 1 stays finite.
template <typename R>
R dbqj_birth_ratio(R ab, R q, long x) {
  if (x == 0) return 1 / (1 - ab * q * q);
  return (1 - ab * qpow(q, R(x + 1))) / ((1 - ab * qpow(q, R(2 * x + 1))) * (1 - ab * qpow(q, R(2 * x + 2))));
}

template <typename R>
RatesOf<R> basic_rates(FamilyId id, const ParamSet<R>& P, long x) {
  const R X = static_cast<R>(x);
  const int N = P.N;
  const R q = P.q;
  RatesOf<R> r;
  switch (id) {
    case FamilyId::Krawtchouk:
      r = {P.p * (N - X), (1.0 - P.p) * X};
      break;
    case FamilyId::Hahn:
      r = {(X + P.a) * (N - X), X * (P.b + N - X)};
      break;
    case FamilyId::DualHahn: {
      const R s = P.a + P.b;
      if (x == 0) {
        r.birth = P.a * N / s;
      } else {
        r.birth = (X + P.a) * (X + s - 1.0) * (N - X) / ((2 * X - 1.0 + s) * (2 * X + s));
        r.death = X * (X + P.b - 1.0) * (X + s + N - 1.0) / ((2 * X - 2.0 + s) * (2 * X - 1.0 + s));
      }
      break;
    }
    case FamilyId::Racah: {
      const R a = P.a, b = P.b, c = P.c, d = P.d;
      r.birth = -(X + a) * (X + b) * (X + c) * (X + d) / ((2 * X + d) * (2 * X + 1.0 + d));
      if (x > 0) r.death = -(X + d - a) * (X + d - b) * (X + d - c) * X / ((2 * X - 1.0 + d) * (2 * X + d));
      break;
    }
    case FamilyId::AffineQKrawtchouk:
      r = {(qpow(q, X - N) - 1.0) * (1.0 - P.p * qpow(q, X + 1)), P.p * qpow(q, X - N) * (1.0 - qpow(q, X))};
      break;
    case FamilyId::QKrawtchouk:
      r = {qpow(q, X - N) - 1.0, P.p * (1.0 - qpow(q, X))};
      break;
    case FamilyId::QuantumQKrawtchouk:
      r = {qpow(q, X) * (qpow(q, X - N) - 1.0) / P.p,
           (1.0 - qpow(q, X)) * (1.0 - qpow(q, X - N - 1) / P.p)};
      break;
    case FamilyId::QHahn:
      r = {(1.0 - P.a * qpow(q, X)) * (qpow(q, X - N) - 1.0),
           P.a / q * (1.0 - qpow(q, X)) * (qpow(q, X - N) - P.b)};
      break;
    case FamilyId::DualQHahn: {
      const R a = P.a, ab = P.a * P.b;
      if (x == 0) {
        r.birth = (qpow(q, -N) - 1.0) * (1.0 - a) / (1.0 - ab);
      } else {
        r.birth = (qpow(q, X - N) - 1.0) * (1.0 - a * qpow(q, X)) * (1.0 - ab * qpow(q, X - 1)) /
                  ((1.0 - ab * qpow(q, 2 * X - 1)) * (1.0 - ab * qpow(q, 2 * X)));
        r.death = a * qpow(q, X - N - 1) * (1.0 - qpow(q, X)) * (1.0 - ab * qpow(q, X + N - 1)) *
                  (1.0 - P.b * qpow(q, X - 1)) / ((1.0 - ab * qpow(q, 2 * X - 2)) * (1.0 - ab * qpow(q, 2 * X - 1)));
      }
      break;
    }
    case FamilyId::QRacah: {
      const R a = P.a, b = P.b, c = P.c, d = P.d, dt = qracah_dt(P);
      const R qx = qpow(q, X);
      r.birth = -(1.0 - a * qx) * (1.0 - b * qx) * (1.0 - c * qx) * (1.0 - d * qx) /
                ((1.0 - d * qpow(q, 2 * X)) * (1.0 - d * qpow(q, 2 * X + 1)));
      if (x > 0)
        r.death = -dt * (1.0 - d * qx / a) * (1.0 - d * qx / b) * (1.0 - d * qx / c) * (1.0 - qx) /
                  ((1.0 - d * qpow(q, 2 * X - 1)) * (1.0 - d * qpow(q, 2 * X)));
      break;
    }
    case FamilyId::AlSalamCarlitzII:
      r = {P.a * qpow(q, 2 * X + 1), (1.0 - qpow(q, X)) * (1.0 - P.a * qpow(q, X))};
      break;
    case FamilyId::QMeixner:
      r = {P.c * qpow(q, X) * (1.0 - P.b * qpow(q, X + 1)), (1.0 - qpow(q, X)) * (1.0 + P.b * P.c * qpow(q, X))};
      break;
    case FamilyId::QCharlier:
      r = {P.a * qpow(q, X), 1.0 - qpow(q, X)};
      break;
    case FamilyId::DualBigQJacobi: {
      const R a = P.a, b = P.b, c = P.c, ab = a * b;
      r.birth = -c * qpow(q, X + 1) * (1.0 - a * qpow(q, X + 1)) * (1.0 - ab / c * qpow(q, X + 1)) *
                dbqj_birth_ratio(ab, q, x);
      if (x > 0)
        r.death = a * q * (1.0 - qpow(q, X)) * (1.0 - b * qpow(q, X)) * (1.0 - c * qpow(q, X)) /
                  ((1.0 - ab * qpow(q, 2 * X)) * (1.0 - ab * qpow(q, 2 * X + 1)));
      break;
    }
    case FamilyId::DualBigQLaguerre:
      r = {-P.b * qpow(q, X + 1) * (1.0 - P.a * qpow(q, X + 1)), P.a * q * (1.0 - qpow(q, X)) * (1.0 - P.b * qpow(q, X))};
      break;
  }
  if (x == 0) r.death = 0.0;
  if (N >= 0 && x == N) r.birth = 0.0;
  return r;
}

template <typename R>
RatesOf<R> minus_rates(FamilyId id, const ParamSet<R>& P, long x) {
  const R X = static_cast<R>(x);
  const R q = P.q;
  RatesOf<R> r;
  switch (id) {
    case FamilyId::QMeixner:
      r = {qpow(q, X) * (1.0 + P.b * P.c * qpow(q, X + 1)) / P.c, (1.0 - qpow(q, X)) * (1.0 - P.b * qpow(q, X))};
      break;
    case FamilyId::QCharlier:
      r = {qpow(q, X) / P.a, 1.0 - qpow(q, X)};
      break;
    case FamilyId::DualBigQJacobi: {
      const R a = P.a, b = P.b, c = P.c, ab = a * b;
      r.birth = a * qpow(q, X + 1) * (1.0 - b * qpow(q, X + 1)) * (1.0 - c * qpow(q, X + 1)) *
                dbqj_birth_ratio(ab, q, x);
      if (x > 0)
        r.death = -c * q * (1.0 - qpow(q, X)) * (1.0 - a * qpow(q, X)) * (1.0 - ab / c * qpow(q, X)) /
                  ((1.0 - ab * qpow(q, 2 * X)) * (1.0 - ab * qpow(q, 2 * X + 1)));
      break;
    }
    case FamilyId::DualBigQLaguerre:
      r = {P.a * qpow(q, X + 1) * (1.0 - P.b * qpow(q, X + 1)), -P.b * q * (1.0 - qpow(q, X)) * (1.0 - P.a * qpow(q, X))};
      break;
    default:
      throw Error(ErrorKind::InvolutionUndefined, std::string(info(id).name),
                  std::string(info(id).display) + " has no minus chain");
  }
  if (x == 0) r.death = 0.0;
  return r;
}

template <typename R>
R basic_weight(FamilyId id, const ParamSet<R>& P, long x) {
  const R X = static_cast<R>(x);
  const int N = P.N;
  const R q = P.q;
  const QP<R> qp{q};
  switch (id) {
    case FamilyId::Krawtchouk:
      return binomial<R>(N, x) * std::pow(P.p / (1.0 - P.p), X);
    case FamilyId::Hahn:
      return binomial<R>(N, x) * poch(P.a, x) * poch(P.b, N - x) / poch(P.b, N);
    case FamilyId::DualHahn: {
      if (x == 0) return 1.0;
      const R s = P.a + P.b;
      return binomial<R>(N, x) * poch(P.a, x) * (2 * X + s - 1.0) * poch(s, N) /
             (poch(P.b, x) * poch(X + s - 1.0, N + 1));
    }
    case FamilyId::Racah: {
      const R a = P.a, b = P.b, c = P.c, d = P.d;
      return poch(a, x) * poch(b, x) * poch(c, x) * poch(d, x) /
             (poch(1 + d - a, x) * poch(1 + d - b, x) * poch(1 + d - c, x) * poch(R(1), x)) * (2 * X + d) / d;
    }
    case FamilyId::AffineQKrawtchouk:
      return qp.binom(N, x) * qp(P.p * q, x) / std::pow(P.p * q, X);
    case FamilyId::QKrawtchouk:
      return qp.binom(N, x) * std::pow(P.p, -X) * qpow(q, X * (X - 1) / 2 - X * N);
    case FamilyId::QuantumQKrawtchouk:
      return qp.binom(N, x) * std::pow(P.p, -X) * qpow(q, X * (X - 1 - N)) / qp(qpow(q, -N) / P.p, x);
    case FamilyId::QHahn:
      return qp.binom(N, x) * qp(P.a, x) * qp(P.b, N - x) / (qp(P.b, N) * std::pow(P.a, X));
    case FamilyId::DualQHahn: {
      if (x == 0) return 1.0;
      const R a = P.a, b = P.b, ab = a * b;
      return qp.binom(N, x) * qp(a, x) * qp(ab / q, x) / (qp(ab * qpow(q, N), x) * qp(b, x) * std::pow(a, X)) *
             (1.0 - ab * qpow(q, 2 * X - 1)) / (1.0 - ab / q);
    }
    case FamilyId::QRacah: {
      const R a = P.a, b = P.b, c = P.c, d = P.d, dt = qracah_dt(P);
      return qp(a, x) * qp(b, x) * qp(c, x) * qp(d, x) /
             (qp(d * q / a, x) * qp(d * q / b, x) * qp(d * q / c, x) * qp(q, x) * std::pow(dt, X)) *
             (1.0 - d * qpow(q, 2 * X)) / (1.0 - d);
    }
    case FamilyId::AlSalamCarlitzII:
      return std::pow(P.a, X) * qpow(q, X * X) / (qp(q, x) * qp(P.a * q, x));
    case FamilyId::QMeixner:
      return qp(P.b * q, x) / (qp(q, x) * qp(-P.b * P.c * q, x)) * std::pow(P.c, X) * qpow(q, X * (X - 1) / 2);
    case FamilyId::QCharlier:
      return std::pow(P.a, X) * qpow(q, X * (X - 1) / 2) / qp(q, x);
    case FamilyId::DualBigQJacobi: {
      const R a = P.a, b = P.b, c = P.c, ab = a * b;
      const R ratio = x == 0 ? 1.0 : (1.0 - ab * qpow(q, 2 * X + 1)) / (1.0 - ab * qpow(q, X + 1));
      return qpow(q, X * (X - 1) / 2) / std::pow(-a / c, X) * qp(ab / c * q, x) / qp(c * q, x) * ratio *
             qp(a * q, x) * qp(ab * q * q, x) / (qp(q, x) * qp(b * q, x));
    }
    case FamilyId::DualBigQLaguerre:
      return qpow(q, X * (X - 1) / 2) / std::pow(-P.a / P.b, X) / qp(P.b * q, x) * qp(P.a * q, x) / qp(q, x);
  }
  return 0.0;
}

template <typename R>
SL<R> basic_log_norm(FamilyId id, const ParamSet<R>& P, unsigned n) {
  const long k = n;
  const R nn = n;
  const int N = P.N;
  const R q = P.q;
  const QP<R> qp{q};
  SL<R> r;
  switch (id) {
    case FamilyId::Krawtchouk:
      r = L(binomial<R>(N, k));
      r *= L(std::pow(P.p / (1.0 - P.p), nn) * std::pow(1.0 - P.p, N));
      break;
    case FamilyId::Hahn: {
      const R s = P.a + P.b;
      r = L(binomial<R>(N, k));
      r *= lpoch(P.a, k);
      r /= lpoch(P.b, k);
      if (n > 0) r *= L((2 * nn + s - 1.0) / (nn + s - 1.0));
      r *= lpoch(P.b, N);
      r /= lpoch(nn + s, N);
      break;
    }
    case FamilyId::DualHahn:
      r = L(binomial<R>(N, k));
      r *= lpoch(P.a, k);
      r *= lpoch(P.b, N - k);
      r /= lpoch(P.a + P.b, N);
      break;
    case FamilyId::Racah: {
      const R a = P.a, b = P.b, c = P.c, d = P.d, dt = racah_dt(P);
      r = lpoch(a, k);
      r *= lpoch(b, k);
      r *= lpoch(c, k);
      // (dt)_n (2n+dt)/dt, written to stay finite at dt = 0.
      if (n > 0) {
        r *= lpoch(dt + 1.0, k - 1);
        r *= L(2 * nn + dt);
      }
      r /= lpoch(1 + dt - a, k);
      r /= lpoch(1 + dt - b, k);
      r /= lpoch(1 + dt - c, k);
      r /= lpoch(R(1), k);
      SL<R> d0;
      d0.sign = (N % 2 == 0) ? 1 : -1;
      d0 *= lpoch(1 + d - a, N);
      d0 *= lpoch(1 + d - b, N);
      d0 *= lpoch(1 + d - c, N);
      d0 /= lpoch(dt + 1.0, N);
      d0 /= lpoch(d + 1.0, 2 * N);
      r *= d0;
      break;
    }
    case FamilyId::AffineQKrawtchouk: {
      const R pq = P.p * q;
      r = qp.log_binom(N, k);
      r *= qp.log(pq, k);
      r *= L(std::pow(pq, static_cast<R>(N) - nn));
      break;
    }
    case FamilyId::QKrawtchouk: {
      const R p = P.p;
      r = qp.log_binom(N, k);
      r *= qp.log(-p, k);
      r /= qp.log(-p * qpow(q, N + 1), k);
      r.log_abs -= nn * std::log(p) + 0.5 * nn * (nn + 1) * std::log(q);
      r *= L((1.0 + p * qpow(q, 2 * nn)) / (1.0 + p));
      r.log_abs += N * std::log(p) + 0.5 * N * (N + 1.0) * std::log(q);
      r /= qp.log(-p * q, N);
      break;
    }
    case FamilyId::QuantumQKrawtchouk: {
      const R p = P.p;
      r = qp.log_binom(N, k);
      r.log_abs += -nn * std::log(p) - N * nn * std::log(q);
      r /= qp.log(qpow(q, -nn) / p, k);
      r *= qp.log(qpow(q, -N) / p, N);
      break;
    }
    case FamilyId::QHahn: {
      const R a = P.a, b = P.b, ab = a * b;
      r = qp.log_binom(N, k);
      r *= qp.log(a, k);
      // (ab/q;q)_n (1 - ab q^{2n-1}) / (1 - ab/q)
      if (n > 0) {
        r *= qp.log(ab, k - 1);
        r *= L(1.0 - ab * qpow(q, 2 * nn - 1));
      }
      r /= qp.log(ab * qpow(q, N), k);
      r /= qp.log(b, k);
      r.log_abs += (N - nn) * std::log(a);
      r *= qp.log(b, N);
      r /= qp.log(ab, N);
      break;
    }
    case FamilyId::DualQHahn: {
      const R a = P.a, b = P.b;
      r = qp.log_binom(N, k);
      r *= qp.log(a, k);
      r *= qp.log(b, N - k);
      r.log_abs += (N - nn) * std::log(a);
      r /= qp.log(a * b, N);
      break;
    }
    case FamilyId::QRacah: {
      const R a = P.a, b = P.b, c = P.c, d = P.d, dt = qracah_dt(P);
      r = qp.log(a, k);
      r *= qp.log(b, k);
      r *= qp.log(c, k);
      if (n > 0) {
        r *= qp.log(dt * q, k - 1);
        r *= L(1.0 - dt * qpow(q, 2 * nn));
      }
      r /= qp.log(dt * q / a, k);
      r /= qp.log(dt * q / b, k);
      r /= qp.log(dt * q / c, k);
      r /= qp.log(q, k);
      r *= L(std::pow(d, -nn));
      SL<R> d0;
      d0.sign = (N % 2 == 0) ? 1 : -1;
      d0 *= qp.log(d * q / a, N);
      d0 *= qp.log(d * q / b, N);
      d0 *= qp.log(d * q / c, N);
      d0.log_abs += N * std::log(dt) + 0.5 * N * (N + 1.0) * std::log(q);
      d0 /= qp.log(dt * q, N);
      d0 /= qp.log(d * q, 2 * N);
      r *= d0;
      break;
    }
    case FamilyId::AlSalamCarlitzII:
      r.log_abs = nn * std::log(P.a * q);
      r /= qp.log(q, k);
      r *= qp.log_inf(P.a * q);
      break;
    case FamilyId::QMeixner: {
      const R b = P.b, c = P.c;
      r.log_abs = nn * std::log(q);
      r *= qp.log(b * q, k);
      r /= qp.log(q, k);
      r /= qp.log(-q / c, k);
      r *= qp.log_inf(-b * c * q);
      r /= qp.log_inf(-c);
      break;
    }
    case FamilyId::QCharlier:
      r.log_abs = nn * std::log(q);
      r /= qp.log(q, k);
      r /= qp.log(-q / P.a, k);
      r /= qp.log_inf(-P.a);
      break;
    case FamilyId::DualBigQJacobi: {
      const R a = P.a, b = P.b, c = P.c;
      r.log_abs = nn * std::log(q);
      r *= qp.log(a * q, k);
      r *= qp.log(a * b / c * q, k);
      r /= qp.log(q, k);
      r /= qp.log(a / c * q, k);
      r *= qp.log_inf(b * q);
      r *= qp.log_inf(c * q);
      r /= qp.log_inf(a * b * q * q);
      r /= qp.log_inf(c / a);
      break;
    }
    case FamilyId::DualBigQLaguerre: {
      const R a = P.a, b = P.b;
      r.log_abs = nn * std::log(q);
      r *= qp.log(a * q, k);
      r /= qp.log(q, k);
      r /= qp.log(a / b * q, k);
      r *= qp.log_inf(b * q);
      r /= qp.log_inf(b / a);
      break;
    }
  }
  return r;
}

template <typename R>
specfun::SeriesSpec basic_series(FamilyId id, const ParamSet<R>& P, unsigned n, long x) {
  using SP = specfun::SeriesParam;
  const int in = static_cast<int>(n);
  const int ix = static_cast<int>(x);
  const int N = P.N;
  const R q = P.q;
  specfun::SeriesSpec s;
  s.order = n;
  switch (id) {
    case FamilyId::Krawtchouk:
      s.numerator = {SP(0.0, -in), SP(0.0, -ix)};
      s.denominator = {SP(0.0, -N)};
      s.argument = 1.0 / P.p;
      return s;
    case FamilyId::Hahn:
      s.numerator = {SP(0.0, -in), SP(P.a + P.b - 1.0, in), SP(0.0, -ix)};
      s.denominator = {P.a, SP(0.0, -N)};
      s.argument = 1.0;
      return s;
    case FamilyId::DualHahn:
      s.numerator = {SP(0.0, -in), SP(P.a + P.b - 1.0, ix), SP(0.0, -ix)};
      s.denominator = {P.a, SP(0.0, -N)};
      s.argument = 1.0;
      return s;
    case FamilyId::Racah:
      s.numerator = {SP(0.0, -in), SP(racah_dt(P), in), SP(0.0, -ix), SP(P.d, ix)};
      s.denominator = {P.a, P.b, P.c};
      s.argument = 1.0;
      return s;
    default:
      break;
  }
  s.q = static_cast<double>(q);
  const SP qn(1.0, -in);
  const SP qx(1.0, -ix);
  const SP qN(1.0, -N);
  switch (id) {
    case FamilyId::AffineQKrawtchouk:
      s.numerator = {qn, qx, 0.0};
      s.denominator = {SP(P.p, 1), qN};
      s.argument = q;
      break;
    case FamilyId::QKrawtchouk:
      s.numerator = {qn, qx, SP(-P.p, in)};
      s.denominator = {qN, 0.0};
      s.argument = q;
      break;
    case FamilyId::QuantumQKrawtchouk:
      s.numerator = {qn, qx};
      s.denominator = {qN};
      s.argument = SP(P.p, in + 1);
      break;
    case FamilyId::QHahn:
      s.numerator = {qn, SP(P.a * P.b, in - 1), qx};
      s.denominator = {P.a, qN};
      s.argument = q;
      break;
    case FamilyId::DualQHahn:
      s.numerator = {qn, SP(P.a * P.b, ix - 1), qx};
      s.denominator = {P.a, qN};
      s.argument = q;
      break;
    case FamilyId::QRacah:
      s.numerator = {qn, SP(qracah_dt(P), in), qx, SP(P.d, ix)};
      s.denominator = {P.a, P.b, qN};
      s.argument = q;
      break;
    case FamilyId::AlSalamCarlitzII:
      s.numerator = {qn, qx};
      s.argument = SP(1.0 / P.a, in);
      break;
    case FamilyId::QMeixner:
      s.numerator = {qn, qx};
      s.denominator = {SP(P.b, 1)};
      s.argument = SP(-1.0 / P.c, in + 1);
      break;
    case FamilyId::QCharlier:
      s.numerator = {qn, qx};
      s.denominator = {0.0};
      s.argument = SP(-1.0 / P.a, in + 1);
      break;
    case FamilyId::DualBigQJacobi:
      s.numerator = {qn, SP(P.a * P.b, ix + 1), qx};
      s.denominator = {SP(P.a, 1), SP(P.a * P.b / P.c, 1)};
      s.argument = SP(P.a / P.c, in + 1);
      break;
    case FamilyId::DualBigQLaguerre:
      s.numerator = {qn, qx};
      s.denominator = {SP(P.a, 1)};
      s.argument = SP(P.a / P.b, in + 1);
      break;
    default:
      break;
  }
  return s;
}

void check_finite_rates(FamilyId id, const Params& p) {
  const ParamSet<double> P = widen<double>(id, p);
  if (p.N < 0) {
    for (long x = 0; x < 64; ++x) {
      const Rates r = basic_rates(id, P, x);
      if (!(r.birth > 0.0) || (x > 0 && !(r.death > 0.0)) || !std::isfinite(r.birth + r.death))
        reject("rates", "non-positive birth/death rate at x=" + std::to_string(x));
    }
    return;
  }
  for (long x = 0; x <= p.N; ++x) {
    const Rates r = basic_rates(id, P, x);
    if ((x < p.N && !(r.birth > 0.0)) || (x > 0 && !(r.death > 0.0)) || !std::isfinite(r.birth + r.death))
      reject("rates", "non-positive birth/death rate at x=" + std::to_string(x));
  }
}

// At the involuted point of the dual big q-Jacobi and q-Laguerre families
// every rate and eigenvalue formula picks up an overall factor -1; flipping it
// back makes the involuted family describe the minus chain.
double overall_sign(const ValidatedFamily& fam) {
  if (!fam.involuted()) return 1.0;
  return (fam.id() == FamilyId::DualBigQJacobi || fam.id() == FamilyId::DualBigQLaguerre) ? -1.0 : 1.0;
}

}  // namespace

bool Params::operator==(const Params& o) const {
  auto same = [](double u, double v) { return (std::isnan(u) && std::isnan(v)) || u == v; };
  return same(p, o.p) && same(a, o.a) && same(b, o.b) && same(c, o.c) && same(d, o.d) && same(q, o.q) && N == o.N;
}

const std::array<FamilyInfo, kFamilyCount>& families() { return kFamilies; }

const FamilyInfo& info(FamilyId id) { return kFamilies[static_cast<std::size_t>(id)]; }

std::optional<FamilyId> family_from_name(std::string_view name) {
  const std::string key = normalize_name(name);
  for (const auto& f : kFamilies)
    if (key == f.name) return f.id;
  if (key == "alsalamcarlitzii") return FamilyId::AlSalamCarlitzII;
  return std::nullopt;
}

FamilySpec ValidatedFamily::spec() const {
  FamilySpec s;
  s.id = id_;
  const Params& p = params();
  for (std::string_view name : info().params) {
    Params copy = p;
    s.params[std::string(name)] = *slot(copy, std::string(name));
  }
  if (p.N >= 0) s.N = p.N;
  return s;
}

ValidatedFamily validate(const FamilySpec& spec) {
  const FamilyInfo& fi = info(spec.id);
  Params p;
  for (const auto& [name, value] : spec.params) {
    const bool known = std::find(fi.params.begin(), fi.params.end(), name) != fi.params.end();
    if (!known) {
      if ((spec.id == FamilyId::Racah || spec.id == FamilyId::QRacah) && name == "c")
        reject("c", "c is fixed by N and may not be given");
      reject(name, std::string("not a parameter of ") + std::string(fi.display));
    }
    if (!std::isfinite(value)) reject(name, "must be finite");
    *slot(p, name) = value;
  }
  for (std::string_view name : fi.params) {
    Params copy = p;
    if (!present(*slot(copy, std::string(name)))) reject(std::string(name), "missing");
  }
  if (fi.lattice == LatticeKind::Finite) {
    if (!spec.N) reject("N", "finite lattice families need N");
    if (*spec.N < 1) reject("N", "N must be a positive integer");
    p.N = *spec.N;
  } else if (spec.N) {
    reject("N", "semi-infinite family takes no N");
  }
  if (present(p.q)) require(p.q > 0.0 && p.q < 1.0, "q", "requires 0<q<1");

  const double N = p.N;
  const double q = p.q;
  switch (spec.id) {
    case FamilyId::Krawtchouk:
      require(p.p > 0.0 && p.p < 1.0, "p", "requires 0<p<1");
      break;
    case FamilyId::Hahn:
    case FamilyId::DualHahn:
      require(p.a > 0.0, "a", "requires a>0");
      require(p.b > 0.0, "b", "requires b>0");
      break;
    case FamilyId::Racah:
      p.c = -N;
      require(p.d > 0.0, "d", "requires d>0");
      require(p.a > N + p.d, "a", "requires a>N+d");
      require(p.b > 0.0 && p.b < 1.0 + p.d, "b", "requires 0<b<1+d");
      require(p.a >= p.b, "a", "requires a>=b");
      break;
    case FamilyId::AffineQKrawtchouk:
      require(p.p > 0.0 && p.p < 1.0 / q, "p", "requires 0<p<1/q");
      break;
    case FamilyId::QKrawtchouk:
      require(p.p > 0.0, "p", "requires p>0");
      break;
    case FamilyId::QuantumQKrawtchouk:
      require(p.p > std::pow(q, -N), "p", "requires p>q^-N");
      break;
    case FamilyId::QHahn:
    case FamilyId::DualQHahn:
      require(p.a > 0.0 && p.a < 1.0, "a", "requires 0<a<1");
      require(p.b > 0.0 && p.b < 1.0, "b", "requires 0<b<1");
      break;
    case FamilyId::QRacah:
      p.c = std::pow(q, -N);
      require(p.d > 0.0 && p.d < 1.0, "d", "requires 0<d<1");
      require(p.b > q * p.d && p.b < 1.0, "b", "requires qd<b<1");
      require(p.a > 0.0 && p.a < std::pow(q, N) * p.d, "a", "requires 0<a<q^N d");
      require(p.a <= p.b, "a", "requires a<=b");
      break;
    case FamilyId::AlSalamCarlitzII:
      require(p.a > 0.0 && p.a < 1.0 / q, "a", "requires 0<a<1/q");
      break;
    case FamilyId::QMeixner:
      // b=0 is the q-Charlier specialization.
      require(p.b >= 0.0 && p.b < 1.0 / q, "b", "requires 0<=b<1/q");
      require(p.c > 0.0, "c", "requires c>0");
      break;
    case FamilyId::QCharlier:
      require(p.a > 0.0, "a", "requires a>0");
      break;
    case FamilyId::DualBigQJacobi:
      require(p.a > 0.0 && p.a < 1.0 / q, "a", "requires 0<a<1/q");
      require(p.b > 0.0 && p.b < 1.0 / q, "b", "requires 0<b<1/q");
      require(p.c < 0.0, "c", "requires c<0");
      break;
    case FamilyId::DualBigQLaguerre:
      require(p.a > 0.0 && p.a < 1.0 / q, "a", "requires 0<a<1/q");
      require(p.b < 0.0, "b", "requires b<0");
      break;
  }
  check_finite_rates(spec.id, p);
  return ValidatedFamily(spec.id, p, false);
}

ValidatedFamily involution(const ValidatedFamily& fam) {
  if (!fam.has_minus_set())
    throw Error(ErrorKind::InvolutionUndefined, std::string(fam.info().name),
                std::string(fam.info().display) + " has no involution");
  if (fam.involuted()) {
    // The stored params of an involuted family are the image; map back by
    // recovering the original rather than composing floating point maps.
    return ValidatedFamily(fam.id(), fam.origin_, false);
  }
  const ParamSet<double> image = involute(fam.id(), widen<double>(fam.id(), fam.params()));
  Params p = fam.params();
  p.p = image.p;
  p.a = image.a;
  p.b = image.b;
  p.c = image.c;
  p.d = image.d;
  ValidatedFamily r(fam.id(), p, true);
  r.origin_ = fam.params();
  return r;
}

namespace {

template <typename R>
RatesOf<R> rates_in(const ValidatedFamily& fam, SetTag chain, long x) {
  if (x < 0 || (fam.finite() && x > fam.N()))
    throw Error(ErrorKind::Lattice, "x=" + std::to_string(x), "lattice point out of range");
  const ParamSet<R> P = set_params<R>(fam, SetTag::Basic);
  RatesOf<R> r = chain == SetTag::Basic ? basic_rates(fam.id(), P, x) : minus_rates(fam.id(), P, x);
  const R sign = R(overall_sign(fam));
  r.birth *= sign;
  r.death *= sign;
  if (r.death == 0) r.death = 0;
  if (r.birth == 0) r.birth = 0;
  return r;
}

template <typename R>
R energy(const ValidatedFamily& fam, SetTag chain, SetTag set, unsigned n) {
  const ParamSet<R> P = set_params<R>(fam, SetTag::Basic);
  const R nn = n;
  const R q = P.q;
  const R qn = present(static_cast<double>(q)) ? std::pow(q, nn) : R(0);
  if (chain != SetTag::Basic || set != SetTag::Basic) {
    if (!fam.has_minus_set())
      throw Error(ErrorKind::InvolutionUndefined, std::string(fam.info().name), "no second branch");
    switch (fam.id()) {
      case FamilyId::QMeixner:
        if (chain == SetTag::Basic) return 1 + P.c * qn;    // E'(n)
        if (set == SetTag::Minus) return 1 - qn;            // minus chain, own set
        return 1 + qn / P.c;                                // E^(+)'(n)
      case FamilyId::QCharlier:
        if (chain == SetTag::Basic) return 1 + P.a * qn;
        if (set == SetTag::Minus) return 1 - qn;
        return 1 + qn / P.a;
      case FamilyId::DualBigQJacobi:
        if (chain == SetTag::Basic) return q * (P.a - P.c * qn);
        if (set == SetTag::Minus) return -P.c * q * (1 - qn);
        return q * (-P.c + P.a * qn);
      case FamilyId::DualBigQLaguerre:
        if (chain == SetTag::Basic) return q * (P.a - P.b * qn);
        if (set == SetTag::Minus) return -P.b * q * (1 - qn);
        return q * (-P.b + P.a * qn);
      default:
        break;
    }
  }
  switch (fam.id()) {
    case FamilyId::Krawtchouk:
    case FamilyId::DualHahn:
      return nn;
    case FamilyId::Hahn:
      return nn * (nn + P.a + P.b - 1);
    case FamilyId::Racah:
      return nn * (nn + racah_dt(P));
    case FamilyId::AffineQKrawtchouk:
    case FamilyId::DualQHahn:
      return 1 / qn - 1;
    case FamilyId::QKrawtchouk:
      return (1 / qn - 1) * (1 + P.p * qn);
    case FamilyId::QuantumQKrawtchouk:
    case FamilyId::AlSalamCarlitzII:
    case FamilyId::QMeixner:
    case FamilyId::QCharlier:
      return 1 - qn;
    case FamilyId::QHahn:
      return (1 / qn - 1) * (1 - P.a * P.b * qn / q);
    case FamilyId::QRacah:
      return (1 / qn - 1) * (1 - qracah_dt(P) * qn);
    case FamilyId::DualBigQJacobi:
    case FamilyId::DualBigQLaguerre:
      return P.a * q * (1 - qn);
  }
  return 0;
}

template <typename R>
SL<R> log_norm_in(const ValidatedFamily& fam, SetTag set, unsigned n) {
  return basic_log_norm(fam.id(), set_params<R>(fam, set), n);
}

template <typename R>
specfun::SeriesSpec series_in(const ValidatedFamily& fam, SetTag set, unsigned n, long x) {
  return basic_series(fam.id(), set_params<R>(fam, set), n, x);
}

template <typename R>
R scale_for(const ValidatedFamily& fam, SetTag set, unsigned n, R log_abs_phi0) {
  const SL<R> dn2 = log_norm_in<R>(fam, set, n);
  if (dn2.sign <= 0)
    throw Error(ErrorKind::Param, "d_n^2", "normalisation constant is not positive at n=" + std::to_string(n));
  return dn2.log_abs / 2 + log_abs_phi0;
}

}  // namespace

Rates rates(const ValidatedFamily& fam, SetTag chain, long x) { return rates_in<double>(fam, chain, x); }

RatesOf<Extended> rates_extended(const ValidatedFamily& fam, SetTag chain, long x) {
  return rates_in<Extended>(fam, chain, x);
}

double total_rate_limit(const ValidatedFamily& fam, SetTag chain) {
  const ParamSet<double> P = set_params<double>(fam, SetTag::Basic);
  const double sign = overall_sign(fam);
  switch (fam.id()) {
    case FamilyId::AlSalamCarlitzII:
    case FamilyId::QMeixner:
    case FamilyId::QCharlier:
      if (chain == SetTag::Minus) minus_rates(fam.id(), P, 0);
      return 1.0;
    case FamilyId::DualBigQJacobi:
      return sign * (chain == SetTag::Basic ? P.a * P.q : -P.c * P.q);
    case FamilyId::DualBigQLaguerre:
      return sign * (chain == SetTag::Basic ? P.a * P.q : -P.b * P.q);
    default:
      return std::numeric_limits<double>::quiet_NaN();
  }
}

double eigenvalue(const ValidatedFamily& fam, SetTag chain, SetTag set, unsigned n) {
  return overall_sign(fam) * energy<double>(fam, chain, set, n);
}

Extended eigenvalue_extended(const ValidatedFamily& fam, SetTag chain, SetTag set, unsigned n) {
  return overall_sign(fam) * energy<Extended>(fam, chain, set, n);
}

double eta(const ValidatedFamily& fam, long x) {
  const Params& P = fam.params();
  const double X = static_cast<double>(x);
  const double q = P.q;
  switch (fam.id()) {
    case FamilyId::Krawtchouk:
    case FamilyId::Hahn:
      return X;
    case FamilyId::DualHahn:
      return X * (X + P.a + P.b - 1.0);
    case FamilyId::Racah:
      return X * (X + P.d);
    case FamilyId::DualQHahn:
      return (std::pow(q, -X) - 1.0) * (1.0 - P.a * P.b * std::pow(q, X - 1));
    case FamilyId::QRacah:
      return (std::pow(q, -X) - 1.0) * (1.0 - P.d * std::pow(q, X));
    case FamilyId::DualBigQJacobi:
      return (std::pow(q, -X) - 1.0) * (1.0 - P.a * P.b * std::pow(q, X + 1));
    default:
      return std::pow(q, -X) - 1.0;
  }
}

double weight_closed_form(const ValidatedFamily& fam, SetTag set, long x) {
  return basic_weight(fam.id(), set_params<double>(fam, set), x);
}

double weight(const ValidatedFamily& fam, SetTag set, long x) {
  if (fam.finite()) return weight_closed_form(fam, set, x);
  if (set == SetTag::Minus && !fam.has_minus_set())
    throw Error(ErrorKind::InvolutionUndefined, std::string(fam.info().name), "no minus set");
  double w = 1.0;
  for (long y = 0; y < x; ++y) {
    const Rates r0 = rates(fam, set, y);
    const Rates r1 = rates(fam, set, y + 1);
    w *= r0.birth / r1.death;
  }
  return w;
}

double signed_ground(const ValidatedFamily& fam, SetTag set, long x) {
  const double g = std::sqrt(weight(fam, set, x));
  return (set == SetTag::Minus && (x % 2 != 0)) ? -g : g;
}

specfun::SignedLog log_norm_const(const ValidatedFamily& fam, SetTag set, unsigned n) {
  return log_norm_in<double>(fam, set, n);
}

double norm_const(const ValidatedFamily& fam, SetTag set, unsigned n) {
  return log_norm_const(fam, set, n).value();
}

specfun::SeriesSpec polynomial_series(const ValidatedFamily& fam, SetTag set, unsigned n, long x) {
  return series_in<double>(fam, set, n, x);
}

double polynomial(const ValidatedFamily& fam, SetTag set, unsigned n, long x) {
  return specfun::evaluate(polynomial_series(fam, set, n, x));
}

double normalized_vector(const ValidatedFamily& fam, SetTag set, unsigned n, long x, double log_abs_phi0,
                         int phi0_sign) {
  const double scale = scale_for<double>(fam, set, n, log_abs_phi0);
  return phi0_sign * specfun::evaluate_scaled(polynomial_series(fam, set, n, x), scale);
}

Extended normalized_vector_extended(const ValidatedFamily& fam, SetTag set, unsigned n, long x,
                                    Extended log_abs_phi0, int phi0_sign) {
  const Extended scale = scale_for<Extended>(fam, set, n, log_abs_phi0);
  return phi0_sign * specfun::evaluate_scaled_extended(series_in<Extended>(fam, set, n, x), scale);
}

}  // namespace bds::catalog
