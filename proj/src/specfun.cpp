#include "specfun.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "errors.hpp"

namespace bds::specfun {
namespace {

constexpr double kInfProductGuard = 0x1p-60;
// A q-factor (1 - a q^k) smaller than this (relative) is an exact zero that
// floating point q-powers failed to hit.
constexpr double kQZeroTol = 1e-13;

void require_q(double q) {
  if (!(q > 0.0 && q < 1.0))
    throw Error(ErrorKind::Param, "q", "q must lie in (0,1), got " + std::to_string(q));
}

namespace mp = boost::multiprecision;
using Quad = mp::cpp_bin_float_quad;
using Wide = mp::number<mp::cpp_bin_float<256, mp::digit_base_2>, mp::et_off>;
using Widest = mp::number<mp::cpp_bin_float<1024, mp::digit_base_2>, mp::et_off>;

// A sum is accepted once its rounding estimate is below this fraction of the
// result (a few bits past the output precision), or below the absolute floor
// (which catches exact zeros).
template <typename Out>
constexpr double kAcceptRelative = std::numeric_limits<Out>::epsilon() / 16;
constexpr double kAcceptAbsolute = 1e-40;

// A term of the series kept as mantissa * 2^exponent so that long products
// of large and small ratios never overflow before the final scaling.
template <typename Real>
class ScaledTerm {
 public:
  explicit ScaledTerm(long double log_scale) {
    const long double e2 = log_scale / std::log(2.0L);
    const long double whole = std::floor(e2);
    mantissa_ = exp(Real(log_scale) - Real(whole) * log(Real(2)));
    exponent_ = static_cast<std::int64_t>(whole);
  }
  void multiply(const Real& r) {
    mantissa_ *= r;
    if (mantissa_ == 0) return;
    int e = 0;
    mantissa_ = frexp(mantissa_, &e);
    exponent_ += e;
  }
  // The value as a double-range-checked Real; out-of-range terms saturate.
  Real value() const {
    if (exponent_ > 4000) return mantissa_ * ldexp(Real(1), 4000);
    if (exponent_ < -4000) return Real(0);
    return ldexp(mantissa_, static_cast<int>(exponent_));
  }

 private:
  Real mantissa_ = 1;
  std::int64_t exponent_ = 0;
};

template <typename Real>
Real int_power(Real base, long e) {
  if (e < 0) {
    base = 1 / base;
    e = -e;
  }
  Real r = 1;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

// Rewrites a plain value that is q^-m to rounding as the exact pair (1, -m).
SeriesParam snap(SeriesParam p, double q) {
  if (p.shift != 0 || !(p.base >= 1.0L)) return p;
  const long m = std::lround(std::log(p.base) / -std::log(static_cast<long double>(q)));
  if (m < 0 || m > 100000) return p;
  const long double target = std::pow(static_cast<long double>(q), -static_cast<long double>(m));
  if (std::fabs(p.base - target) <= kQZeroTol * target) return {1.0, -static_cast<int>(m)};
  return p;
}

SeriesSpec normalized(const SeriesSpec& spec) {
  if (!spec.q) return spec;
  SeriesSpec s = spec;
  for (auto& a : s.numerator) a = snap(a, *spec.q);
  for (auto& b : s.denominator) b = snap(b, *spec.q);
  return s;
}

void check_termination(const SeriesSpec& spec) {
  const long n = spec.order;
  for (const SeriesParam& a : spec.numerator) {
    if (!spec.q) {
      if (a.base + a.shift == -static_cast<long double>(n)) return;
    } else if (a.base == 1.0 && a.shift == -n) {
      return;
    }
  }
  throw Error(ErrorKind::Param, "numerator",
              "series of order " + std::to_string(spec.order) + " has no terminating numerator parameter");
}

// Ratio t_{k+1}/t_k of an ordinary series; returns 0 on numerator termination.
template <typename Real>
class OrdinaryRatio {
 public:
  explicit OrdinaryRatio(const SeriesSpec& spec) : spec_(spec) {}

  Real operator()(unsigned k) {
    Real r = 1;
    for (const SeriesParam& a : spec_.numerator) {
      const Real f = Real(a.base) + (a.shift + static_cast<long>(k));
      if (f == 0) return 0;
      r *= f;
    }
    for (std::size_t j = 0; j < spec_.denominator.size(); ++j) {
      const SeriesParam& b = spec_.denominator[j];
      const Real f = Real(b.base) + (b.shift + static_cast<long>(k));
      if (f == 0)
        throw Error(ErrorKind::Pole, "denominator[" + std::to_string(j) + "]",
                    "denominator Pochhammer vanishes at k=" + std::to_string(k));
      r /= f;
    }
    return r * Real(spec_.argument.base) / (k + 1);
  }

 private:
  const SeriesSpec& spec_;
};

template <typename Real>
class BasicRatio {
 public:
  explicit BasicRatio(const SeriesSpec& spec)
      : spec_(spec),
        q_(*spec.q),
        argument_(Real(spec.argument.base) * int_power(q_, spec.argument.shift)),
        balance_(1 + static_cast<int>(spec.denominator.size()) - static_cast<int>(spec.numerator.size())) {
    for (const auto& a : spec.numerator) numerator_.push_back(Real(a.base) * int_power(q_, a.shift));
    for (const auto& b : spec.denominator) denominator_.push_back(Real(b.base) * int_power(q_, b.shift));
  }

  // Returns t_{k+1}/t_k; call with k = 0, 1, 2, ... in order.
  Real operator()(unsigned k) {
    const long kk = k;
    Real r = 1;
    bool zero = false;
    for (std::size_t j = 0; j < numerator_.size(); ++j) {
      const SeriesParam& a = spec_.numerator[j];
      if (a.base == 1.0 && a.shift + kk == 0) {
        zero = true;
      } else if (a.base != 0.0) {
        const Real f = 1 - numerator_[j];
        if (abs(f) <= kQZeroTol * (1 + abs(numerator_[j]))) zero = true;
        r *= f;
      }
    }
    for (std::size_t j = 0; j < denominator_.size(); ++j) {
      const SeriesParam& b = spec_.denominator[j];
      const Real f = 1 - denominator_[j];
      if ((b.base == 1.0 && b.shift + kk == 0) || abs(f) <= kQZeroTol * (1 + abs(denominator_[j])))
        throw Error(ErrorKind::Pole, "denominator[" + std::to_string(j) + "]",
                    "denominator q-Pochhammer vanishes at k=" + std::to_string(k));
      r /= f;
    }
    r *= argument_ / (1 - qk_ * q_);
    // ((-1)^k q^{k(k-1)/2})^{1+s-r}, advanced from k to k+1.
    if (balance_ != 0) r *= int_power(Real(-qk_), balance_);
    qk_ *= q_;
    for (auto& v : numerator_) v *= q_;
    for (auto& v : denominator_) v *= q_;
    return zero ? Real(0) : r;
  }

 private:
  const SeriesSpec& spec_;
  Real q_;
  Real argument_;
  int balance_;
  Real qk_ = 1;
  std::vector<Real> numerator_;
  std::vector<Real> denominator_;
};

template <typename Out>
struct Attempt {
  Out value = 0;
  bool accurate = false;
};

template <typename Out, typename Real>
Attempt<Out> sum_scaled(const SeriesSpec& spec, long double log_scale) {
  Real sum = 0;
  Real magnitude = 0;
  ScaledTerm<Real> term(log_scale);
  auto run = [&](auto ratio) {
    for (unsigned k = 0;; ++k) {
      const Real t = term.value();
      sum += t;
      magnitude += abs(t);
      if (k == spec.order) break;
      const Real r = ratio(k);
      if (r == 0) break;
      term.multiply(r);
    }
  };
  if (spec.q)
    run(BasicRatio<Real>(spec));
  else
    run(OrdinaryRatio<Real>(spec));
  const Real rounding = magnitude * std::numeric_limits<Real>::epsilon() * (spec.order + 1);
  const Out value = static_cast<Out>(sum);
  const bool accurate = rounding <= kAcceptRelative<Out> * abs(sum) || rounding <= kAcceptAbsolute;
  return {value, accurate};
}

// Precision is raised until the rounding estimate of the alternating sum is
// negligible; catastrophic cancellation near the lattice corners needs it.
template <typename Out = double>
Out sum_series(const SeriesSpec& raw, long double log_scale) {
  if (raw.q) require_q(*raw.q);
  const SeriesSpec spec = normalized(raw);
  check_termination(spec);
  if (const auto a = sum_scaled<Out, Quad>(spec, log_scale); a.accurate) return a.value;
  if (const auto a = sum_scaled<Out, Wide>(spec, log_scale); a.accurate) return a.value;
  return sum_scaled<Out, Widest>(spec, log_scale).value;
}

}  // namespace

double pochhammer(double a, unsigned k) {
  double r = 1.0;
  for (unsigned j = 0; j < k; ++j) r *= a + j;
  return r;
}

double q_pochhammer(double a, double q, unsigned k) {
  require_q(q);
  double r = 1.0;
  double aqj = a;
  for (unsigned j = 0; j < k; ++j) {
    r *= 1.0 - aqj;
    aqj *= q;
  }
  return r;
}

double q_pochhammer_inf(double a, double q) {
  require_q(q);
  double r = 1.0;
  double aqj = a;
  for (int j = 0; std::fabs(aqj) >= kInfProductGuard; ++j) {
    if (j > 100000)
      throw Error(ErrorKind::Convergence, "q", "infinite q-product did not converge");
    r *= 1.0 - aqj;
    aqj *= q;
  }
  return r;
}

SignedLog log_q_pochhammer(double a, double q, unsigned k) {
  require_q(q);
  SignedLog r;
  double aqj = a;
  for (unsigned j = 0; j < k; ++j) {
    r *= SignedLog::of(1.0 - aqj);
    aqj *= q;
  }
  return r;
}

SignedLog log_q_pochhammer_inf(double a, double q) {
  require_q(q);
  SignedLog r;
  double aqj = a;
  for (int j = 0; std::fabs(aqj) >= kInfProductGuard; ++j) {
    if (j > 100000)
      throw Error(ErrorKind::Convergence, "q", "infinite q-product did not converge");
    r *= SignedLog::of(1.0 - aqj);
    aqj *= q;
  }
  return r;
}

SignedLog log_pochhammer(double a, unsigned k) {
  SignedLog r;
  for (unsigned j = 0; j < k; ++j) r *= SignedLog::of(a + j);
  return r;
}

double SeriesParam::value(const std::optional<double>& q) const {
  if (!q) return static_cast<double>(base + shift);
  return static_cast<double>(base * std::pow(static_cast<long double>(*q), static_cast<long double>(shift)));
}

double hyper_terminating(const SeriesSpec& spec) {
  if (spec.q) throw Error(ErrorKind::Param, "q", "ordinary series takes no q");
  return sum_series(spec, 0.0);
}

double q_hyper_terminating(const SeriesSpec& spec) {
  require_q(spec.q.value_or(-1.0));
  return sum_series(spec, 0.0);
}

double hyper_terminating_scaled(const SeriesSpec& spec, double log_scale) {
  if (spec.q) throw Error(ErrorKind::Param, "q", "ordinary series takes no q");
  return sum_series(spec, log_scale);
}

double q_hyper_terminating_scaled(const SeriesSpec& spec, double log_scale) {
  require_q(spec.q.value_or(-1.0));
  return sum_series(spec, log_scale);
}

double evaluate(const SeriesSpec& spec) { return sum_series(spec, 0.0); }

double evaluate_scaled(const SeriesSpec& spec, double log_scale) { return sum_series(spec, log_scale); }

long double evaluate_scaled_extended(const SeriesSpec& spec, long double log_scale) {
  return sum_series<long double>(spec, log_scale);
}

}  // namespace bds::specfun
