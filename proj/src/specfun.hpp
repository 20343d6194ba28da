#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

// Finite products and terminating (basic) hypergeometric sums.
namespace bds::specfun {

// (a)_k = a (a+1) ... (a+k-1).
double pochhammer(double a, unsigned k);

// (a;q)_k = prod_{j<k} (1 - a q^j). Requires 0 < q < 1.
double q_pochhammer(double a, double q, unsigned k);

// (a;q)_inf. The product stops once |a q^j| < 2^-60.
double q_pochhammer_inf(double a, double q);

// log|v| and the sign of v, for products that leave double range.
template <typename Real>
struct BasicSignedLog {
  Real log_abs = 0;
  int sign = 1;

  BasicSignedLog& operator*=(const BasicSignedLog& o) {
    log_abs += o.log_abs;
    sign *= o.sign;
    return *this;
  }
  BasicSignedLog& operator/=(const BasicSignedLog& o) {
    log_abs -= o.log_abs;
    sign *= o.sign;
    return *this;
  }
  static BasicSignedLog of(Real v) {
    BasicSignedLog s;
    s.sign = v < 0 ? -1 : (v > 0 ? 1 : 0);
    s.log_abs = v == 0 ? -std::numeric_limits<Real>::infinity() : std::log(std::fabs(v));
    return s;
  }
  Real value() const { return sign * std::exp(log_abs); }
};

using SignedLog = BasicSignedLog<double>;

SignedLog log_q_pochhammer(double a, double q, unsigned k);
SignedLog log_q_pochhammer_inf(double a, double q);
SignedLog log_pochhammer(double a, unsigned k);

// A series parameter written as base + shift (ordinary series) or
// base * q^shift (basic series). Keeping the integer part separate lets
// q^-n, q^-x and -n, -x be formed exactly, so termination and the exact
// zeros of the q-Pochhammer factors never depend on floating point luck.
struct SeriesParam {
  long double base = 0.0L;
  int shift = 0;

  SeriesParam(long double v = 0.0L) : base(v) {}  // NOLINT: plain values convert
  SeriesParam(long double b, int s) : base(b), shift(s) {}

  double value(const std::optional<double>& q) const;
};

// r F s (ordinary, q absent) or r phi s (basic, q present), terminating after
// `order` + 1 terms. One numerator parameter must be -order (ordinary) or
// q^-order (basic). Sums are carried in quadruple precision.
struct SeriesSpec {
  std::vector<SeriesParam> numerator;
  std::vector<SeriesParam> denominator;
  SeriesParam argument;
  unsigned order = 0;
  std::optional<double> q;
};

double hyper_terminating(const SeriesSpec& spec);
double q_hyper_terminating(const SeriesSpec& spec);

// exp(log_scale) * series, with the scale folded into every term before the
// terms are summed. Used where the prefactor and the sum individually leave
// double range but their product does not.
double hyper_terminating_scaled(const SeriesSpec& spec, double log_scale);
double q_hyper_terminating_scaled(const SeriesSpec& spec, double log_scale);

// Dispatches on spec.q.
double evaluate(const SeriesSpec& spec);
double evaluate_scaled(const SeriesSpec& spec, double log_scale);
// The same sum rounded to long double, accurate to its precision.
long double evaluate_scaled_extended(const SeriesSpec& spec, long double log_scale);

}  // namespace bds::specfun
