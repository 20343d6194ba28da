#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "matrix.hpp"

// Operator forms of a discrete-time birth and death chain with bounded rates.
namespace bds::chain {

struct Lattice {
  bool truncated = false;
  long last = 0;           // N for finite lattices, the cutoff M otherwise
  double tail_mass = 0.0;  // stationary mass beyond the cutoff

  std::size_t points() const noexcept { return static_cast<std::size_t>(last + 1); }

  static Lattice finite(long N) { return {false, N, 0.0}; }
  static Lattice window(long M, double tail) { return {true, M, tail}; }
};

// Probability vector over the lattice plus the mass that has left the window.
struct Distribution {
  std::vector<double> values;
  double tail_mass = 0.0;
  // Set when a closed-form evaluation returned entries below -1e-10, which
  // only happens when mode truncation is too aggressive.
  bool negative_probability = false;

  double total() const;
  static Distribution delta(std::size_t points, std::size_t at);
};

// t_S given outright, or as theta / max(B+D).
struct TimeStep {
  std::optional<double> fixed;
  double theta = 0.5;

  static TimeStep automatic(double theta = 0.5) { return {std::nullopt, theta}; }
  static TimeStep explicit_value(double t) { return {t, 0.5}; }
};

struct ChainOperators {
  Lattice lattice;
  std::vector<double> birth;
  std::vector<double> death;
  double t_S = 0.0;
  double rate_bound = 0.0;  // the max(B+D) that t_S was checked against
  std::vector<double> phi0;
  std::vector<double> log_phi0;
  Distribution pi;
};

// Rates at a lattice point, for chains generated from a formula.
using RateFunction = std::function<std::pair<double, double>(long)>;

// max(B+D) over a finite lattice, or over a window combined with the x->inf
// limit when one is known (else the window max inflated by 5%).
double max_total_rate(const std::vector<double>& birth, const std::vector<double>& death, const Lattice& lattice,
                      std::optional<double> limit = std::nullopt);

ChainOperators build(std::vector<double> birth, std::vector<double> death, const Lattice& lattice, TimeStep step,
                     std::optional<double> rate_limit = std::nullopt);

struct Cutoff {
  long M = 0;
  double tail_mass = 0.0;
};

// Smallest M whose stationary tail is below eps_tail and where B+D is within
// 1% of its limit. With `forced`, M is taken as given and only the tail is
// measured.
Cutoff choose_cutoff(const RateFunction& rates, double eps_tail, std::optional<double> limit,
                     std::optional<long> forced = std::nullopt);

ChainOperators build_semi_infinite(const RateFunction& rates, double eps_tail, TimeStep step,
                                   std::optional<double> rate_limit, std::optional<long> forced_cutoff = std::nullopt);

Distribution apply_L(const ChainOperators& ops, const Distribution& dist);
std::vector<double> apply_LBD(const ChainOperators& ops, const std::vector<double>& v);

struct Factorized {
  Tridiagonal H;
  Tridiagonal A;  // upper bidiagonal, H = A^T A
};

Factorized build_H(const ChainOperators& ops);
Tridiagonal Htilde(const ChainOperators& ops);
Tridiagonal LBD(const ChainOperators& ops);
Tridiagonal L(const ChainOperators& ops);

// P-check(x) from P-check(0) = 1 through the forward three-term relation.
std::vector<double> eigenvector_by_recurrence(const std::vector<double>& birth, const std::vector<double>& death,
                                              double E, const Lattice& lattice);

}  // namespace bds::chain
