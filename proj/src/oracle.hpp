#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chain.hpp"
#include "matrix.hpp"

// Brute-force references: dense linear algebra and Monte-Carlo walks.
namespace bds::oracle {

Matrix to_dense(const Tridiagonal& t);
Matrix dense_power(const Matrix& m, long power);

// Eigenvalues, ascending.
std::vector<double> spectrum_symmetric_tridiagonal(const Tridiagonal& t);
// Tridiagonal with lower[i]*upper[i] > 0, symmetrised by a diagonal similarity.
std::vector<double> spectrum_tridiagonal(const Tridiagonal& t);
std::vector<double> spectrum_symmetric(const Matrix& m);
// Spectrum of a matrix M for which D^-1 M D is symmetric, D = diag(scale).
std::vector<double> spectrum_similar_symmetric(const Matrix& m, const std::vector<double>& scale);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

struct SimulationResult {
  std::vector<std::uint64_t> counts;
  std::uint64_t tail_events = 0;  // walks that stepped past a truncation cutoff
  std::uint64_t samples = 0;
  bool flagged = false;

  chain::Distribution empirical() const;
};

// `threads` = 0 picks the hardware concurrency. Results do not depend on it.
SimulationResult simulate(const chain::ChainOperators& ops, std::size_t start, long steps, std::uint64_t samples,
                          std::uint64_t seed, unsigned threads = 0);

// Pearson statistic; cells with expected count below 5 are pooled. The tail
// mass, when present, is one more cell.
ChiSquare chi_square(const std::vector<std::uint64_t>& counts, std::uint64_t tail_count,
                     const chain::Distribution& expected, std::uint64_t samples);
ChiSquare chi_square(const chain::Distribution& empirical, const chain::Distribution& expected,
                     std::uint64_t samples);

struct OracleReport {
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  double tail_bound_used = 0.0;
  std::vector<double> spectrum_closed;
  std::vector<double> spectrum_numeric;
  std::optional<ChiSquare> chi_square;
};

// Element-wise comparison; relative error is taken against max(|b|, floor).
void compare(OracleReport& report, const Matrix& a, const Matrix& b, double floor = 1e-300);
void compare(OracleReport& report, const std::vector<double>& a, const std::vector<double>& b,
             double floor = 1e-300);

}  // namespace bds::oracle
