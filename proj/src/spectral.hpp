#pragma once

#include <optional>
#include <vector>

#include "catalog.hpp"
#include "chain.hpp"
#include "matrix.hpp"

// Closed-form evolution and transition kernels built from the eigenvectors
// of one chain, with a second branch of eigenvectors for two-set families.
namespace bds::spectral {

struct Branch {
  catalog::SetTag set = catalog::SetTag::Basic;
  std::vector<double> E;
  std::vector<double> kappa;
  std::vector<double> log_dn2;
  Matrix vectors;  // row n holds the orthonormal eigenvector of H for E[n]
  // The same eigenvectors and kappa in extended precision, row-major. Sums
  // whose terms are scaled by ground-state ratios are carried in these.
  std::vector<catalog::Extended> precise;
  std::vector<catalog::Extended> E_precise;
  std::vector<catalog::Extended> kappa_precise;

  catalog::Extended precise_at(std::size_t n, std::size_t x) const { return precise[n * vectors.cols() + x]; }
};

struct SpectralBasis {
  catalog::ValidatedFamily family;
  catalog::SetTag chain = catalog::SetTag::Basic;
  chain::ChainOperators ops;
  Branch primary;
  std::optional<Branch> secondary;
  // Largest |entry| of the last retained mode in each branch; zero on finite lattices.
  double truncation_residual = 0.0;
  // max/min of the ground state. Kernel entries lose roughly this factor
  // times machine epsilon to cancellation.
  double kernel_condition = 1.0;
  // Set on the dual system J L J, whose vectors are the reflected originals.
  bool reflected = false;

  std::size_t points() const { return ops.lattice.points(); }
  // Primary ground state, positive on the lattice.
  double ground(std::size_t x) const { return primary.vectors(0, x); }
};

struct ChainOptions {
  chain::TimeStep step = chain::TimeStep::automatic();
  double eps_tail = 1e-12;
  std::optional<long> cutoff;
};

// Operators of the chain driven by the rates of `chain` (Basic or Minus).
chain::ChainOperators family_chain(const catalog::ValidatedFamily& fam, catalog::SetTag chain,
                                   const ChainOptions& options);

SpectralBasis solve(const catalog::ValidatedFamily& fam, const ChainOptions& options = {});
// The chain built from B^(-), D^(-), solved with the two eigenvector sets in
// swapped roles.
SpectralBasis minus_chain_solver(const catalog::ValidatedFamily& fam, const ChainOptions& options = {});
SpectralBasis make_basis(const catalog::ValidatedFamily& fam, catalog::SetTag chain, chain::ChainOperators ops);

// phi-hat_n on 0..last of the given set, signed as an eigenvector of the
// symmetric H of `chain`. Lets inner products be summed past the window.
std::vector<double> eigenvector(const catalog::ValidatedFamily& fam, catalog::SetTag chain, catalog::SetTag set,
                                unsigned n, long last);

struct ExpansionCoefficients {
  std::vector<catalog::Extended> c;
  std::optional<std::vector<catalog::Extended>> c_minus;
};

ExpansionCoefficients expand(const SpectralBasis& basis, const chain::Distribution& dist);
chain::Distribution evolve_discrete(const SpectralBasis& basis, const ExpansionCoefficients& coeffs, long steps);
chain::Distribution evolve_continuous(const SpectralBasis& basis, const ExpansionCoefficients& coeffs, double t);

// Entry (x, y) is the probability of going from y to x.
Matrix transition_matrix_discrete(const SpectralBasis& basis, long steps);
Matrix transition_matrix_continuous(const SpectralBasis& basis, double t);

struct SpectralMatrices {
  Matrix H;
  Matrix LBD;
  Matrix L;
};
SpectralMatrices spectral_matrices(const SpectralBasis& basis);

// kappa^steps by repeated squaring.
double kappa_power(double kappa, long steps);
catalog::Extended kappa_power(catalog::Extended kappa, long steps);

}  // namespace bds::spectral
