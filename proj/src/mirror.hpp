#pragma once

#include <vector>

#include "chain.hpp"
#include "matrix.hpp"
#include "spectral.hpp"

// Mirror-symmetric chains: L^M = L J and the accelerated L^S = (L + L J) / 2.
namespace bds::mirror {

struct MirrorChain {
  spectral::SpectralBasis base;
  std::vector<double> kappa_S;
  std::vector<double> kappa_M;
};

// Requires D(N-x) = B(x) and P-check_n(N-x) = (-1)^n P-check_n(x).
MirrorChain build_mirror(spectral::SpectralBasis basis);

std::vector<double> reflect(const std::vector<double>& v);

chain::Distribution apply_LM(const MirrorChain& mc, const chain::Distribution& dist);
chain::Distribution apply_LS(const MirrorChain& mc, const chain::Distribution& dist);
const std::vector<double>& eigensystem_LS(const MirrorChain& mc);

// Closed-form evolution under L^S.
chain::Distribution evolve_LS(const MirrorChain& mc, const chain::Distribution& initial, long steps);

// Dense L^M, L^S and L_BD^M = L_BD J. The last is not a generator of any
// process and is exposed for eigen-tests only.
Matrix LM_matrix(const MirrorChain& mc);
Matrix LS_matrix(const MirrorChain& mc);
Matrix LBD_M_matrix(const MirrorChain& mc);

// The chain J L J with B^d(x) = D(N-x), D^d(x) = B(N-x).
spectral::SpectralBasis dual_system(const spectral::SpectralBasis& basis);

}  // namespace bds::mirror
