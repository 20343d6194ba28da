#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracle.hpp"
#include "spectral.hpp"

// Invariant suites run against a solved basis.
namespace bds::verify {

enum class Level { Fast, Full };

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool asserted = true;  // false: reported only
  bool passed = true;
};

struct VerifyOptions {
  Level level = Level::Fast;
  std::uint64_t seed = 0;
  std::uint64_t samples = 200000;
  long walk_steps = 25;
  // Test hook: multiplies d_1^2 by this factor before any check runs.
  std::optional<double> corrupt_dn2;
};

struct VerifyReport {
  std::vector<Check> checks;
  oracle::OracleReport oracle;

  bool passed() const;
  std::vector<std::string> failing() const;
};

VerifyReport run(const spectral::SpectralBasis& basis, const VerifyOptions& options);
nlohmann::json to_json(const VerifyReport& report);

struct IdentityResidual {
  double off_diagonal = 0.0;
  double diagonal_inner = 0.0;  // over the inner two thirds of a truncated window
  double diagonal = 0.0;
};
IdentityResidual identity_residual(const Matrix& kernel, bool truncated);

// Eigenvectors 0..count-1 of `set`, as eigenvectors of the H of `chain`,
// evaluated far enough past `window_last` that their tails are negligible.
std::vector<std::vector<double>> extended_vectors(const catalog::ValidatedFamily& fam, catalog::SetTag chain,
                                                  catalog::SetTag set, unsigned count, long window_last);

// max |<u_n, v_m> - delta_nm| (or max |<u_n, v_m>| when `cross`).
double gram_error(const std::vector<std::vector<double>>& u, const std::vector<std::vector<double>>& v, bool cross);

// ||H~ P_n - E(n) P_n||_inf / max(1, ||P_n||_inf) over the rows that do not
// reach past a truncated window.
double eigen_residual(const chain::ChainOperators& ops, const std::vector<double>& p, double E);

// Sidecar residuals for a solved basis: stationarity, identity and, on
// finite lattices, orthonormality.
nlohmann::json residual_summary(const spectral::SpectralBasis& basis);

}  // namespace bds::verify
