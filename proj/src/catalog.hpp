#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specfun.hpp"

// Birth/death rates, spectra, weights, norms and eigenvectors of the fifteen
// hypergeometric families whose birth and death rates stay bounded.
namespace bds::catalog {

enum class FamilyId {
  Krawtchouk,
  Hahn,
  DualHahn,
  Racah,
  AffineQKrawtchouk,
  QKrawtchouk,
  QuantumQKrawtchouk,
  QHahn,
  DualQHahn,
  QRacah,
  AlSalamCarlitzII,
  QMeixner,
  QCharlier,
  DualBigQJacobi,
  DualBigQLaguerre,
};

inline constexpr std::size_t kFamilyCount = 15;

// Basic is the set generated by the family's own B, D; Minus is the second,
// involution-related set that two-set families need for completeness. As a
// chain selector, Minus means the chain driven by B^(-), D^(-).
enum class SetTag { Basic, Minus };

inline SetTag other(SetTag s) { return s == SetTag::Basic ? SetTag::Minus : SetTag::Basic; }

enum class LatticeKind { Finite, SemiInfinite };

struct FamilyInfo {
  FamilyId id;
  std::string_view name;      // canonical CLI name
  std::string_view display;
  std::vector<std::string_view> params;  // free parameters besides N
  LatticeKind lattice;
  bool has_minus_set;
  std::string_view sinusoidal;  // eta(x)
  std::string_view constraints;
};

const std::array<FamilyInfo, kFamilyCount>& families();
const FamilyInfo& info(FamilyId id);
// Accepts the canonical name, the enum spelling, any case, with or without
// '-', '_' or spaces.
std::optional<FamilyId> family_from_name(std::string_view name);

struct FamilySpec {
  FamilyId id = FamilyId::Krawtchouk;
  std::map<std::string, double> params;
  std::optional<int> N;
};

struct Params {
  static constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();
  double p = kAbsent;
  double a = kAbsent;
  double b = kAbsent;
  double c = kAbsent;
  double d = kAbsent;
  double q = kAbsent;
  int N = -1;

  bool operator==(const Params& o) const;
};

class ValidatedFamily {
 public:
  FamilyId id() const noexcept { return id_; }
  const FamilyInfo& info() const { return catalog::info(id_); }
  const Params& params() const noexcept { return params_; }
  bool finite() const noexcept { return params_.N >= 0; }
  int N() const noexcept { return params_.N; }
  bool has_minus_set() const { return info().has_minus_set; }
  // True for the image of a validated point under the family involution.
  // Such points may sit outside the representative parameter range.
  bool involuted() const noexcept { return involuted_; }
  // Pre-image of an involuted point.
  const Params& origin() const noexcept { return origin_; }

  FamilySpec spec() const;

  bool operator==(const ValidatedFamily& o) const {
    return id_ == o.id_ && params_ == o.params_ && involuted_ == o.involuted_;
  }

 private:
  ValidatedFamily(FamilyId id, Params p, bool involuted) : id_(id), params_(p), involuted_(involuted) {}
  friend ValidatedFamily validate(const FamilySpec& spec);
  friend ValidatedFamily involution(const ValidatedFamily& fam);

  FamilyId id_;
  Params params_;
  bool involuted_ = false;
  Params origin_;  // pre-image, set when involuted_
};

ValidatedFamily validate(const FamilySpec& spec);
ValidatedFamily involution(const ValidatedFamily& fam);

template <typename Real>
struct RatesOf {
  Real birth = 0;
  Real death = 0;
};
using Rates = RatesOf<double>;

// Wider than double. Kernels that divide ground-state entries of very
// different size cancel below double precision and are summed in this type.
using Extended = long double;

// Rates of the chain selected by `chain` (Minus needs a two-set family).
Rates rates(const ValidatedFamily& fam, SetTag chain, long x);
RatesOf<Extended> rates_extended(const ValidatedFamily& fam, SetTag chain, long x);

// lim_{x->inf} B(x)+D(x) for semi-infinite families.
double total_rate_limit(const ValidatedFamily& fam, SetTag chain);

// Eigenvalue of the chain `chain` carried by eigenvector set `set`:
//   (Basic, Basic) E(n)   (Basic, Minus) E'(n)
//   (Minus, Minus) E(n) of the minus chain   (Minus, Basic) E^(+)'(n)
double eigenvalue(const ValidatedFamily& fam, SetTag chain, SetTag set, unsigned n);
Extended eigenvalue_extended(const ValidatedFamily& fam, SetTag chain, SetTag set, unsigned n);
inline double eigenvalue(const ValidatedFamily& fam, SetTag set, unsigned n) {
  return eigenvalue(fam, set, set, n);
}
inline double second_eigenvalue(const ValidatedFamily& fam, SetTag chain, unsigned n) {
  return eigenvalue(fam, chain, other(chain), n);
}

double eta(const ValidatedFamily& fam, long x);

// phi_0(x)^2. Finite lattices use the closed form, semi-infinite ones the
// running product of B(y)/D(y+1).
double weight(const ValidatedFamily& fam, SetTag set, long x);
double weight_closed_form(const ValidatedFamily& fam, SetTag set, long x);
// phi_0(x) with its sign; (-1)^x phi_0^(-)(x) > 0.
double signed_ground(const ValidatedFamily& fam, SetTag set, long x);

// d_n^2 and its logarithm.
double norm_const(const ValidatedFamily& fam, SetTag set, unsigned n);
specfun::SignedLog log_norm_const(const ValidatedFamily& fam, SetTag set, unsigned n);

specfun::SeriesSpec polynomial_series(const ValidatedFamily& fam, SetTag set, unsigned n, long x);
// P-check_n(x) = P_n(eta(x)).
double polynomial(const ValidatedFamily& fam, SetTag set, unsigned n, long x);
// d_n * phi_0(x) * P-check_n(x), given log|phi_0(x)| and its sign.
double normalized_vector(const ValidatedFamily& fam, SetTag set, unsigned n, long x,
                         double log_abs_phi0, int phi0_sign);
Extended normalized_vector_extended(const ValidatedFamily& fam, SetTag set, unsigned n, long x,
                                    Extended log_abs_phi0, int phi0_sign);

}  // namespace bds::catalog
