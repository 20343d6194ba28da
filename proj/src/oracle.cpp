#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "errors.hpp"

namespace bds::oracle {
namespace {

constexpr int kMaxSweeps = 100;
constexpr int kMaxQlIterations = 60;
constexpr double kMinExpected = 5.0;

// SplitMix64: a counter-based stream, one per walk.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53; }

 private:
  std::uint64_t state_;
};

std::uint64_t walk_seed(std::uint64_t seed, std::uint64_t walk) {
  SplitMix64 mix(seed ^ (walk * 0xd1b54a32d192ed03ULL));
  return mix.next();
}

}  // namespace

Matrix to_dense(const Tridiagonal& t) {
  const std::size_t n = t.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = t.diag[i];
    if (i + 1 < n) {
      m(i + 1, i) = t.lower[i];
      m(i, i + 1) = t.upper[i];
    }
  }
  return m;
}

Matrix dense_power(const Matrix& m, long power) {
  if (power < 0) throw Error(ErrorKind::Param, "power", "matrix power must be nonnegative");
  Matrix result = Matrix::identity(m.rows());
  Matrix base = m;
  for (long e = power; e > 0; e >>= 1) {
    if (e & 1) result = result * base;
    if (e > 1) base = base * base;
  }
  return result;
}

// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
std::vector<double> spectrum_symmetric_tridiagonal(const Tridiagonal& t) {
  const std::size_t n = t.size();
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = t.lower[i];
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > kMaxQlIterations)
          throw Error(ErrorKind::Convergence, "ql", "tridiagonal QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool deflated = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            deflated = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (deflated) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

std::vector<double> spectrum_tridiagonal(const Tridiagonal& t) {
  Tridiagonal s = t;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double prod = t.lower[i] * t.upper[i];
    if (!(prod > 0.0)) throw Error(ErrorKind::Param, "offdiagonal", "off-diagonal products must be positive");
    const double off = std::copysign(std::sqrt(prod), t.lower[i]);
    s.lower[i] = off;
    s.upper[i] = off;
  }
  return spectrum_symmetric_tridiagonal(s);
}

// Cyclic Jacobi rotations.
std::vector<double> spectrum_symmetric(const Matrix& input) {
  Matrix a = input;
  const std::size_t n = a.rows();
  // Entries at rounding level are dropped instead of rotated.
  constexpr double kNegligible = 1e-18;
  double norm = 0.0;
  for (double v : a.data()) norm += v * v;
  norm = std::sqrt(norm);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    if (off <= 1e-32 * total || off == 0.0) {
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
      std::sort(d.begin(), d.end());
      return d;
    }
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::fabs(a(p, q)) <= kNegligible * norm) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, theta) / (std::fabs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  throw Error(ErrorKind::Convergence, "jacobi", "Jacobi sweeps did not converge");
}

std::vector<double> spectrum_similar_symmetric(const Matrix& m, const std::vector<double>& scale) {
  const std::size_t n = m.rows();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = m(i, j) * scale[j] / scale[i];
  // Symmetrise away the rounding left by the similarity.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) s(i, j) = s(j, i) = 0.5 * (s(i, j) + s(j, i));
  return spectrum_symmetric(s);
}

chain::Distribution SimulationResult::empirical() const {
  chain::Distribution d;
  d.values.resize(counts.size());
  const double total = static_cast<double>(samples);
  for (std::size_t x = 0; x < counts.size(); ++x) d.values[x] = static_cast<double>(counts[x]) / total;
  d.tail_mass = static_cast<double>(tail_events) / total;
  return d;
}

SimulationResult simulate(const chain::ChainOperators& ops, std::size_t start, long steps, std::uint64_t samples,
                          std::uint64_t seed, unsigned threads) {
  const std::size_t n = ops.lattice.points();
  if (start >= n) throw Error(ErrorKind::Lattice, "start", "start point outside the lattice");
  if (samples == 0) throw Error(ErrorKind::Param, "samples", "need at least one walk");
  if (steps < 0) throw Error(ErrorKind::Param, "steps", "step count must be nonnegative");
  std::vector<double> down(n), stay(n);
  for (std::size_t x = 0; x < n; ++x) {
    down[x] = ops.t_S * ops.death[x];
    stay[x] = 1.0 - ops.t_S * ops.birth[x];
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, samples));

  struct Partial {
    std::vector<std::uint64_t> counts;
    std::uint64_t tail = 0;
  };
  std::vector<Partial> partial(threads, Partial{std::vector<std::uint64_t>(n, 0), 0});
  auto work = [&](unsigned id) {
    Partial& mine = partial[id];
    const std::uint64_t begin = samples * id / threads;
    const std::uint64_t end = samples * (id + 1) / threads;
    for (std::uint64_t w = begin; w < end; ++w) {
      SplitMix64 rng(walk_seed(seed, w));
      std::size_t x = start;
      bool escaped = false;
      for (long s = 0; s < steps; ++s) {
        const double u = rng.uniform();
        if (u < down[x]) {
          --x;
        } else if (u >= stay[x]) {
          if (x + 1 == n) {
            escaped = true;
            break;
          }
          ++x;
        }
      }
      if (escaped)
        ++mine.tail;
      else
        ++mine.counts[x];
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(work, id);
    for (auto& t : pool) t.join();
  }
  SimulationResult result;
  result.counts.assign(n, 0);
  result.samples = samples;
  for (const Partial& p : partial) {
    for (std::size_t x = 0; x < n; ++x) result.counts[x] += p.counts[x];
    result.tail_events += p.tail;
  }
  result.flagged = result.tail_events > 0;
  return result;
}

ChiSquare chi_square(const std::vector<std::uint64_t>& counts, std::uint64_t tail_count,
                     const chain::Distribution& expected, std::uint64_t samples) {
  if (counts.size() != expected.values.size())
    throw Error(ErrorKind::Lattice, "counts", "observed and expected sizes differ");
  const double total = static_cast<double>(samples);
  std::vector<std::pair<double, double>> cells;  // (observed, expected count)
  double pooled_obs = 0.0, pooled_exp = 0.0;
  auto add = [&](double obs, double exp) {
    if (exp >= kMinExpected) {
      cells.emplace_back(obs, exp);
    } else {
      pooled_obs += obs;
      pooled_exp += exp;
    }
  };
  for (std::size_t x = 0; x < counts.size(); ++x)
    add(static_cast<double>(counts[x]), std::max(0.0, expected.values[x]) * total);
  if (expected.tail_mass > 0.0 || tail_count > 0) add(static_cast<double>(tail_count), expected.tail_mass * total);
  if (pooled_exp > 0.0) {
    if (pooled_exp >= kMinExpected || cells.empty()) {
      cells.emplace_back(pooled_obs, pooled_exp);
    } else {
      // Fold an undersized pool into the smallest proper cell.
      auto smallest = std::min_element(cells.begin(), cells.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
      smallest->first += pooled_obs;
      smallest->second += pooled_exp;
    }
  } else if (pooled_obs > 0.0) {
    cells.emplace_back(pooled_obs, 0.0);
  }
  if (cells.size() < 2) throw Error(ErrorKind::DegenerateBins, "cells", "fewer than two cells after pooling");
  ChiSquare result;
  for (const auto& [obs, exp] : cells) {
    if (exp == 0.0) {
      result.statistic = std::numeric_limits<double>::infinity();
      break;
    }
    result.statistic += (obs - exp) * (obs - exp) / exp;
  }
  result.dof = static_cast<int>(cells.size()) - 1;
  result.p_value = std::isinf(result.statistic) ? 0.0
                                                : boost::math::gamma_q(0.5 * result.dof, 0.5 * result.statistic);
  return result;
}

ChiSquare chi_square(const chain::Distribution& empirical, const chain::Distribution& expected,
                     std::uint64_t samples) {
  std::vector<std::uint64_t> counts(empirical.values.size());
  const double total = static_cast<double>(samples);
  for (std::size_t x = 0; x < counts.size(); ++x)
    counts[x] = static_cast<std::uint64_t>(std::llround(empirical.values[x] * total));
  const auto tail = static_cast<std::uint64_t>(std::llround(empirical.tail_mass * total));
  return chi_square(counts, tail, expected, samples);
}

void compare(OracleReport& report, const Matrix& a, const Matrix& b, double floor) {
  compare(report, a.data(), b.data(), floor);
}

void compare(OracleReport& report, const std::vector<double>& a, const std::vector<double>& b, double floor) {
  if (a.size() != b.size()) throw Error(ErrorKind::Lattice, "compare", "sizes differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double abs_err = std::fabs(a[i] - b[i]);
    report.max_abs_err = std::max(report.max_abs_err, abs_err);
    report.max_rel_err = std::max(report.max_rel_err, abs_err / std::max(std::fabs(b[i]), floor));
  }
}

}  // namespace bds::oracle
