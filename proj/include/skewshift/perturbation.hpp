#pragma once
// Series coefficients of the torus-averaged trace polynomial
//
//   P_n(lambda) = E_{T^2}[ Tr M_n^T M_n ] = sum_{k=0}^n alpha_{2k} lambda^{2k}
//
// computed three independent ways so they can cross-check each other:
//
//  (1) Combinatorial brute force. alpha_{2k} sums, over pairs of strictly
//      increasing index tuples (j, l) with |j| + |l| = 2k that satisfy the
//      "club" parity conditions (j1 - l1 even, consecutive gaps within each
//      tuple odd) and |j| - |l| = 0 mod 4, the torus expectation of the
//      monomial v_{j_1} ... v_{l_{k_2}}. That expectation reduces to a sum of
//      cosines over balanced sign vectors a (a_1 = +1, sum a_s = 0) that are
//      also orthogonal to the index vector; the surviving phase is
//      (w/2) sum_s a_s j_s^2.
//  (2) Closed forms: alpha_2 = 2n, and alpha_4 as a positive combination of
//      squared moduli of the prefix Weyl sums S_m(w).
//  (3) A polynomial-extraction oracle: at every point of an exact grid the
//      cocycle entries are carried as polynomials in lambda, Tr[M^T M] is
//      squared out symbolically, and the coefficients are averaged.
//
// The non-averaged coefficients beta_{2k} (same tuple sum, signed by
// (-1)^{(|j|-|l|)/2}, no mod-4 filter) resum pointwise to Tr[M_n^T M_n],
// and their omega-averages feed the lambda^4 cancellation diagnostic. The
// Almost-Mathieu analogue replaces the quadratic phase with a linear one and
// its alpha~_2 stays bounded in n, the structural contrast to alpha_2 = 2n.

#include <array>
#include <bit>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "skewshift/cocycle.hpp"
#include "skewshift/weyl.hpp"

namespace skewshift {

using IndexTuple = std::vector<i64>;

// Club condition: j1 - l1 even (when both tuples are nonempty), and all
// consecutive differences within each tuple odd. Empty tuples satisfy their
// conditions vacuously.
inline bool club_indicator(std::span<const i64> j, std::span<const i64> l) {
  if (!j.empty() && !l.empty() && ((j[0] - l[0]) % 2 + 2) % 2 != 0) return false;
  for (std::size_t s = 0; s + 1 < j.size(); ++s)
    if (((j[s + 1] - j[s]) % 2 + 2) % 2 != 1) return false;
  for (std::size_t s = 0; s + 1 < l.size(); ++s)
    if (((l[s + 1] - l[s]) % 2 + 2) % 2 != 1) return false;
  return true;
}

namespace detail {

constexpr int kMaxSignLen = 24;

// Balanced sign vectors of length k0 with a_1 = +1, encoded as bitmasks of
// the minus positions (bit 0 never set). C(k0-1, k0/2) masks per length.
inline const std::vector<std::uint32_t>& sign_masks(int k0) {
  static std::array<std::vector<std::uint32_t>, kMaxSignLen + 1> cache;
  static std::array<std::once_flag, kMaxSignLen + 1> flags;
  std::call_once(flags[std::size_t(k0)], [k0] {
    std::vector<std::uint32_t>& masks = cache[std::size_t(k0)];
    const int h = k0 / 2;
    if (h == 0) {
      masks.push_back(0);
      return;
    }
    const std::uint32_t limit = std::uint32_t(1) << k0;
    std::uint32_t v = (std::uint32_t(1) << h) - 1;  // smallest h-bit pattern
    while (v < limit) {
      if ((v & 1u) == 0) masks.push_back(v);
      std::uint32_t c = v & (~v + 1);
      std::uint32_t r = v + c;
      v = (((r ^ v) >> 2) / c) | r;  // Gosper: next pattern of equal popcount
    }
  });
  return cache[std::size_t(k0)];
}

// Strictly increasing tuples in [1, n] whose consecutive gaps are all odd.
inline void odd_gap_tuples_rec(i64 n, int len, IndexTuple& cur,
                               std::vector<IndexTuple>& out) {
  if (int(cur.size()) == len) {
    out.push_back(cur);
    return;
  }
  const i64 lo = cur.empty() ? 1 : cur.back() + 1;
  const i64 step = cur.empty() ? 1 : 2;
  for (i64 v = lo; v <= n; v += step) {
    cur.push_back(v);
    odd_gap_tuples_rec(n, len, cur, out);
    cur.pop_back();
  }
}

inline std::vector<IndexTuple> odd_gap_tuples(i64 n, int len) {
  std::vector<IndexTuple> out;
  IndexTuple cur;
  cur.reserve(std::size_t(len));
  odd_gap_tuples_rec(n, len, cur, out);
  return out;
}

// Common engine for every series coefficient: sum of term(j, l) over
// club-admissible tuple pairs with |j| + |l| = 2k, optionally restricted to
// |j| - |l| = 0 mod 4 and optionally signed by (-1)^{(|j|-|l|)/2}. The odd-gap
// generator bakes the within-tuple club conditions into the enumeration, so
// only the first-element parity is checked per pair.
template <class Term>
double club_pair_sum(i64 n, i64 k, bool mod4_filter, bool use_sign,
                     Term&& term) {
  Kahan acc;
  for (i64 k1 = std::max<i64>(0, 2 * k - n); k1 <= std::min(2 * k, n); ++k1) {
    const i64 k2 = 2 * k - k1;
    const i64 half = (k1 - k2) / 2;
    const bool odd_half = ((half % 2) + 2) % 2 == 1;
    if (mod4_filter && odd_half) continue;
    const double sign = (use_sign && odd_half) ? -1.0 : 1.0;
    const auto js = odd_gap_tuples(n, int(k1));
    const auto ls = odd_gap_tuples(n, int(k2));
    for (const IndexTuple& j : js)
      for (const IndexTuple& l : ls) {
        if (!j.empty() && !l.empty() && ((j[0] - l[0]) % 2 + 2) % 2 != 0)
          continue;
        acc.add(sign * term(j, l));
      }
  }
  return acc.value();
}

}  // namespace detail

// E_{T^2}[ v_{j_1} ... v_{j_{k0}} ] as a cosine series over balanced sign
// vectors orthogonal to the index vector; repeated indices represent powers.
// Zero for odd k0 (no balanced vector exists).
inline double monomial_expectation(std::span<const i64> idx,
                                   const Frequency& omega) {
  const int k0 = int(idx.size());
  if (k0 == 0) return 1.0;
  if (k0 & 1) return 0.0;
  if (k0 > detail::kMaxSignLen)
    throw std::invalid_argument("monomial_expectation: tuple too long");
  i64 t1 = 0, t2 = 0;
  for (i64 j : idx) {
    t1 += j;
    t2 += j * j;
  }
  Kahan acc;
  for (std::uint32_t mask : detail::sign_masks(k0)) {
    i64 s1 = 0, s2 = 0;
    for (std::uint32_t m = mask; m; m &= m - 1) {
      const int s = std::countr_zero(m);
      s1 += idx[std::size_t(s)];
      s2 += idx[std::size_t(s)] * idx[std::size_t(s)];
    }
    if (2 * s1 != t1) continue;  // needs a . j = 0
    acc.add(std::cos(kTwoPi * omega.phase_half_times(t2 - 2 * s2)));
  }
  return 2.0 * acc.value();
}

namespace detail {

// theta-averaged monomial of the AMO potential: the surviving phase is
// linear, w * sum a_s j_s, and no orthogonality to j is required.
inline double amo_monomial_sum(std::span<const i64> idx,
                               const Frequency& omega) {
  const int k0 = int(idx.size());
  if (k0 == 0) return 1.0;
  if (k0 & 1) return 0.0;
  if (k0 > kMaxSignLen)
    throw std::invalid_argument("amo_monomial_sum: tuple too long");
  i64 t1 = 0;
  for (i64 j : idx) t1 += j;
  Kahan acc;
  for (std::uint32_t mask : sign_masks(k0)) {
    i64 s1 = 0;
    for (std::uint32_t m = mask; m; m &= m - 1)
      s1 += idx[std::size_t(std::countr_zero(m))];
    acc.add(std::cos(kTwoPi * omega.phase_times(t1 - 2 * s1)));
  }
  return 2.0 * acc.value();
}

}  // namespace detail

// alpha_{2k} by direct enumeration; alpha_0 = 2.
inline double alpha_bruteforce(i64 n, i64 k, const Frequency& omega) {
  if (n < 1) throw std::invalid_argument("alpha_bruteforce: n must be >= 1");
  if (k < 0 || k > n)
    throw std::invalid_argument("alpha_bruteforce: order must satisfy 0 <= k <= n");
  if (k == 0) return 2.0;
  IndexTuple combined;
  combined.reserve(std::size_t(2 * k));
  return detail::club_pair_sum(
      n, k, /*mod4_filter=*/true, /*use_sign=*/false,
      [&](const IndexTuple& j, const IndexTuple& l) {
        combined.assign(j.begin(), j.end());
        combined.insert(combined.end(), l.begin(), l.end());
        return monomial_expectation(combined, omega);
      });
}

namespace detail {

// Pre-filter form of alpha_{2k}: all k1 + k2 = 2k pairs, signed by
// (-1)^{(k1-k2)/2}. For the skew-shift potential the k1 - k2 = 2 mod 4
// blocks have vanishing expectation, so this must equal alpha_bruteforce.
inline double alpha_bruteforce_prefilter(i64 n, i64 k, const Frequency& omega) {
  if (k == 0) return 2.0;
  IndexTuple combined;
  return club_pair_sum(n, k, /*mod4_filter=*/false, /*use_sign=*/true,
                       [&](const IndexTuple& j, const IndexTuple& l) {
                         combined.assign(j.begin(), j.end());
                         combined.insert(combined.end(), l.begin(), l.end());
                         return monomial_expectation(combined, omega);
                       });
}

}  // namespace detail

inline double alpha2_closed(i64 n) {
  if (n < 1) throw std::invalid_argument("alpha2_closed: n must be >= 1");
  return 2.0 * double(n);
}

// alpha_4 = 4 sum_{m <= n/2} |S_m|^2 + 4 sum_{m <= (n-1)/2} |S_m|^2; the
// n = 1 coefficient is absent and reported as 0.
inline double alpha4_closed(i64 n, const Frequency& omega) {
  if (n < 1) throw std::invalid_argument("alpha4_closed: n must be >= 1");
  if (n < 2) return 0.0;
  const i64 m1 = n / 2, m2 = (n - 1) / 2;
  Kahan full, part;
  detail::weyl_scan(m1, omega, WeylKind::linear_shifted, [&](i64 m, cplx s) {
    const double a = std::norm(s);
    full.add(a);
    if (m <= m2) part.add(a);
  });
  return 4.0 * (full.value() + part.value());
}

enum class CoeffMethod { bruteforce, closed, oracle };

struct CoefficientTable {
  i64 n = 0;
  Frequency omega;
  std::vector<double> coeffs;  // coeffs[k] = alpha_{2k}, k = 0..n
  CoeffMethod method = CoeffMethod::oracle;
  double max_odd_abs = 0.0;  // oracle: largest |odd-power coefficient|
  bool grid_exact = true;
};

// Independent oracle: carry the cocycle entries as polynomials in lambda at
// every point of the exact grid, square out Tr[M^T M], average coefficients.
inline CoefficientTable poly_oracle(i64 n, const Frequency& omega,
                                    GridSpec grid = {}, int threads = 0) {
  if (n < 1) throw std::invalid_argument("poly_oracle: n must be >= 1");
  if (grid.nx <= 0 || grid.ny <= 0) grid = GridSpec::exact_default(n);
  const i64 total = grid.nx * grid.ny;
  const std::size_t ncoef = std::size_t(2 * n + 1);
  using Partial = std::vector<double>;

  Partial sums = chunked_reduce<Partial>(
      total, 256, Partial(ncoef, 0.0),
      [&](i64 b, i64 e) {
        Partial part(ncoef, 0.0);
        const std::size_t deg = std::size_t(n + 1);
        std::vector<double> p11(deg), p12(deg), p21(deg), p22(deg);
        std::vector<double> q11(deg), q12(deg);
        std::vector<double> v(std::size_t(n + 1));
        for (i64 i = b; i < e; ++i) {
          const TorusPoint pt{double(i / grid.ny) / double(grid.nx),
                              double(i % grid.ny) / double(grid.ny)};
          for (i64 j = 1; j <= n; ++j)
            v[std::size_t(j)] = skew_potential(j, pt, omega);
          std::fill(p11.begin(), p11.end(), 0.0);
          std::fill(p12.begin(), p12.end(), 0.0);
          std::fill(p21.begin(), p21.end(), 0.0);
          std::fill(p22.begin(), p22.end(), 0.0);
          p11[1] = -v[1];  // A_1 = [[-v_1 lambda, -1], [1, 0]] at E = 0
          p12[0] = -1.0;
          p21[0] = 1.0;
          for (i64 j = 2; j <= n; ++j) {
            const double vj = v[std::size_t(j)];
            for (std::size_t d = 0; d < deg; ++d) {
              q11[d] = (d ? -vj * p11[d - 1] : 0.0) - p21[d];
              q12[d] = (d ? -vj * p12[d - 1] : 0.0) - p22[d];
            }
            std::swap(p11, q11);  // p11 = new11, q11 = old11
            std::swap(p21, q11);  // p21 = old11
            std::swap(p12, q12);
            std::swap(p22, q12);
          }
          for (const auto* poly : {&p11, &p12, &p21, &p22})
            for (std::size_t a = 0; a <= std::size_t(n); ++a) {
              const double pa = (*poly)[a];
              if (pa == 0.0) continue;
              for (std::size_t c = 0; c <= std::size_t(n); ++c)
                part[a + c] += pa * (*poly)[c];
            }
        }
        return part;
      },
      [](Partial& acc, const Partial& p) {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
      },
      threads);

  CoefficientTable table;
  table.n = n;
  table.omega = omega;
  table.method = CoeffMethod::oracle;
  table.grid_exact = grid.meets_threshold(n);
  table.coeffs.resize(std::size_t(n + 1));
  const double inv = 1.0 / double(total);
  for (i64 kk = 0; kk <= n; ++kk)
    table.coeffs[std::size_t(kk)] = sums[std::size_t(2 * kk)] * inv;
  for (std::size_t d = 1; d < ncoef; d += 2)
    table.max_odd_abs = std::max(table.max_odd_abs, std::fabs(sums[d] * inv));
  return table;
}

struct TopCoeffReport {
  double alpha_top = 0.0;     // alpha_{2n}
  double alpha_second = 0.0;  // alpha_{2n-2}
  bool bound_ok = false;      // alpha_{2n} >= (1/4)^n
};

// Top two coefficients via the oracle; (1/4)^n is exp(n * integral of
// log cos^2(2 pi x)), the geometric floor for the diagonal term.
inline TopCoeffReport alpha_top_check(i64 n, const Frequency& omega,
                                      GridSpec grid = {}, int threads = 0) {
  if (n < 1) throw std::invalid_argument("alpha_top_check: n must be >= 1");
  CoefficientTable t = poly_oracle(n, omega, grid, threads);
  TopCoeffReport rep;
  rep.alpha_top = t.coeffs[std::size_t(n)];
  rep.alpha_second = t.coeffs[std::size_t(n - 1)];
  rep.bound_ok = rep.alpha_top >= std::pow(0.25, double(n));
  return rep;
}

// Non-averaged series coefficient: sum_k beta_{2k} lambda^{2k} equals
// Tr[M_n^T M_n] at the given point.
inline double beta_bruteforce(i64 n, i64 k, TorusPoint pt,
                              const Frequency& omega) {
  if (n < 1) throw std::invalid_argument("beta_bruteforce: n must be >= 1");
  if (k < 0 || k > n)
    throw std::invalid_argument("beta_bruteforce: order must satisfy 0 <= k <= n");
  if (k == 0) return 2.0;
  std::vector<double> v(std::size_t(n + 1));
  for (i64 j = 1; j <= n; ++j) v[std::size_t(j)] = skew_potential(j, pt, omega);
  return detail::club_pair_sum(
      n, k, /*mod4_filter=*/false, /*use_sign=*/true,
      [&](const IndexTuple& j, const IndexTuple& l) {
        double prod = 1.0;
        for (i64 a : j) prod *= v[std::size_t(a)];
        for (i64 a : l) prod *= v[std::size_t(a)];
        return prod;
      });
}

// E_{T^3}[beta_4] = integral of alpha_4 over omega, in closed form: each
// |S_m|^2 integrates to m, so the value is 4 (T(n/2) + T((n-1)/2)) with
// T(m) = m(m+1)/2.
inline double omega_avg_alpha4(i64 n) {
  if (n < 2) throw std::invalid_argument("omega_avg_alpha4: n must be >= 2");
  auto tri = [](i64 m) { return 0.5 * double(m) * double(m + 1); };
  return 4.0 * (tri(n / 2) + tri((n - 1) / 2));
}

struct Lambda4Grids {
  i64 nx = 0, ny = 0, nw = 0;  // 0 = exact defaults
};

struct Lambda4Report {
  i64 n = 0;
  double e_beta4 = 0.0;     // E_{T^3}[beta_4]
  double e_beta2_sq = 0.0;  // E_{T^3}[beta_2^2]
  double value = 0.0;       // (E[beta_4] - E[beta_2^2]/4) / 2
  double ratio = 0.0;       // value / n
};

// lambda^4 coefficient of the expanded log-trace, the first cancellation the
// counting reformulation predicts. beta_2 collapses to (sum_j (-1)^j v_j)^2,
// which keeps the inner loop O(n); the equivalence with the tuple sum is
// pinned by tests. beta_2^2 has omega-frequencies bounded by 2n^2 and (x,y)
// frequencies bounded by (4, 4n), so the default grids integrate exactly.
inline Lambda4Report log_lambda4_term(i64 n, Lambda4Grids grids = {},
                                      int threads = 0) {
  if (n < 1) throw std::invalid_argument("log_lambda4_term: n must be >= 1");
  const i64 nx = grids.nx > 0 ? grids.nx : 9;
  const i64 ny = grids.ny > 0 ? grids.ny : 8 * n + 1;
  const i64 nw = grids.nw > 0 ? grids.nw : 4 * n * n + 1;
  const double e4 = n >= 2 ? omega_avg_alpha4(n) : 0.0;

  double total = chunked_reduce<double>(
      nw, 4, 0.0,
      [&](i64 b, i64 e) {
        Kahan part;
        for (i64 t = b; t < e; ++t) {
          const Frequency om = Frequency::from_rational(t, nw);
          for (i64 a = 0; a < nx; ++a)
            for (i64 bb = 0; bb < ny; ++bb) {
              const TorusPoint pt{double(a) / double(nx),
                                  double(bb) / double(ny)};
              double s = 0.0;
              for (i64 j = 1; j <= n; ++j) {
                const double vj = skew_potential(j, pt, om);
                s += (j % 2 == 0) ? vj : -vj;
              }
              const double beta2 = s * s;
              part.add(beta2 * beta2);
            }
        }
        return part.value();
      },
      [](double& acc, double part) { acc += part; }, threads);

  Lambda4Report rep;
  rep.n = n;
  rep.e_beta4 = e4;
  rep.e_beta2_sq = total / (double(nx) * double(ny) * double(nw));
  rep.value = 0.5 * (rep.e_beta4 - rep.e_beta2_sq / 4.0);
  rep.ratio = rep.value / double(n);
  return rep;
}

// Almost-Mathieu lambda^2 coefficient, closed form:
// |1 - e[(w + 1/2) n]|^2 / (2 cos^2(pi w)); bounded in n, unlike 2n.
inline double amo_alpha2_closed(i64 n, const Frequency& omega) {
  if (n < 1) throw std::invalid_argument("amo_alpha2_closed: n must be >= 1");
  const bool at_pole = omega.is_rational() ? (2 * omega.p() == omega.q())
                                           : omega.value() == 0.5;
  if (at_pole)
    throw std::domain_error("amo_alpha2_closed: omega = 1/2 is singular");
  const double x = frac(omega.phase_times(n) + (n % 2 ? 0.5 : 0.0));
  const double num = 2.0 - 2.0 * std::cos(kTwoPi * x);
  const double c = std::cos(kPi * omega.value());
  return num / (2.0 * c * c);
}

// AMO analogue of alpha_{2k} by enumeration (signed, no mod-4 filter).
inline double amo_alpha_bruteforce(i64 n, i64 k, const Frequency& omega) {
  if (n < 1) throw std::invalid_argument("amo_alpha_bruteforce: n must be >= 1");
  if (k < 0 || k > n)
    throw std::invalid_argument("amo_alpha_bruteforce: order must satisfy 0 <= k <= n");
  if (k == 0) return 2.0;
  IndexTuple combined;
  return detail::club_pair_sum(
      n, k, /*mod4_filter=*/false, /*use_sign=*/true,
      [&](const IndexTuple& j, const IndexTuple& l) {
        combined.assign(j.begin(), j.end());
        combined.insert(combined.end(), l.begin(), l.end());
        return detail::amo_monomial_sum(combined, omega);
      });
}

}  // namespace skewshift
