#pragma once
// Core numeric kernels: exact mod-1 phase arithmetic, error-free transforms,
// compensated accumulation, and fixed-shape pairwise reductions. Everything
// downstream (Weyl sums at n = 10^7, trig-polynomial quadrature, reproducible
// Monte Carlo) builds its accuracy and determinism guarantees on what is in
// this header, so the contracts here are strict:
//
//   * frac/frac2 discard integer parts exactly for every double input.
//   * frac_mul(w, k) computes (w * k) mod 1 to a few ulp for any integer k,
//     no matter how large the product is, by splitting it with an FMA.
//   * tree_sum reduces with a fixed split pattern, so the result depends only
//     on the array contents, never on which thread produced which entry.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <vector>

namespace skewshift {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;
inline constexpr double kPi = 3.14159265358979323846264338327950288;

// x mod 1 in [0,1). The f == 1.0 rounding edge (tiny negative x) collapses
// to 0.
inline double frac(double x) {
  double f = x - std::floor(x);
  return f < 1.0 ? f : 0.0;
}

// x mod 2 in [0,2). Used for phases that live naturally in half-cycles.
inline double frac2(double x) {
  double f = x - 2.0 * std::floor(0.5 * x);
  return f < 2.0 ? f : 0.0;
}

// Error-free sum: a + b = s + e exactly (Knuth).
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  double bv = s - a;
  e = (a - (s - bv)) + (b - bv);
}

// Error-free product: a * b = p + e exactly.
inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

namespace detail {

// frac(w * kd) for kd an exactly representable double. The product is split
// as p + e with an FMA; both halves lose their integer parts exactly, so the
// result is accurate to ~1 ulp even when w * kd is of order 2^60.
inline double frac_mul_exact(double w, double kd) {
  double p, e;
  two_prod(w, kd, p, e);
  return frac(frac(p) + frac(e));
}

inline double frac2_mul_exact(double w, double kd) {
  double p, e;
  two_prod(w, kd, p, e);
  return frac2(frac2(p) + frac2(e));
}

}  // namespace detail

// (w * k) mod 1 for integer k. k beyond 2^52 is split into two exactly
// representable halves first.
inline double frac_mul(double w, i64 k) {
  constexpr i64 kBig = i64{1} << 52;
  if (k > kBig || k < -kBig) {
    i64 hi = (k >> 26) << 26;
    return frac(detail::frac_mul_exact(w, double(hi)) +
                detail::frac_mul_exact(w, double(k - hi)));
  }
  return detail::frac_mul_exact(w, double(k));
}

// (w * k) mod 2 with the same accuracy contract as frac_mul.
inline double frac2_mul(double w, i64 k) {
  constexpr i64 kBig = i64{1} << 52;
  if (k > kBig || k < -kBig) {
    i64 hi = (k >> 26) << 26;
    return frac2(detail::frac2_mul_exact(w, double(hi)) +
                 detail::frac2_mul_exact(w, double(k - hi)));
  }
  return detail::frac2_mul_exact(w, double(k));
}

// e[x] = exp(2 pi i x) for a phase already reduced mod 1.
inline cplx unit_phase(double frac01) {
  double a = kTwoPi * frac01;
  return {std::cos(a), std::sin(a)};
}

// Kahan-compensated accumulator.
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// Rolling phase accumulator: a mod-1 value held as an unevaluated hi + lo
// pair. hi stays in [0,1) (reduced by exact integer subtraction), lo stays at
// round-off size, so the trig argument never grows with the step count and
// the accumulated phase error is a few ulp ever after 10^7 additions.
class PhaseAccumulator {
 public:
  PhaseAccumulator() = default;

  void add(double h, double l = 0.0) {
    double s, e;
    two_sum(hi_, h, s, e);
    double lo = lo_ + (e + l);
    if (s >= 1.0) s -= 1.0;  // exact: s in [1,2)
    if (s < 0.0) s += 1.0;
    if (lo > 1.5e-8 || lo < -1.5e-8) {  // rare renormalization
      double s2, e2;
      two_sum(s, lo, s2, e2);
      s = s2;
      lo = e2;
      if (s >= 1.0) s -= 1.0;
      if (s < 0.0) s += 1.0;
    }
    hi_ = s;
    lo_ = lo;
  }

  void add(const PhaseAccumulator& other) { add(other.hi_, other.lo_); }

  double value() const { return frac(hi_ + lo_); }
  double hi() const { return hi_; }
  double lo() const { return lo_; }

 private:
  double hi_ = 0.0;
  double lo_ = 0.0;
};

// Pairwise sum with a fixed split pattern.
inline double tree_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = v[0];
    for (std::size_t i = 1; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return tree_sum(v, h) + tree_sum(v + h, n - h);
}

inline double tree_sum(const std::vector<double>& v) {
  return tree_sum(v.data(), v.size());
}

// Mean and standard error of a sample buffer, reduced deterministically.
struct SampleStats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

inline SampleStats sample_stats(const std::vector<double>& v) {
  SampleStats st;
  if (v.empty()) return st;
  st.mean = tree_sum(v) / double(v.size());
  if (v.size() < 2) return st;
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double d = v[i] - st.mean;
    dev[i] = d * d;
  }
  double var = tree_sum(dev) / double(v.size() - 1);
  st.stderr_ = std::sqrt(std::max(var, 0.0) / double(v.size()));
  return st;
}

}  // namespace skewshift
