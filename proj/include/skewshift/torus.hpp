#pragma once
// Skew-shift dynamics on the 2-torus and the two cosine potentials driven by
// it: T(x,y) = (x+y, y+w) projects to v_j(x,y) = 2 cos(2 pi (C(j,2) w + j y
// + x)), and the circle-rotation analogue is 2 cos(2 pi (j w + theta)).
// Frequencies declared as rationals p/q keep their phases in integer
// arithmetic mod q, so Gauss-sum cases are bit-stable; everything else goes
// through the exact mod-1 splitting in base.hpp so the quadratic phase
// C(j,2) w never loses significance, however large j gets.

#include <numeric>
#include <stdexcept>

#include "skewshift/base.hpp"

namespace skewshift {

struct TorusPoint {
  double x = 0.0;  // both coordinates in [0,1)
  double y = 0.0;
};

inline TorusPoint torus_point(double x, double y) { return {frac(x), frac(y)}; }

class Frequency {
 public:
  Frequency() = default;

  static Frequency from_value(double w) {
    Frequency f;
    f.value_ = frac(w);
    return f;
  }

  static Frequency from_rational(i64 p, i64 q) {
    if (q <= 0) throw std::invalid_argument("Frequency: denominator must be positive");
    if (q > (i64(1) << 31)) throw std::invalid_argument("Frequency: denominator too large");
    Frequency f;
    p %= q;
    if (p < 0) p += q;
    i64 g = std::gcd(p, q);
    if (g == 0) g = 1;
    f.p_ = p / g;
    f.q_ = q / g;
    f.rational_ = true;
    f.value_ = double(f.p_) / double(f.q_);
    return f;
  }

  // Named constants, evaluated in extended precision and rounded once.
  static Frequency sqrt2m1() {
    return from_value(double(sqrtl(2.0L) - 1.0L));
  }
  static Frequency golden() {
    return from_value(double((sqrtl(5.0L) - 1.0L) / 2.0L));
  }

  double value() const { return value_; }
  bool is_rational() const { return rational_; }
  i64 p() const { return p_; }
  i64 q() const { return q_; }

  // (k * w) mod 1
  double phase_times(i64 k) const {
    if (rational_) {
      i64 r = k % q_;
      if (r < 0) r += q_;
      i64 num = i64((__int128(p_) * r) % q_);
      return double(num) / double(q_);
    }
    return frac_mul(value_, k);
  }

  // (C(j,2) * w) mod 1 with C(j,2) = j(j-1)/2
  double phase_binom2(i64 j) const {
    if (j < 0) throw std::invalid_argument("phase_binom2: j must be >= 0");
    if (rational_) {
      // j(j-1) mod 2q is even, and (j(j-1)/2) mod q is half of it.
      i64 m = 2 * q_;
      i64 a = j % m;
      i64 b = (j - 1) % m;
      if (b < 0) b += m;
      i64 r = i64((__int128(a) * b) % m) / 2;
      i64 num = i64((__int128(p_) * r) % q_);
      return double(num) / double(q_);
    }
    // j(j-1)/2 fits in i64 for all j handled here
    if (j > i64(3000000000)) throw std::invalid_argument("phase_binom2: j too large");
    i64 k = (j % 2 == 0) ? (j / 2) * (j - 1) : j * ((j - 1) / 2);
    return frac_mul(value_, k);
  }

  // (d * w / 2) mod 1, exact for rationals via arithmetic mod 2q
  double phase_half_times(i64 d) const {
    if (rational_) {
      i64 m = 2 * q_;
      i64 r = d % m;
      if (r < 0) r += m;
      i64 num = i64((__int128(p_) * r) % m);
      return double(num) / double(m);
    }
    return frac(0.5 * frac2_mul(value_, d));
  }

 private:
  double value_ = 0.0;
  bool rational_ = false;
  i64 p_ = 0;
  i64 q_ = 1;
};

inline TorusPoint skew_shift_step(TorusPoint pt, const Frequency& omega) {
  return {frac(pt.x + pt.y), frac(pt.y + omega.value())};
}

// Phase of the j-th orbit iterate's first coordinate: C(j,2) w + j y + x.
inline double orbit_phase(i64 j, TorusPoint pt, const Frequency& omega) {
  return frac(omega.phase_binom2(j) + frac_mul(pt.y, j) + pt.x);
}

// v_j(x,y) = 2 cos(2 pi (C(j,2) w + j y + x)); series indices start at 1.
inline double skew_potential(i64 j, TorusPoint pt, const Frequency& omega) {
  if (j < 1) throw std::invalid_argument("skew_potential: j must be >= 1");
  return 2.0 * std::cos(kTwoPi * orbit_phase(j, pt, omega));
}

// Almost-Mathieu potential 2 cos(2 pi (j w + theta)).
inline double amo_potential(i64 j, double theta, const Frequency& omega) {
  return 2.0 * std::cos(kTwoPi * frac(omega.phase_times(j) + frac(theta)));
}

}  // namespace skewshift
