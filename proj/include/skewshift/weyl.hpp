#pragma once
// Quadratic Weyl sums and the statistics built on them.
//
//   S_m(w)      = sum_{j<=m} e[w (j^2 - j)]        (linear-shifted kind)
//   W_m(w)      = sum_{j<=m} e[w j^2]              (pure kind)
//   S_m(w,xi)   = sum_{j<=m} e[w j^2 + xi j]       (general sum)
//   Z_n(w)      = sqrt( sum_{m<=n-1} |S_m|^2 )
//
// The phase of term j is tracked mod 1 by two rolling accumulators (the
// phase and its first difference, which itself steps by 2w), so the trig
// argument stays O(1) at any n and the accumulated phase error is a few ulp.
// Complex accumulation is Kahan-compensated; a naive mode exists only so
// tests can measure what the compensation buys. Rational frequencies run an
// integer recurrence mod q and are bit-stable.
//
// E_w[Z_n^2] = n(n-1)/2 exactly (orthogonality of e[k .]); the second-moment
// check integrates the trig polynomial Z_n^2 on an equidistant grid that is
// wide enough to make the quadrature exact, so the identity is verified with
// no Monte-Carlo tolerance at all.

#include <stdexcept>
#include <string>
#include <vector>

#include "skewshift/parallel.hpp"
#include "skewshift/rng.hpp"
#include "skewshift/torus.hpp"

namespace skewshift {

enum class SumMode { compensated, naive };
enum class WeylKind { linear_shifted, pure };

namespace detail {

// Rolling phase of a quadratic progression a2*j^2 + a1*j, j = 1, 2, ...
class QuadPhase {
 public:
  // phases w (j^2 - j): starts at 0, first difference 2w
  static QuadPhase linear_shifted(double w) {
    QuadPhase qp(frac(2.0 * frac(w)));
    qp.delta_.add(qp.step_);
    return qp;
  }
  // phases w j^2: starts at w, difference (2j+1) w
  static QuadPhase pure(double w) {
    QuadPhase qp(frac(2.0 * frac(w)));
    qp.phase_.add(frac(w));
    qp.delta_.add(qp.step_);
    qp.delta_.add(frac(w));
    return qp;
  }
  // phases w j^2 + xi j
  static QuadPhase general(double w, double xi) {
    QuadPhase qp = pure(w);
    qp.phase_.add(frac(xi));
    qp.delta_.add(frac(xi));
    return qp;
  }
  // phases (w/4) j^2 restricted to odd j = 1, 3, 5, ...: the difference
  // across one odd step is w (j+1), which advances by 2w.
  static QuadPhase pure_odd_quarter(double w) {
    QuadPhase qp(frac(2.0 * frac(w)));
    qp.phase_.add(frac(0.25 * w));
    qp.delta_.add(qp.step_);
    return qp;
  }

  double current() const { return phase_.value(); }
  void advance() {
    phase_.add(delta_);
    delta_.add(step_);
  }

 private:
  explicit QuadPhase(double step) : step_(step) {}
  PhaseAccumulator phase_, delta_;
  double step_;
};

// Integer phase recurrence for rational w = p/q: r_j holds (j^2 - j) mod q
// (or j^2 mod q), the phase of term j is (p r_j mod q)/q.
class RationalQuadPhase {
 public:
  RationalQuadPhase(i64 p, i64 q, WeylKind kind)
      : p_(p), q_(q) {
    if (kind == WeylKind::linear_shifted) {
      r_ = 0;
      d_ = 2 % q_;
    } else {
      r_ = 1 % q_;
      d_ = 3 % q_;
    }
  }
  double current() const {
    i64 num = i64((__int128(p_) * r_) % q_);
    return double(num) / double(q_);
  }
  void advance() {
    r_ += d_;
    if (r_ >= q_) r_ -= q_;
    d_ += 2;
    if (d_ >= q_) d_ -= q_;
    if (d_ >= q_) d_ -= q_;  // q = 1 edge
  }

 private:
  i64 p_, q_, r_ = 0, d_ = 0;
};

// Streams prefixes of the chosen Weyl sum, invoking visit(m, prefix) for
// m = 1..n.
template <class Visit>
void weyl_scan(i64 n, const Frequency& omega, WeylKind kind, Visit&& visit,
               SumMode mode = SumMode::compensated) {
  Kahan re, im;
  double nre = 0.0, nim = 0.0;
  auto emit = [&](double pr, double pi_, i64 m) {
    if (mode == SumMode::compensated) {
      re.add(pr);
      im.add(pi_);
      visit(m, cplx(re.value(), im.value()));
    } else {
      nre += pr;
      nim += pi_;
      visit(m, cplx(nre, nim));
    }
  };
  if (omega.is_rational()) {
    RationalQuadPhase ph(omega.p(), omega.q(), kind);
    for (i64 m = 1; m <= n; ++m) {
      cplx t = unit_phase(ph.current());
      emit(t.real(), t.imag(), m);
      ph.advance();
    }
  } else {
    QuadPhase ph = kind == WeylKind::linear_shifted
                       ? QuadPhase::linear_shifted(omega.value())
                       : QuadPhase::pure(omega.value());
    for (i64 m = 1; m <= n; ++m) {
      cplx t = unit_phase(ph.current());
      emit(t.real(), t.imag(), m);
      ph.advance();
    }
  }
}

}  // namespace detail

struct WeylPrefix {
  Frequency omega;
  i64 n = 0;
  WeylKind kind = WeylKind::linear_shifted;
  std::vector<cplx> values;  // values[m-1] = S_m (or W_m)

  cplx at(i64 m) const { return values[std::size_t(m - 1)]; }
};

// All prefixes S_1..S_n in one pass.
inline WeylPrefix weyl_prefix(i64 n, const Frequency& omega,
                              SumMode mode = SumMode::compensated) {
  if (n < 1) throw std::invalid_argument("weyl_prefix: n must be >= 1");
  WeylPrefix wp{omega, n, WeylKind::linear_shifted, {}};
  wp.values.reserve(std::size_t(n));
  detail::weyl_scan(
      n, omega, WeylKind::linear_shifted,
      [&](i64, cplx s) { wp.values.push_back(s); }, mode);
  return wp;
}

// Prefixes of the purely quadratic sum W_1..W_n.
inline WeylPrefix pure_weyl_prefix(i64 n, const Frequency& omega,
                                   SumMode mode = SumMode::compensated) {
  if (n < 1) throw std::invalid_argument("pure_weyl_prefix: n must be >= 1");
  WeylPrefix wp{omega, n, WeylKind::pure, {}};
  wp.values.reserve(std::size_t(n));
  detail::weyl_scan(
      n, omega, WeylKind::pure, [&](i64, cplx s) { wp.values.push_back(s); },
      mode);
  return wp;
}

// General sum S_m(w, xi) = sum_{j<=m} e[w j^2 + xi j]; xi = -w recovers the
// linear-shifted S_m, xi = 0 recovers W_m.
inline cplx weyl_general(i64 m, double w, double xi) {
  if (m < 1) throw std::invalid_argument("weyl_general: m must be >= 1");
  detail::QuadPhase ph = detail::QuadPhase::general(w, xi);
  Kahan re, im;
  for (i64 j = 1; j <= m; ++j) {
    cplx t = unit_phase(ph.current());
    re.add(t.real());
    im.add(t.imag());
    ph.advance();
  }
  return {re.value(), im.value()};
}

// | |S_m(w)| - |W^odd_{2m-1}(w/4)| |, where W^odd restricts j to odd
// integers. The two sides agree because (w/4)(2j-1)^2 = w(j^2-j) + w/4.
inline double parity_identity_check(i64 m, const Frequency& omega) {
  if (m < 1) throw std::invalid_argument("parity_identity_check: m must be >= 1");
  cplx s;
  detail::weyl_scan(m, omega, WeylKind::linear_shifted,
                    [&](i64 mm, cplx v) { if (mm == m) s = v; });
  detail::QuadPhase ph = detail::QuadPhase::pure_odd_quarter(omega.value());
  Kahan re, im;
  for (i64 j = 1; j <= m; ++j) {  // j-th odd integer is 2j-1 <= 2m-1
    cplx t = unit_phase(ph.current());
    re.add(t.real());
    im.add(t.imag());
    ph.advance();
  }
  return std::abs(std::abs(s) - std::abs(cplx(re.value(), im.value())));
}

// Z_n = sqrt( sum_{m=1}^{n-1} |S_m|^2 ).
inline double z_n(const Frequency& omega, i64 n) {
  if (n < 2) throw std::invalid_argument("z_n: n must be >= 2");
  Kahan acc;
  detail::weyl_scan(n - 1, omega, WeylKind::linear_shifted,
                    [&](i64, cplx s) { acc.add(std::norm(s)); });
  return std::sqrt(acc.value());
}

// Exact-grid evaluation of E_w[Z_n^2]; the integrand has integer frequencies
// bounded by (n-1)(n-2), so a grid of size 2(n-1)(n-2)+3 integrates it
// exactly. The result must equal n(n-1)/2.
inline double second_moment_check(i64 n, int threads = 0) {
  if (n < 2) throw std::invalid_argument("second_moment_check: n must be >= 2");
  const i64 grid = 2 * (n - 1) * (n - 2) + 3;
  double total = chunked_reduce<double>(
      grid, 64, 0.0,
      [&](i64 b, i64 e) {
        Kahan part;
        for (i64 t = b; t < e; ++t) {
          Frequency om = Frequency::from_rational(t, grid);
          Kahan zz;
          detail::weyl_scan(n - 1, om, WeylKind::linear_shifted,
                            [&](i64, cplx s) { zz.add(std::norm(s)); });
          part.add(zz.value());
        }
        return part.value();
      },
      [](double& acc, double part) { acc += part; }, threads);
  return total / double(grid);
}

struct MomentReport {
  i64 m = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  i64 samples = 0;
  u64 seed = 0;
};

// Monte-Carlo estimate of E_w[ |S_m| / sqrt(m) ] (or the W-kind analogue)
// with frequencies drawn from the counter stream of `seed`.
inline MomentReport first_moment_estimate(i64 m, i64 samples, u64 seed,
                                          WeylKind kind, int threads = 0) {
  if (m < 1) throw std::invalid_argument("first_moment_estimate: m must be >= 1");
  if (samples < 2) throw std::invalid_argument("first_moment_estimate: samples must be >= 2");
  std::vector<double> vals(static_cast<std::size_t>(samples));
  const double root_m = std::sqrt(double(m));
  parallel_fill(
      vals,
      [&](i64 i) {
        Frequency om = Frequency::from_value(uniform01(seed, u64(i)));
        cplx last;
        detail::weyl_scan(m, om, kind, [&](i64 mm, cplx s) {
          if (mm == m) last = s;
        });
        return std::abs(last) / root_m;
      },
      threads);
  SampleStats st = sample_stats(vals);
  return {m, st.mean, st.stderr_, samples, seed};
}

struct CjvhReport {
  std::vector<MomentReport> per_m;
  double c_jvh = 0.0;   // largest-m estimate of E|W_m| / sqrt(m)
  double c1 = 0.0;      // (sqrt(2)-1)/2 * c_jvh
  double c0 = 0.0;      // c1^2 / 16
  double delta = 0.0;   // c1^2 / 2
};

// Estimates the diffusive-scale constant of the pure Weyl sum and the
// derived good-set constants.
inline CjvhReport cjvh_estimate(const std::vector<i64>& m_list, i64 samples,
                                u64 seed, int threads = 0) {
  if (m_list.empty()) throw std::invalid_argument("cjvh_estimate: empty m list");
  for (i64 m : m_list)
    if (m < 1000) throw std::invalid_argument("cjvh_estimate: all m must be >= 1000");
  CjvhReport rep;
  i64 largest = 0;
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    rep.per_m.push_back(
        first_moment_estimate(m_list[i], samples, seed + u64(i), WeylKind::pure, threads));
    if (m_list[i] > largest) {
      largest = m_list[i];
      rep.c_jvh = rep.per_m.back().estimate;
    }
  }
  const double r = 0.5 * (std::sqrt(2.0) - 1.0);
  rep.c1 = r * rep.c_jvh;
  rep.c0 = rep.c1 * rep.c1 / 16.0;
  rep.delta = rep.c1 * rep.c1 / 2.0;
  return rep;
}

struct GoodSetReport {
  double measure = 0.0;
  double stderr_ = 0.0;
  i64 samples = 0;
  double threshold = 0.0;
};

// Fraction of sampled frequencies with (1/n^2) sum_{m<=n-1} |S_m|^2 above
// the threshold, with binomial standard error.
inline GoodSetReport good_set_measure(i64 n, double threshold, i64 samples,
                                      u64 seed, int threads = 0) {
  if (n < 2) throw std::invalid_argument("good_set_measure: n must be >= 2");
  if (samples < 1) throw std::invalid_argument("good_set_measure: samples must be >= 1");
  std::vector<double> hits(static_cast<std::size_t>(samples));
  const double inv_n2 = 1.0 / (double(n) * double(n));
  parallel_fill(
      hits,
      [&](i64 i) {
        Frequency om = Frequency::from_value(uniform01(seed, u64(i)));
        Kahan acc;
        detail::weyl_scan(n - 1, om, WeylKind::linear_shifted,
                          [&](i64, cplx s) { acc.add(std::norm(s)); });
        return acc.value() * inv_n2 > threshold ? 1.0 : 0.0;
      },
      threads);
  double p = tree_sum(hits) / double(samples);
  return {p, std::sqrt(std::max(p * (1.0 - p), 0.0) / double(samples)), samples,
          threshold};
}

struct HlStep {
  i64 m_next = 0;
  double omega_next = 0.0;
  double xi_next = 0.0;
  cplx prefactor;
  double error_budget = 0.0;  // one unit of the O(w^{-1/2}) error term
};

// One approximate-functional-equation step:
//   S_m(w,xi) ~ sqrt(i/(2w)) e[-xi^2/(4w)] S_{floor(2wm)}( -1/(4w) mod 1, xi/(2w) )
// The renormalized sum has floor(2wm) terms, so for w < 1/2 the step
// contracts; iterating is a diagnostic, not an evaluation path.
inline HlStep hl_step(i64 m, double w, double xi) {
  if (m < 1) throw std::invalid_argument("hl_step: m must be >= 1");
  if (!(w > 0.0) || w > 0.5)
    throw std::domain_error("hl_step: omega must lie in (0, 1/2]");
  HlStep st;
  st.m_next = i64(std::floor(2.0 * w * double(m)));
  st.omega_next = frac(-1.0 / (4.0 * w));
  st.xi_next = xi / (2.0 * w);
  const double root = 1.0 / std::sqrt(2.0 * w);
  const cplx eighth(std::sqrt(0.5), std::sqrt(0.5));  // e^{i pi/4}
  st.prefactor = eighth * root * unit_phase(frac(-xi * xi / (4.0 * w)));
  st.error_budget = 1.0 / std::sqrt(w);
  return st;
}

struct PathPolyline {
  i64 n = 0;
  Frequency omega;
  std::vector<double> t;    // knots k/n
  std::vector<cplx> pos;    // S_k / sqrt(n), S_0 = 0
};

// Piecewise-linear curlicue path through the normalized prefixes.
inline PathPolyline curlicue_path(i64 n, const Frequency& omega) {
  if (n < 1) throw std::invalid_argument("curlicue_path: n must be >= 1");
  PathPolyline path;
  path.n = n;
  path.omega = omega;
  path.t.reserve(std::size_t(n + 1));
  path.pos.reserve(std::size_t(n + 1));
  path.t.push_back(0.0);
  path.pos.push_back({0.0, 0.0});
  const double root_n = std::sqrt(double(n));
  detail::weyl_scan(n, omega, WeylKind::linear_shifted, [&](i64 m, cplx s) {
    path.t.push_back(double(m) / double(n));
    path.pos.push_back(s / root_n);
  });
  return path;
}

}  // namespace skewshift
