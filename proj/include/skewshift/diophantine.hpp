#pragma once
// Rational approximation machinery and the Fresnel-integral main term for
// Weyl sums near a rational frequency.
//
// The frame: given omega and a reduced fraction p/q with p even and
// xi = 2 q omega - p small, the normalized sum
//
//   S_m(p,q,xi,theta) = sum_{n<=m} exp( pi i ( n^2 (p+xi)/q + 2 n theta / q ) )
//
// with theta = -q omega reproduces S_m(omega) exactly, and its main term is
//
//   |T_m| = |xi|^{-1/2} | F((m xi + a)/sqrt(q xi)) - F(a/sqrt(q xi)) |,
//
// where F(y) = (1/sqrt(i)) int_0^y e^{pi i t^2} dt and a = -xi/2. Candidate
// fractions come from the convergents and mediants of 2 omega, filtered by
// parity, coprimality and |q(2 omega) - p| < 1/(C q). Along N_k =
// floor(sqrt(C) q_k) the prefix energy sum_{m<=N} |S_m|^2 is compared
// against 2 N^2.
//
// F is evaluated by adaptive Gauss-Kronrod quadrature up to |y| = 8 and by
// the integration-by-parts tail expansion beyond (enough terms to hold the
// 1e-10 absolute target at the switch point, which two terms cannot).

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "skewshift/weyl.hpp"

namespace skewshift {

struct Rational {
  i64 p = 0;
  i64 q = 1;
};

struct ContinuedFraction {
  std::vector<i64> quotients;         // a_0; a_1, a_2, ...
  std::vector<Rational> convergents;  // lowest terms, q strictly increasing
  bool terminated = false;            // input exhausted as a rational
};

// Classical expansion with convergent recurrence; stops at `depth`
// quotients, when the remainder is negligible (rational input), or when the
// denominators outgrow double precision.
inline ContinuedFraction continued_fraction(double x, int depth) {
  if (depth < 1) throw std::invalid_argument("continued_fraction: depth must be >= 1");
  ContinuedFraction cf;
  i64 pm1 = 1, qm1 = 0;  // h_{-1}/k_{-1}
  i64 pm2 = 0, qm2 = 1;  // h_{-2}/k_{-2}
  double t = x;
  for (int i = 0; i < depth; ++i) {
    const double fa = std::floor(t);
    if (std::fabs(fa) > 4.0e15) break;
    const i64 a = i64(fa);
    const i64 pc = a * pm1 + pm2;
    const i64 qc = a * qm1 + qm2;
    if (qc > i64(1) << 50 || std::fabs(double(pc)) > double(i64(1) << 50)) break;
    cf.quotients.push_back(a);
    cf.convergents.push_back({pc, qc});
    pm2 = pm1;
    qm2 = qm1;
    pm1 = pc;
    qm1 = qc;
    const double r = t - fa;
    if (r < 1.0e-12) {
      cf.terminated = true;
      break;
    }
    t = 1.0 / r;
    if (qm1 > i64(1) << 40) break;  // beyond double resolution of x
  }
  return cf;
}

// All (p, q) with q <= q_max, p even, gcd(p, q) = 1 and
// |q (2 omega) - p| < 1/(C q), found by scanning the convergents and
// mediants (semiconvergents) of 2 omega; sorted by q.
inline std::vector<Rational> even_numerator_approx(double omega, double C,
                                                   i64 q_max) {
  if (!(C > 0.0)) throw std::invalid_argument("even_numerator_approx: C must be > 0");
  if (q_max < 2) throw std::invalid_argument("even_numerator_approx: q_max must be >= 2");
  const double x = 2.0 * omega;
  std::vector<Rational> out;
  auto consider = [&](i64 p, i64 q) {
    if (q < 1 || q > q_max) return;
    if (p % 2 != 0) return;
    if (std::gcd(p < 0 ? -p : p, q) != 1) return;
    double hi, lo;
    two_prod(x, double(q), hi, lo);
    const double err = std::fabs((hi - double(p)) + lo);
    if (err < 1.0 / (C * double(q))) out.push_back({p, q});
  };

  const ContinuedFraction cf = continued_fraction(x, 64);
  const i64 a0 = cf.quotients.empty() ? i64(std::floor(x)) : cf.quotients[0];
  consider(a0, 1);
  consider(a0 + 1, 1);
  i64 pm1 = a0, qm1 = 1;  // convergent i-1
  i64 pm2 = 1, qm2 = 0;   // convergent i-2
  for (std::size_t i = 1; i < cf.quotients.size(); ++i) {
    const i64 a = cf.quotients[i];
    for (i64 t = 1; t <= a; ++t) {  // t = a is the convergent itself
      const i64 p = t * pm1 + pm2;
      const i64 q = t * qm1 + qm2;
      if (q > q_max) break;
      consider(p, q);
    }
    const i64 pc = a * pm1 + pm2;
    const i64 qc = a * qm1 + qm2;
    pm2 = pm1;
    qm2 = qm1;
    pm1 = pc;
    qm1 = qc;
    if (qm1 > q_max && qm2 > q_max) break;
  }
  std::sort(out.begin(), out.end(),
            [](const Rational& a, const Rational& b) { return a.q < b.q; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Rational& a, const Rational& b) {
                          return a.p == b.p && a.q == b.q;
                        }),
            out.end());
  return out;
}

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                                  0.381830050505119, 0.417959183673469};

// e^{i pi t^2} with the phase reduced mod 2 before the trig call.
inline cplx fresnel_integrand(double t) {
  double p, e;
  two_prod(t, t, p, e);
  const double ph = kPi * frac2(frac2(p) + frac2(e));
  return {std::cos(ph), std::sin(ph)};
}

inline void gk15(double a, double b, cplx& result, double& err) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  cplx sk{0.0, 0.0}, sg{0.0, 0.0};
  for (int i = 0; i < 8; ++i) {
    if (i == 7) {  // center node, shared by both rules
      const cplx f = fresnel_integrand(c);
      sk += kWgk[7] * f;
      sg += kWg[3] * f;
      continue;
    }
    const cplx fl = fresnel_integrand(c - h * kXgk[i]);
    const cplx fr = fresnel_integrand(c + h * kXgk[i]);
    sk += kWgk[i] * (fl + fr);
    if (i % 2 == 1) sg += kWg[i / 2] * (fl + fr);  // Gauss nodes sit at odd i
  }
  result = sk * h;
  err = std::abs((sk - sg) * h);
}

// int_a^b e^{i pi t^2} dt, adaptive bisection to absolute tolerance.
inline cplx adaptive_quad(double a, double b, double tol) {
  struct Seg {
    double a, b, tol;
    int depth;
  };
  cplx total{0.0, 0.0};
  std::vector<Seg> stack{{a, b, tol, 0}};
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    cplx r;
    double err;
    gk15(s.a, s.b, r, err);
    if (err <= s.tol || s.depth >= 40) {
      total += r;
    } else {
      const double m = 0.5 * (s.a + s.b);
      stack.push_back({s.a, m, 0.5 * s.tol, s.depth + 1});
      stack.push_back({m, s.b, 0.5 * s.tol, s.depth + 1});
    }
  }
  return total;
}

// int_y^inf e^{i pi t^2} dt by repeated integration by parts:
// e^{i pi y^2} * sum_k b_k y^-(2k+1), b_0 = -1/(2 pi i),
// b_k = b_{k-1} (2k-1)/(2 pi i). Seven terms hold ~6e-16 at y = 8.
inline cplx fresnel_tail(double y) {
  double p, e;
  two_prod(y, y, p, e);
  const cplx lead = unit_phase(0.5 * frac2(frac2(p) + frac2(e)));
  cplx b(0.0, 1.0 / kTwoPi);  // -1/(2 pi i)
  const double inv2 = 1.0 / (y * y);
  double pw = 1.0 / y;
  cplx sum{0.0, 0.0};
  for (int k = 0; k < 7; ++k) {
    sum += b * pw;
    b *= cplx(0.0, -double(2 * k + 1) / kTwoPi);
    pw *= inv2;
  }
  return lead * sum;
}

}  // namespace detail

// Fresnel integral F(y) = (1/sqrt(i)) int_0^y e^{pi i t^2} dt. Odd in y,
// F(y) -> 1/2 as y -> +inf; absolute accuracy ~1e-10 over the whole line.
inline cplx fresnel(double y) {
  if (y == 0.0) return {0.0, 0.0};
  const double ay = std::fabs(y);
  const cplx conj_eighth(std::sqrt(0.5), -std::sqrt(0.5));  // e^{-i pi/4}
  cplx val;
  if (ay <= 8.0) {
    val = conj_eighth * detail::adaptive_quad(0.0, ay, 1.0e-12);
  } else {
    val = 0.5 - conj_eighth * detail::fresnel_tail(ay);
  }
  return y > 0 ? val : -val;
}

// Rational-approximation frame around omega; p must be even so that
// p q + 2A is an even integer with A = -p/2.
struct FJKContext {
  i64 p = 0;
  i64 q = 1;
  double xi = 0.0;     // 2 q omega - p
  double theta = 0.0;  // -q omega
  double A = 0.0;      // -p/2
  double a = 0.0;      // -xi/2
  double omega = 0.0;
};

namespace detail {

// The normalized FJK sum at the context parameters; must reproduce
// S_m(omega) exactly. The phase splits into an integer part n^2 p / (2q),
// reduced in exact arithmetic, plus the small pieces n^2 xi/(2q) and
// n theta/q whose slopes are held as double-doubles, so the per-term phase
// error stays at round-off even at m = 10^3 and beyond.
inline cplx fjk_normalized_sum(const FJKContext& ctx, i64 m) {
  const i64 m2q = 2 * ctx.q;
  const double inv2q = 1.0 / double(m2q);
  const double c_hi = ctx.xi * inv2q;
  const double c_lo = std::fma(-c_hi, double(m2q), ctx.xi) * inv2q;
  const double d_hi = ctx.theta / double(ctx.q);
  const double d_lo = std::fma(-d_hi, double(ctx.q), ctx.theta) / double(ctx.q);
  const i64 p_mod = ((ctx.p % m2q) + m2q) % m2q;
  Kahan re, im;
  for (i64 nn = 1; nn <= m; ++nn) {
    const i64 n2 = nn * nn;
    const i64 r = i64((__int128(n2 % m2q) * p_mod) % m2q);
    const double ph = frac(double(r) * inv2q + frac_mul(c_hi, n2) +
                           c_lo * double(n2) + frac_mul(d_hi, nn) +
                           d_lo * double(nn));
    const cplx t = unit_phase(ph);
    re.add(t.real());
    im.add(t.imag());
  }
  return {re.value(), im.value()};
}

}  // namespace detail

inline FJKContext fjk_context(double omega, Rational pq) {
  if (pq.q < 1) throw std::invalid_argument("fjk_context: q must be >= 1");
  if (std::gcd(pq.p < 0 ? -pq.p : pq.p, pq.q) != 1)
    throw std::invalid_argument("fjk_context: p/q must be in lowest terms");
  if (pq.p % 2 != 0)
    throw std::invalid_argument("fjk_context: numerator must be even");
  FJKContext ctx;
  ctx.p = pq.p;
  ctx.q = pq.q;
  double hi, lo;
  two_prod(2.0 * omega, double(pq.q), hi, lo);
  ctx.xi = (hi - double(pq.p)) + lo;
  ctx.theta = -double(pq.q) * omega;
  ctx.A = -0.5 * double(pq.p);
  ctx.a = -0.5 * ctx.xi;
  ctx.omega = omega;
  if (std::fabs(ctx.a) > 0.5)
    throw std::domain_error("fjk_context: |a| > 1/2, approximation too loose");
  for (i64 m : {i64(1), i64(7), i64(31)}) {
    cplx lhs;
    detail::weyl_scan(m, Frequency::from_value(omega),
                      WeylKind::linear_shifted,
                      [&](i64 mm, cplx s) { if (mm == m) lhs = s; });
    const cplx rhs = detail::fjk_normalized_sum(ctx, m);
    if (std::abs(lhs - rhs) > 1.0e-10)
      throw std::runtime_error("fjk_context: normalization mismatch");
  }
  return ctx;
}

// |T_m| at the context; xi < 0 is folded onto xi > 0 by conjugation
// (xi, a) -> (-xi, -a), which leaves |S_m| unchanged. The asymptotic
// hypothesis |m xi + a| <= 1 - eps is enforced.
inline double fjk_main_term_magnitude(i64 m, const FJKContext& ctx,
                                      double eps = 0.125) {
  if (m < 0) throw std::invalid_argument("fjk_main_term_magnitude: m must be >= 0");
  if (ctx.xi == 0.0)
    throw std::domain_error("fjk_main_term_magnitude: xi = 0 (exact rational; use the Gauss-sum path)");
  const double s = ctx.xi > 0 ? 1.0 : -1.0;
  const double xa = s * ctx.xi;
  const double aa = s * ctx.a;
  if (std::fabs(double(m) * xa + aa) > 1.0 - eps)
    throw std::domain_error("fjk_main_term_magnitude: |m xi + a| > 1 - eps");
  const double root_qx = std::sqrt(double(ctx.q) * xa);
  const cplx diff =
      fresnel((double(m) * xa + aa) / root_qx) - fresnel(aa / root_qx);
  return std::abs(diff) / std::sqrt(xa);
}

struct FjkSeries {
  std::vector<double> t_abs;  // t_abs[m-1] = |T_m|, m = 1..m_valid
  i64 m_valid = 0;            // largest m honoring the hypothesis
};

// Batch |T_m| for m = 1..min(m_max, hypothesis limit). While the Fresnel
// argument stays below the quadrature/asymptotic switch the integral is
// extended panel-by-panel between consecutive arguments, so the per-m cost
// is one Kronrod panel instead of a full adaptive solve.
inline FjkSeries fjk_main_terms(const FJKContext& ctx, i64 m_max,
                                double eps = 0.125) {
  if (ctx.xi == 0.0)
    throw std::domain_error("fjk_main_terms: xi = 0 (exact rational)");
  const double s = ctx.xi > 0 ? 1.0 : -1.0;
  const double xa = s * ctx.xi;
  const double aa = s * ctx.a;
  const double root_qx = std::sqrt(double(ctx.q) * xa);
  const double inv_root_xi = 1.0 / std::sqrt(xa);
  FjkSeries out;
  const cplx f0 = fresnel(aa / root_qx);
  const cplx eighth(std::sqrt(0.5), std::sqrt(0.5));  // e^{i pi/4}
  cplx gcur = eighth * f0;  // int_0^{y_0} e^{i pi t^2}
  const cplx conj_eighth = std::conj(eighth);
  double y_prev = aa / root_qx;
  bool integrating = true;
  for (i64 m = 1; m <= m_max; ++m) {
    if (std::fabs(double(m) * xa + aa) > 1.0 - eps) break;
    const double y = (double(m) * xa + aa) / root_qx;
    cplx fy;
    if (integrating && y <= 8.0) {
      const int panels =
          1 + int((y - y_prev) * std::max(1.0, std::fabs(y)) / 0.3);
      double t0 = y_prev;
      const double dt = (y - y_prev) / double(panels);
      for (int i = 0; i < panels; ++i) {
        cplx r;
        double err;
        detail::gk15(t0, t0 + dt, r, err);
        gcur += r;
        t0 += dt;
      }
      y_prev = y;
      fy = conj_eighth * gcur;
    } else {
      integrating = false;  // arguments are increasing; stay asymptotic
      fy = fresnel(y);
    }
    out.t_abs.push_back(std::abs(fy - f0) * inv_root_xi);
    out.m_valid = m;
  }
  return out;
}

struct SubsequenceEntry {
  i64 p = 0;
  i64 q = 0;
  i64 N = 0;       // floor(sqrt(C) q)
  double lhs = 0;  // sum_{m<=N} |S_m|^2
  double ratio = 0;
  bool flagged = false;  // ratio >= 2
};

struct SubsequenceReport {
  double omega = 0.0;
  double C = 0.0;
  i64 q_max = 0;
  std::vector<SubsequenceEntry> entries;  // ordered by q
};

// For every even-numerator approximation of omega up to q_max, the prefix
// energy at N = floor(sqrt(C) q) and whether it clears 2 N^2.
inline SubsequenceReport subsequence_bound_check(double omega, double C,
                                                 i64 q_max) {
  if (C < 16.0)
    throw std::invalid_argument("subsequence_bound_check: C must be >= 16");
  SubsequenceReport rep;
  rep.omega = omega;
  rep.C = C;
  rep.q_max = q_max;
  const auto pairs = even_numerator_approx(omega, C, q_max);
  if (pairs.empty()) return rep;
  const double rootC = std::sqrt(C);
  i64 max_n = 0;
  for (const Rational& r : pairs) {
    SubsequenceEntry e;
    e.p = r.p;
    e.q = r.q;
    e.N = i64(std::floor(rootC * double(r.q)));
    max_n = std::max(max_n, e.N);
    rep.entries.push_back(e);
  }
  Kahan acc;
  std::vector<double> prefix_energy(std::size_t(max_n) + 1, 0.0);
  detail::weyl_scan(max_n, Frequency::from_value(omega),
                    WeylKind::linear_shifted, [&](i64 m, cplx sv) {
                      acc.add(std::norm(sv));
                      prefix_energy[std::size_t(m)] = acc.value();
                    });
  for (SubsequenceEntry& e : rep.entries) {
    e.lhs = prefix_energy[std::size_t(e.N)];
    e.ratio = e.lhs / (double(e.N) * double(e.N));
    e.flagged = e.ratio >= 2.0;
  }
  return rep;
}

}  // namespace skewshift
