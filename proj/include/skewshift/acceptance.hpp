#pragma once
// Acceptance suite: fourteen end-to-end checks, each printed as a single
// pass/fail line with the measured values. Tolerances and thresholds are
// fixed here, in code. Criteria with runtime budgets fail if they blow them.

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "skewshift/harness.hpp"

namespace skewshift::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail_acc {

inline double rel_gap(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  if (scale <= 1e-10) return 0.0;  // both vanish at noise level
  return std::fabs(a - b) / scale;
}

inline std::vector<std::pair<std::string, Frequency>> omega_set() {
  return {{"0", Frequency::from_rational(0, 1)},
          {"1/2", Frequency::from_rational(1, 2)},
          {"sqrt2m1", Frequency::sqrt2m1()},
          {"golden", Frequency::golden()},
          {"0.123456", Frequency::from_value(0.123456)}};
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

inline std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

// criterion 1: alpha_2 = 2n by brute force, n in [1,12], five frequencies
inline CriterionResult c1() {
  Timer timer;
  double worst = 0.0;
  for (const auto& [name, om] : omega_set())
    for (i64 n = 1; n <= 12; ++n)
      worst = std::max(worst, std::fabs(alpha_bruteforce(n, 1, om) - 2.0 * double(n)));
  const double secs = timer.seconds();
  const bool pass = worst <= 1e-9 && secs < 10.0;
  return {1, "alpha2 identity (alpha_2 = 2n)", pass,
          "max |err| = " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s"};
}

// criterion 2: alpha_4 brute force vs Weyl-sum closed form
inline CriterionResult c2() {
  Timer timer;
  double worst = 0.0;
  for (const auto& [name, om] : omega_set())
    for (i64 n = 2; n <= 12; ++n)
      worst = std::max(worst, rel_gap(alpha_bruteforce(n, 2, om),
                                      alpha4_closed(n, om)));
  const double secs = timer.seconds();
  const bool pass = worst <= 1e-9 && secs < 60.0;
  return {2, "alpha4 identity (brute force vs closed form)", pass,
          "max rel gap = " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s"};
}

// criterion 3: polynomial oracle matches brute force for all k <= n <= 8
inline CriterionResult c3() {
  double worst = 0.0, worst_odd = 0.0;
  for (const auto& [name, om] : omega_set())
    for (i64 n = 1; n <= 8; ++n) {
      CoefficientTable t = poly_oracle(n, om);
      worst_odd = std::max(worst_odd, t.max_odd_abs);
      for (i64 k = 0; k <= n; ++k)
        worst = std::max(
            worst, rel_gap(t.coeffs[std::size_t(k)], alpha_bruteforce(n, k, om)));
    }
  const bool pass = worst <= 1e-8 && worst_odd <= 1e-10;
  return {3, "oracle equivalence (series coefficients)", pass,
          "max rel gap = " + fmt(worst, 3) +
              ", max odd coeff = " + fmt(worst_odd, 3)};
}

// criterion 4: sum_k beta_2k lambda^2k = Tr[M^T M] pointwise
inline CriterionResult c4() {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const i64 n = 1 + (i % 8);
    const TorusPoint pt{uniform01(1404, 4 * u64(i)), uniform01(1404, 4 * u64(i) + 1)};
    const Frequency om = Frequency::from_value(uniform01(1404, 4 * u64(i) + 2));
    const double lambda = 1.5 * uniform01(1404, 4 * u64(i) + 3);
    double sum = 0.0, pw = 1.0;
    for (i64 k = 0; k <= n; ++k) {
      sum += beta_bruteforce(n, k, pt, om) * pw;
      pw *= lambda * lambda;
    }
    const double tr = std::exp(
        trace_mstar_m(cocycle_product(n, lambda, 0.0, pt, om, PotentialKind::skew)));
    worst = std::max(worst, std::fabs(sum - tr) / tr);
  }
  return {4, "beta resummation (pointwise trace)", worst <= 1e-8,
          "max rel gap = " + fmt(worst, 3) + " over 100 samples"};
}

// criterion 5: exact-grid second moment equals n(n-1)/2
inline CriterionResult c5() {
  double worst = 0.0;
  for (i64 n = 2; n <= 40; ++n) {
    const double want = 0.5 * double(n) * double(n - 1);
    worst = std::max(worst, std::fabs(second_moment_check(n) - want) / want);
  }
  return {5, "Z_n second moment = n(n-1)/2 (exact grid)", worst <= 1e-10,
          "max rel gap = " + fmt(worst, 3) + " for n in [2,40]"};
}

// criterion 6: omega-average of alpha_4, closed form vs quadrature + growth
inline CriterionResult c6() {
  double worst = 0.0;
  bool growth_ok = true;
  for (i64 n = 2; n <= 20; ++n) {
    const i64 m1 = n / 2;
    const i64 grid = 2 * m1 * (m1 - 1) + 3;
    Kahan acc;
    for (i64 t = 0; t < grid; ++t)
      acc.add(alpha4_closed(n, Frequency::from_rational(t, grid)));
    const double quad = acc.value() / double(grid);
    const double closed = omega_avg_alpha4(n);
    worst = std::max(worst, rel_gap(quad, closed));
    if (n >= 10 && closed < 0.4 * double(n) * double(n)) growth_ok = false;
  }
  const bool pass = worst <= 1e-9 && growth_ok;
  return {6, "omega-averaged alpha4 (quadrature + n^2 growth)", pass,
          "max rel gap = " + fmt(worst, 3) +
              (growth_ok ? ", growth >= 0.4 n^2" : ", growth FAILED")};
}

struct CjvhOutcome {
  CriterionResult result;
  double c1_constant = 0.0;
  double delta = 0.0;
};

// criterion 7: diffusive-scale first moment is stable in m and lands in (0,1]
inline CjvhOutcome c7() {
  Timer timer;
  const CjvhReport rep = cjvh_estimate({2000, 8000, 32000}, 2000, 20260808);
  double worst_pair = 0.0;
  for (std::size_t i = 0; i < rep.per_m.size(); ++i)
    for (std::size_t j = i + 1; j < rep.per_m.size(); ++j) {
      const double a = rep.per_m[i].estimate, b = rep.per_m[j].estimate;
      worst_pair = std::max(worst_pair, std::fabs(a - b) / std::min(a, b));
    }
  const double secs = timer.seconds();
  const bool pass = worst_pair <= 0.10 && rep.c_jvh > 0.0 && rep.c_jvh <= 1.0 &&
                    secs < 300.0;
  CjvhOutcome out;
  out.result = {7, "JvH first-moment stability", pass,
                "E|W_m|/sqrt(m) = {" + fmt(rep.per_m[0].estimate, 4) + ", " +
                    fmt(rep.per_m[1].estimate, 4) + ", " +
                    fmt(rep.per_m[2].estimate, 4) + "}, pairwise " +
                    fmt(100.0 * worst_pair, 3) + "%, " + fmt(secs, 3) + " s"};
  out.c1_constant = rep.c1;
  out.delta = rep.delta;
  return out;
}

// criterion 8: good sets have measure at least delta/2 at the c7 threshold
inline CriterionResult c8(double c1_constant, double delta) {
  const double threshold = c1_constant * c1_constant / 16.0;
  bool pass = true;
  std::string detail = "threshold = " + fmt(threshold, 4) + ";";
  for (i64 n : {i64(512), i64(2048)}) {
    const GoodSetReport rep = good_set_measure(n, threshold, 2000, 88 + n);
    pass = pass && rep.measure >= 0.5 * delta;
    detail += " n=" + std::to_string(n) + ": " + fmt(rep.measure, 4);
  }
  detail += " (need >= " + fmt(0.5 * delta, 4) + ")";
  return {8, "good-set measure", pass, detail};
}

// criterion 9: prefix energy clears 2 N^2 along the even-numerator
// subsequence for C = 64; also reports the smallest C reaching 100%
inline CriterionResult c9() {
  const u64 seed = 20260808;
  const i64 q_max = 5000;
  int total64 = 0, flagged64 = 0;
  double smallest_full = 0.0;
  for (double C : {16.0, 32.0, 64.0, 128.0, 256.0}) {
    int total = 0, flagged = 0;
    for (int i = 0; i < 50; ++i) {
      const SubsequenceReport r =
          subsequence_bound_check(uniform01(seed, u64(i)), C, q_max);
      for (const SubsequenceEntry& e : r.entries) {
        ++total;
        flagged += e.flagged ? 1 : 0;
      }
    }
    if (C == 64.0) {
      total64 = total;
      flagged64 = flagged;
    }
    if (smallest_full == 0.0 && total > 0 && flagged == total)
      smallest_full = C;
  }
  const double frac = total64 > 0 ? double(flagged64) / double(total64) : 0.0;
  const bool pass = total64 > 0 && frac >= 0.95;
  return {9, "subsequence lower bound (sum |S_m|^2 >= 2 N^2)", pass,
          fmt(100.0 * frac, 4) + "% of " + std::to_string(total64) +
              " points at C=64; smallest C with 100%: " +
              (smallest_full > 0 ? fmt(smallest_full, 3) : std::string("none"))};
}

// criterion 10: Fresnel main term tracks |S_m| within 10 sqrt(q)(1+|xi|q)
inline CriterionResult c10() {
  const u64 seed = 414214;
  int checked = 0, violations = 0;
  double worst_excess = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double w = uniform01(seed, u64(i));
    for (const Rational& pq : even_numerator_approx(w, 1.0, 50)) {
      FJKContext ctx;
      try {
        ctx = fjk_context(w, pq);
      } catch (const std::exception&) {
        continue;  // |a| > 1/2: outside the frame
      }
      const i64 m_max = 4 * pq.q * pq.q;
      const FjkSeries series = fjk_main_terms(ctx, m_max);
      if (series.m_valid < 1) continue;
      const double budget =
          10.0 * std::sqrt(double(pq.q)) * (1.0 + std::fabs(ctx.xi) * double(pq.q));
      std::vector<double> s_abs(std::size_t(series.m_valid) + 1, 0.0);
      detail::weyl_scan(series.m_valid, Frequency::from_value(w),
                        WeylKind::linear_shifted, [&](i64 m, cplx s) {
                          s_abs[std::size_t(m)] = std::abs(s);
                        });
      for (i64 m = 1; m <= series.m_valid; ++m) {
        const double gap =
            std::fabs(s_abs[std::size_t(m)] - series.t_abs[std::size_t(m - 1)]);
        ++checked;
        if (gap > budget) {
          ++violations;
          worst_excess = std::max(worst_excess, gap / budget);
        }
      }
    }
  }
  const bool pass = checked > 0 && violations == 0;
  return {10, "FJK main-term accuracy", pass,
          std::to_string(checked) + " comparisons, " +
              std::to_string(violations) + " over budget" +
              (violations ? " (worst x" + fmt(worst_excess, 3) + ")" : "")};
}

// criterion 11: Herman bound at lambda = 10 for both potentials
inline CriterionResult c11() {
  const double floor_value = std::log(10.0) - 0.05;
  bool pass = true;
  std::string detail;
  for (PotentialKind kind : {PotentialKind::skew, PotentialKind::amo}) {
    const LyapunovEstimate est = lyapunov_mc(10.0, 0.0, Frequency::sqrt2m1(),
                                             10000, 200, 1111, kind);
    pass = pass && est.value >= floor_value;
    detail += (kind == PotentialKind::skew ? "skew: " : " amo: ") +
              fmt(est.value, 5);
  }
  detail += " (need >= " + fmt(floor_value, 5) + ")";
  return {11, "Herman lower bound (lambda = 10)", pass, detail};
}

// criterion 12: AMO lambda^2 coefficient stays bounded while 2n escapes
inline CriterionResult c12() {
  const std::vector<std::pair<std::string, Frequency>> omegas = {
      {"0", Frequency::from_rational(0, 1)},
      {"1/4", Frequency::from_rational(1, 4)},
      {"sqrt2m1", Frequency::sqrt2m1()}};
  double worst = 0.0;
  bool bounded = true, contrast = true;
  for (const auto& [name, om] : omegas) {
    const double cap = 2.0 / std::pow(std::cos(kPi * om.value()), 2.0);
    double max_amo = 0.0;
    for (i64 n = 1; n <= 200; ++n) {
      const double closed = amo_alpha2_closed(n, om);
      worst = std::max(worst, rel_gap(amo_alpha_bruteforce(n, 1, om), closed));
      max_amo = std::max(max_amo, closed);
    }
    bounded = bounded && max_amo <= cap + 1e-9;
    contrast = contrast && alpha2_closed(200) > cap;
  }
  const bool pass = worst <= 1e-9 && bounded && contrast;
  return {12, "AMO contrast (bounded alpha~2 vs 2n)", pass,
          "max rel gap = " + fmt(worst, 3) +
              (bounded ? ", bounded" : ", bound FAILED") +
              (contrast ? ", contrast holds" : ", contrast FAILED")};
}

// criterion 13: top coefficient alpha_2n >= (1/4)^n, with the 1/4 floor
// re-derived from the log-cosine integral
inline CriterionResult c13() {
  // midpoint rule dodges the logarithmic singularities
  const i64 panels = 1 << 21;
  Kahan acc;
  for (i64 i = 0; i < panels; ++i) {
    const double x = (double(i) + 0.5) / double(panels);
    const double c = std::cos(kTwoPi * x);
    acc.add(std::log(c * c));
  }
  const double floor_const = std::exp(acc.value() / double(panels));
  const bool floor_ok = std::fabs(floor_const - 0.25) <= 1e-3 * 0.25;
  bool bounds_ok = true;
  double worst_margin = 1e300;
  for (const auto& [name, om] : omega_set())
    for (i64 n = 1; n <= 10; ++n) {
      const TopCoeffReport rep = alpha_top_check(n, om);
      bounds_ok = bounds_ok && rep.bound_ok;
      worst_margin =
          std::min(worst_margin, rep.alpha_top / std::pow(0.25, double(n)));
    }
  const bool pass = floor_ok && bounds_ok;
  return {13, "top coefficient bound alpha_2n >= (1/4)^n", pass,
          "integral floor = " + fmt(floor_const, 6) +
              ", min margin x" + fmt(worst_margin, 3)};
}

// criterion 14: byte-identical payloads under thread counts 1 and 8
inline CriterionResult c14() {
  std::vector<RunConfig> cases;
  {
    RunConfig c;
    c.command = "pn";
    c.n = 6;
    c.lambda = 0.8;
    c.omega_spec = "sqrt2m1";
    cases.push_back(c);
  }
  {
    RunConfig c;
    c.command = "lyapunov";
    c.lambda = 1.2;
    c.E = 0.1;
    c.omega_spec = "golden";
    c.n = 400;
    c.samples = 128;
    c.seed = 42;
    cases.push_back(c);
  }
  {
    RunConfig c;
    c.command = "goodset";
    c.n = 256;
    c.threshold = 0.002;
    c.samples = 500;
    c.seed = 7;
    cases.push_back(c);
  }
  {
    RunConfig c;
    c.command = "weyl-moments";
    c.cmd = "first";
    c.m = 2000;
    c.samples = 300;
    c.seed = 5;
    cases.push_back(c);
  }
  int mismatches = 0;
  const int saved = thread_override();
  for (const RunConfig& c : cases) {
    thread_override() = 1;
    const std::string one = run(c).deterministic_bytes();
    thread_override() = 8;
    const std::string eight = run(c).deterministic_bytes();
    if (one != eight) ++mismatches;
  }
  thread_override() = saved;
  return {14, "byte-identical payloads across thread counts", mismatches == 0,
          std::to_string(cases.size()) + " commands, " +
              std::to_string(mismatches) + " mismatches"};
}

}  // namespace detail_acc

inline void print_line(std::ostream& out, const CriterionResult& r) {
  char head[16];
  std::snprintf(head, sizeof head, "[%2d] ", r.id);
  out << head << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail
      << std::endl;
}

inline std::vector<CriterionResult> run_all(std::ostream& out) {
  using namespace detail_acc;
  std::vector<CriterionResult> results;
  auto push = [&](CriterionResult r) {
    print_line(out, r);
    results.push_back(std::move(r));
  };
  push(c1());
  push(c2());
  push(c3());
  push(c4());
  push(c5());
  push(c6());
  CjvhOutcome seven = c7();
  push(seven.result);
  push(c8(seven.c1_constant, seven.delta));
  push(c9());
  push(c10());
  push(c11());
  push(c12());
  push(c13());
  push(c14());
  return results;
}

inline bool all_passed(const std::vector<CriterionResult>& rs) {
  for (const CriterionResult& r : rs)
    if (!r.pass) return false;
  return true;
}

}  // namespace skewshift::acceptance
