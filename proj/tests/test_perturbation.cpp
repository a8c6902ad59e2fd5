#include "skewshift/perturbation.hpp"

#include <gtest/gtest.h>

#include "skewshift/rng.hpp"

using namespace skewshift;

namespace {

std::vector<Frequency> test_frequencies() {
  return {Frequency::from_rational(0, 1), Frequency::from_rational(1, 2),
          Frequency::sqrt2m1(), Frequency::golden(),
          Frequency::from_value(0.123456)};
}

double rel_gap(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST(ClubIndicator, Examples) {
  IndexTuple j1{2, 3}, l1{4, 5};
  EXPECT_TRUE(club_indicator(j1, l1));
  IndexTuple j2{1, 2}, l2{2, 3};
  EXPECT_FALSE(club_indicator(j2, l2));  // j1 - l1 odd
  IndexTuple j3{1, 3}, l3{3, 5};
  EXPECT_FALSE(club_indicator(j3, l3));  // even gap inside j
  IndexTuple empty;
  EXPECT_TRUE(club_indicator(empty, empty));
  EXPECT_TRUE(club_indicator(j1, empty));
}

TEST(MonomialExpectation, SquareCollapses) {
  IndexTuple idx{3, 3};
  for (const Frequency& om : test_frequencies())
    EXPECT_NEAR(monomial_expectation(idx, om), 2.0, 1e-14);
}

TEST(MonomialExpectation, DistinctPairVanishes) {
  IndexTuple idx{2, 5};
  EXPECT_EQ(monomial_expectation(idx, Frequency::from_value(0.3)), 0.0);
}

TEST(MonomialExpectation, FourIndexSurvivor) {
  // only the (+,-,-,+) vector is orthogonal to (1,2,3,4); its phase is
  // 2w, so at w = 1/4 the value is 2 cos(pi) = -2
  IndexTuple idx{1, 2, 3, 4};
  EXPECT_NEAR(monomial_expectation(idx, Frequency::from_rational(1, 4)), -2.0, 1e-14);
}

TEST(MonomialExpectation, OddLengthIsZero) {
  IndexTuple idx{1, 2, 4};
  EXPECT_EQ(monomial_expectation(idx, Frequency::from_value(0.9)), 0.0);
  IndexTuple one{5};
  EXPECT_EQ(monomial_expectation(one, Frequency::from_value(0.9)), 0.0);
}

TEST(MonomialExpectation, MatchesGridQuadrature) {
  // independent route: integrate v_{j_1} ... v_{j_k} over an equidistant
  // (x, y) grid wide enough for the trig polynomial (x-frequencies <= k,
  // y-frequencies <= sum j) and compare with the sign-vector series
  for (int rep = 0; rep < 40; ++rep) {
    const int k = 2 + 2 * int(counter_rng(1601, rep) % 3);  // 2, 4, 6
    IndexTuple idx;
    i64 jsum = 0;
    for (int s = 0; s < k; ++s) {
      idx.push_back(1 + i64(counter_rng(1602, 16 * rep + s) % 8));
      jsum += idx.back();
    }
    const Frequency om = (rep % 3 == 0)
                             ? Frequency::from_rational(i64(rep), 7)
                             : Frequency::from_value(uniform01(1603, rep));
    const i64 nx = 2 * k + 1, ny = 2 * jsum + 1;
    Kahan acc;
    for (i64 a = 0; a < nx; ++a)
      for (i64 b = 0; b < ny; ++b) {
        const TorusPoint pt{double(a) / double(nx), double(b) / double(ny)};
        double prod = 1.0;
        for (i64 j : idx) prod *= skew_potential(j, pt, om);
        acc.add(prod);
      }
    const double quad = acc.value() / double(nx * ny);
    EXPECT_NEAR(monomial_expectation(idx, om), quad, 1e-11)
        << "rep=" << rep << " k=" << k;
  }
}

TEST(AlphaBruteforce, OrderZeroAndErrors) {
  EXPECT_EQ(alpha_bruteforce(4, 0, Frequency::golden()), 2.0);
  EXPECT_THROW(alpha_bruteforce(3, 4, Frequency::golden()), std::invalid_argument);
  EXPECT_THROW(alpha_bruteforce(3, -1, Frequency::golden()), std::invalid_argument);
}

TEST(AlphaBruteforce, AlphaTwoIsTwoN) {
  for (const Frequency& om : test_frequencies())
    for (i64 n = 1; n <= 9; ++n)
      EXPECT_NEAR(alpha_bruteforce(n, 1, om), 2.0 * double(n), 1e-10) << n;
}

TEST(AlphaBruteforce, AlphaFourAtNTwoIsFourForEveryFrequency) {
  for (const Frequency& om : test_frequencies())
    EXPECT_NEAR(alpha_bruteforce(2, 2, om), 4.0, 1e-12);
}

TEST(Alpha2Closed, Values) {
  EXPECT_DOUBLE_EQ(alpha2_closed(1), 2.0);
  EXPECT_DOUBLE_EQ(alpha2_closed(5), 10.0);
  EXPECT_DOUBLE_EQ(alpha2_closed(100), 200.0);
}

TEST(Alpha4Closed, GaussCases) {
  // S_m(0) = m, and l^2 - l is always even so the same holds at w = 1/2
  EXPECT_NEAR(alpha4_closed(2, Frequency::from_rational(0, 1)), 4.0, 1e-14);
  EXPECT_NEAR(alpha4_closed(5, Frequency::from_rational(0, 1)), 40.0, 1e-13);
  EXPECT_NEAR(alpha4_closed(5, Frequency::from_rational(1, 2)), 40.0, 1e-13);
  EXPECT_EQ(alpha4_closed(1, Frequency::golden()), 0.0);
}

TEST(Alpha4Closed, MatchesBruteforce) {
  for (const Frequency& om : test_frequencies())
    for (i64 n = 2; n <= 9; ++n) {
      double brute = alpha_bruteforce(n, 2, om);
      double closed = alpha4_closed(n, om);
      EXPECT_LE(rel_gap(brute, closed), 1e-11) << "n=" << n;
      EXPECT_GE(closed, -1e-12);  // sum of squared moduli
    }
}

TEST(AlphaBruteforce, PrefilterFormAgrees) {
  // dropping the mod-4 filter but keeping the sign must not change the value
  for (const Frequency& om : test_frequencies())
    for (i64 n = 2; n <= 6; ++n)
      for (i64 k = 1; k <= n; ++k) {
        double filtered = alpha_bruteforce(n, k, om);
        double prefilter = detail::alpha_bruteforce_prefilter(n, k, om);
        EXPECT_NEAR(filtered, prefilter, 1e-9) << "n=" << n << " k=" << k;
      }
}

TEST(PolyOracle, ConstantTermIsTwo) {
  for (const Frequency& om : test_frequencies()) {
    CoefficientTable t = poly_oracle(3, om);
    EXPECT_DOUBLE_EQ(t.coeffs[0], 2.0);
    EXPECT_TRUE(t.grid_exact);
    EXPECT_LE(t.max_odd_abs, 1e-10);
  }
}

TEST(PolyOracle, NTwoTable) {
  CoefficientTable t = poly_oracle(2, Frequency::from_rational(0, 1));
  ASSERT_EQ(t.coeffs.size(), 3u);
  EXPECT_NEAR(t.coeffs[0], 2.0, 1e-12);
  EXPECT_NEAR(t.coeffs[1], 4.0, 1e-12);
  EXPECT_NEAR(t.coeffs[2], 4.0, 1e-12);
}

TEST(PolyOracle, MatchesBruteforceThroughNFive) {
  for (const Frequency& om : test_frequencies())
    for (i64 n = 1; n <= 5; ++n) {
      CoefficientTable t = poly_oracle(n, om);
      for (i64 k = 0; k <= n; ++k) {
        double brute = alpha_bruteforce(n, k, om);
        EXPECT_LE(rel_gap(t.coeffs[std::size_t(k)], brute), 1e-9)
            << "n=" << n << " k=" << k;
      }
    }
}

TEST(PolyOracle, UndersizedGridFlagged) {
  CoefficientTable t = poly_oracle(3, Frequency::golden(), GridSpec{5, 5});
  EXPECT_FALSE(t.grid_exact);
}

TEST(AlphaTopCheck, SmallCases) {
  TopCoeffReport r1 = alpha_top_check(1, Frequency::golden());
  EXPECT_NEAR(r1.alpha_top, 2.0, 1e-12);
  EXPECT_TRUE(r1.bound_ok);  // 2 >= 1/4
  TopCoeffReport r2 = alpha_top_check(2, Frequency::from_rational(0, 1));
  EXPECT_NEAR(r2.alpha_top, 4.0, 1e-12);
  EXPECT_TRUE(r2.bound_ok);  // 4 >= 1/16
  TopCoeffReport r3 = alpha_top_check(3, Frequency::sqrt2m1());
  EXPECT_TRUE(r3.bound_ok);
}

TEST(BetaBruteforce, OrderZeroAndSingle) {
  EXPECT_EQ(beta_bruteforce(3, 0, {0.2, 0.7}, Frequency::golden()), 2.0);
  TorusPoint pt{0.31, 0.77};
  Frequency om = Frequency::from_value(0.4321);
  double v1 = skew_potential(1, pt, om);
  EXPECT_NEAR(beta_bruteforce(1, 1, pt, om), v1 * v1, 1e-13);
}

TEST(BetaBruteforce, HandResummationAtNTwo) {
  TorusPoint pt{0.0, 0.0};
  Frequency om = Frequency::from_rational(0, 1);
  double total = 0.0;
  for (i64 k = 0; k <= 2; ++k) total += beta_bruteforce(2, k, pt, om);
  EXPECT_NEAR(total, 18.0, 1e-12);  // Tr[M_2^T M_2] at lambda = 1
}

TEST(BetaBruteforce, MatchesAlternatingSquareIdentity) {
  // beta_2 = (sum_j (-1)^j v_j)^2, the O(n) form used by the lambda^4 probe
  for (int i = 0; i < 25; ++i) {
    i64 n = 1 + i64(counter_rng(41, i) % 8);
    TorusPoint pt{uniform01(42, 2 * i), uniform01(42, 2 * i + 1)};
    Frequency om = Frequency::from_value(uniform01(43, i));
    double s = 0.0;
    for (i64 j = 1; j <= n; ++j) {
      double vj = skew_potential(j, pt, om);
      s += (j % 2 == 0) ? vj : -vj;
    }
    EXPECT_NEAR(beta_bruteforce(n, 1, pt, om), s * s, 1e-10);
  }
}

TEST(BetaBruteforce, PointwiseResummation) {
  for (int i = 0; i < 30; ++i) {
    i64 n = 1 + i64(counter_rng(51, i) % 6);
    TorusPoint pt{uniform01(52, 2 * i), uniform01(52, 2 * i + 1)};
    Frequency om = Frequency::from_value(uniform01(53, i));
    double lambda = 1.5 * uniform01(54, i);
    double sum = 0.0, pw = 1.0;
    for (i64 k = 0; k <= n; ++k) {
      sum += beta_bruteforce(n, k, pt, om) * pw;
      pw *= lambda * lambda;
    }
    double tr = std::exp(trace_mstar_m(
        cocycle_product(n, lambda, 0.0, pt, om, PotentialKind::skew)));
    EXPECT_LE(rel_gap(sum, tr), 1e-10) << "n=" << n;
  }
}

TEST(OmegaAvgAlpha4, ClosedValues) {
  EXPECT_DOUBLE_EQ(omega_avg_alpha4(2), 4.0);
  EXPECT_DOUBLE_EQ(omega_avg_alpha4(5), 24.0);
  EXPECT_DOUBLE_EQ(omega_avg_alpha4(4), 16.0);
  EXPECT_THROW(omega_avg_alpha4(1), std::invalid_argument);
}

TEST(OmegaAvgAlpha4, MatchesGridQuadrature) {
  for (i64 n = 2; n <= 10; ++n) {
    const i64 m1 = n / 2;
    const i64 grid = 2 * m1 * (m1 - 1) + 3;
    Kahan acc;
    for (i64 t = 0; t < grid; ++t)
      acc.add(alpha4_closed(n, Frequency::from_rational(t, grid)));
    double quad = acc.value() / double(grid);
    double closed = omega_avg_alpha4(n);
    EXPECT_LE(rel_gap(quad, closed), 1e-11) << n;
  }
}

TEST(LogLambda4Term, DegenerateNOne) {
  // beta_2 = v_1^2, E[beta_2^2] = E[v^4] = 6, E[beta_4] = 0:
  // value = (0 - 6/4)/2 = -0.75
  Lambda4Report rep = log_lambda4_term(1);
  EXPECT_NEAR(rep.e_beta2_sq, 6.0, 1e-10);
  EXPECT_NEAR(rep.value, -0.75, 1e-10);
}

TEST(LogLambda4Term, NTwoOracle) {
  // v_1, v_2 decorrelate under the omega average: E[beta_2^2] =
  // E[(v_2 - v_1)^4] = 6 + 6*4 + 6 = 36, E[beta_4] = 4
  Lambda4Report rep = log_lambda4_term(2);
  EXPECT_NEAR(rep.e_beta4, 4.0, 1e-12);
  EXPECT_NEAR(rep.e_beta2_sq, 36.0, 1e-9);
  EXPECT_NEAR(rep.value, -2.5, 1e-9);
  EXPECT_NEAR(rep.ratio, -1.25, 1e-9);
}

TEST(LogLambda4Term, ScalingReport) {
  // exploratory: the cancellation leaves an order-n quantity if the
  // log-series converges; record the ratios, assert only sanity
  for (i64 n : {i64(8), i64(16), i64(24)}) {
    Lambda4Report rep = log_lambda4_term(n);
    RecordProperty("ratio_n" + std::to_string(n), std::to_string(rep.ratio));
    std::cout << "  lambda^4 log-term: n=" << n << " value=" << rep.value
              << " value/n=" << rep.ratio << "\n";
    EXPECT_TRUE(std::isfinite(rep.value));
    EXPECT_GT(rep.e_beta2_sq, 0.0);
  }
}

TEST(AmoAlpha2Closed, Examples) {
  EXPECT_NEAR(amo_alpha2_closed(2, Frequency::from_rational(1, 4)), 4.0, 1e-12);
  EXPECT_NEAR(amo_alpha2_closed(4, Frequency::from_rational(1, 4)), 0.0, 1e-12);
  EXPECT_NEAR(amo_alpha2_closed(3, Frequency::from_rational(0, 1)), 2.0, 1e-12);
  EXPECT_THROW(amo_alpha2_closed(3, Frequency::from_rational(1, 2)), std::domain_error);
  EXPECT_THROW(amo_alpha2_closed(3, Frequency::from_value(0.5)), std::domain_error);
}

TEST(AmoAlphaBruteforce, MatchesClosedForm) {
  EXPECT_EQ(amo_alpha_bruteforce(4, 0, Frequency::golden()), 2.0);
  for (const Frequency& om :
       {Frequency::from_rational(1, 4), Frequency::from_rational(0, 1),
        Frequency::sqrt2m1(), Frequency::from_value(0.123456)}) {
    for (i64 n = 1; n <= 30; ++n) {
      double brute = amo_alpha_bruteforce(n, 1, om);
      double closed = amo_alpha2_closed(n, om);
      EXPECT_LE(rel_gap(brute, closed), 1e-11) << "n=" << n;
    }
  }
  EXPECT_THROW(amo_alpha_bruteforce(2, 3, Frequency::golden()),
               std::invalid_argument);
}

TEST(AmoContrast, BoundedCoefficientVersusLinearGrowth) {
  Frequency om = Frequency::from_rational(1, 4);
  const double cap = 2.0 / std::pow(std::cos(kPi * om.value()), 2.0);
  double max_amo = 0.0;
  for (i64 n = 1; n <= 200; ++n)
    max_amo = std::max(max_amo, amo_alpha2_closed(n, om));
  EXPECT_LE(max_amo, cap + 1e-9);
  EXPECT_GT(alpha2_closed(200), cap);  // the skew coefficient escapes the cap
}
