#pragma once
// Transfer-matrix cocycle for the discrete Schrodinger operator: products
// M_n = A_n ... A_1 of A_j = [[E - lambda v_j, -1], [1, 0]] with v_j drawn
// from the skew-shift or Almost-Mathieu potential. Products grow like
// exp(n log lambda), so the stored matrix is renormalized by its max-entry
// magnitude whenever that leaves [1/2, 2], with the log of the scale carried
// separately; traces are then read off in log space without ever forming the
// unscaled product.
//
// P_n(lambda) = E_{T^2}[ Tr M_n^T M_n ] is, at fixed lambda, a trigonometric
// polynomial in (x,y) of degree <= 2n in x and <= n(n+1) in y, so the default
// equidistant grid (4n+1) x (2n(n+1)+1) averages it exactly up to rounding.

#include <stdexcept>

#include "skewshift/parallel.hpp"
#include "skewshift/rng.hpp"
#include "skewshift/torus.hpp"

namespace skewshift {

enum class PotentialKind { skew, amo };

// For the AMO potential the sample point's first coordinate plays the role
// of the rotation phase theta; y is unused.
inline double potential_value(PotentialKind kind, i64 j, TorusPoint pt,
                              const Frequency& omega) {
  return kind == PotentialKind::skew ? skew_potential(j, pt, omega)
                                     : amo_potential(j, pt.x, omega);
}

struct TransferMatrix {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  double det() const { return a11 * a22 - a12 * a21; }
};

inline TransferMatrix transfer_matrix(double E, double lambda, double v) {
  return {E - lambda * v, -1.0, 1.0, 0.0};
}

// 2x2 product with separated logarithmic scale:
// exp(log_scale) * [[m11,m12],[m21,m22]] equals the true product.
struct ScaledProduct {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;
  double log_scale = 0.0;

  double max_abs() const {
    double a = std::fabs(m11), b = std::fabs(m12);
    double c = std::fabs(m21), d = std::fabs(m22);
    return std::max(std::max(a, b), std::max(c, d));
  }
};

inline ScaledProduct cocycle_product(i64 n, double lambda, double E,
                                     TorusPoint pt, const Frequency& omega,
                                     PotentialKind kind,
                                     bool renormalize = true) {
  if (n < 1) throw std::invalid_argument("cocycle_product: n must be >= 1");
  ScaledProduct sp;
  for (i64 j = 1; j <= n; ++j) {
    const double a = E - lambda * potential_value(kind, j, pt, omega);
    // left-multiply by A_j = [[a, -1], [1, 0]]
    const double r11 = a * sp.m11 - sp.m21;
    const double r12 = a * sp.m12 - sp.m22;
    sp.m21 = sp.m11;
    sp.m22 = sp.m12;
    sp.m11 = r11;
    sp.m12 = r12;
    if (renormalize) {
      const double s = sp.max_abs();
      if (s > 2.0 || s < 0.5) {
        const double inv = 1.0 / s;
        sp.m11 *= inv;
        sp.m12 *= inv;
        sp.m21 *= inv;
        sp.m22 *= inv;
        sp.log_scale += std::log(s);
      }
    }
  }
  return sp;
}

// log Tr[M^T M] of the true (unscaled) product; >= log 2 since det M = 1.
inline double trace_mstar_m(const ScaledProduct& sp) {
  const double ss = sp.m11 * sp.m11 + sp.m12 * sp.m12 + sp.m21 * sp.m21 +
                    sp.m22 * sp.m22;
  return 2.0 * sp.log_scale + std::log(ss);
}

struct GridSpec {
  i64 nx = 0;
  i64 ny = 0;

  static GridSpec exact_default(i64 n) { return {4 * n + 1, 2 * n * (n + 1) + 1}; }
  bool meets_threshold(i64 n) const {
    return nx >= 4 * n + 1 && ny >= 2 * n * (n + 1) + 1;
  }
};

struct PnResult {
  double value = 0.0;
  bool grid_exact = true;  // grid met the exactness threshold
};

// Equidistant-grid average of Tr[M_n^T M_n] at E = 0: the polynomial
// P_n(lambda, 0). An undersized grid is flagged, not rejected.
inline PnResult p_n_grid(i64 n, double lambda, const Frequency& omega,
                         GridSpec grid = {}, int threads = 0) {
  if (n < 1) throw std::invalid_argument("p_n_grid: n must be >= 1");
  if (grid.nx <= 0 || grid.ny <= 0) grid = GridSpec::exact_default(n);
  const i64 total = grid.nx * grid.ny;
  double sum = chunked_reduce<double>(
      total, 1024, 0.0,
      [&](i64 b, i64 e) {
        Kahan part;
        for (i64 i = b; i < e; ++i) {
          TorusPoint pt{double(i / grid.ny) / double(grid.nx),
                        double(i % grid.ny) / double(grid.ny)};
          ScaledProduct sp =
              cocycle_product(n, lambda, 0.0, pt, omega, PotentialKind::skew);
          part.add(std::exp(trace_mstar_m(sp)));
        }
        return part.value();
      },
      [](double& acc, double part) { acc += part; }, threads);
  return {sum / double(total), grid.meets_threshold(n)};
}

// (1/n) log P_n(lambda, 0): the finite-n growth rate whose liminf the
// Jensen upper bound controls.
inline PnResult jensen_rate(i64 n, double lambda, const Frequency& omega,
                            GridSpec grid = {}, int threads = 0) {
  PnResult p = p_n_grid(n, lambda, omega, grid, threads);
  return {std::log(p.value) / double(n), p.grid_exact};
}

struct LyapunovEstimate {
  double value = 0.0;    // nats per step
  double stderr_ = 0.0;
  i64 samples = 0;
  i64 n = 0;
};

// Monte-Carlo spatial average of (1/n) log Tr[M_n^T M_n] over uniform
// (x, y); deterministic per seed, bit-identical for any thread count.
inline LyapunovEstimate lyapunov_mc(double lambda, double E,
                                    const Frequency& omega, i64 n,
                                    i64 samples, u64 seed, PotentialKind kind,
                                    int threads = 0) {
  if (n < 1) throw std::invalid_argument("lyapunov_mc: n must be >= 1");
  if (samples < 1) throw std::invalid_argument("lyapunov_mc: samples must be >= 1");
  std::vector<double> vals(static_cast<std::size_t>(samples));
  parallel_fill(
      vals,
      [&](i64 i) {
        TorusPoint pt{uniform01(seed, 2 * u64(i)), uniform01(seed, 2 * u64(i) + 1)};
        ScaledProduct sp = cocycle_product(n, lambda, E, pt, omega, kind);
        return trace_mstar_m(sp) / double(n);
      },
      threads);
  SampleStats st = sample_stats(vals);
  return {st.mean, st.stderr_, samples, n};
}

}  // namespace skewshift
