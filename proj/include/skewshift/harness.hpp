#pragma once
// Command dispatch shared by the CLI and the acceptance suite. A RunConfig
// fully determines the result payload: the seed is always echoed, every
// numeric flag is echoed, and serialization uses stable key order, so two
// runs with the same config produce byte-identical payloads regardless of
// thread count. Wall time is reported outside the deterministic portion.

#include <chrono>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skewshift/cocycle.hpp"
#include "skewshift/diophantine.hpp"
#include "skewshift/io.hpp"
#include "skewshift/perturbation.hpp"
#include "skewshift/weyl.hpp"

namespace skewshift {

inline constexpr const char* kVersion = "0.1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string omega_spec = "0";
  std::string method = "brute";   // alpha/amo dispatch
  std::string cmd = "second";     // weyl-moments dispatch
  std::string mode = "subseq";    // fjk dispatch
  std::string potential = "skew";
  std::string kind = "W";
  std::string format = "json";
  std::string out_path;
  i64 n = 8;
  i64 k = 1;
  i64 m = 1000;
  i64 samples = 200;
  i64 q_max = 1000;
  i64 nx = 0, ny = 0, nw = 0;
  i64 pq_p = 0, pq_q = 0;         // explicit fraction for fjk context mode
  double lambda = 1.0;
  double E = 0.0;
  double C = 64.0;
  double threshold = -1.0;        // < 0: derive from a cjvh estimate
  double xi = 0.0;
  double x = 0.0, y = 0.0;        // torus point for beta evaluation
  double yarg = 0.0;              // fresnel argument
  u64 seed = 1;
  std::vector<i64> m_list;
};

// omega spec: decimal literal, named constant, or exact rational "p/q".
inline Frequency parse_omega(const std::string& spec) {
  if (spec == "sqrt2m1") return Frequency::sqrt2m1();
  if (spec == "golden") return Frequency::golden();
  const auto slash = spec.find('/');
  try {
    if (slash != std::string::npos) {
      const i64 p = std::stoll(spec.substr(0, slash));
      const i64 q = std::stoll(spec.substr(slash + 1));
      return Frequency::from_rational(p, q);
    }
    std::size_t used = 0;
    const double v = std::stod(spec, &used);
    if (used != spec.size()) throw UsageError("malformed omega spec: " + spec);
    return Frequency::from_value(v);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("malformed omega spec: " + spec);
  }
}

struct ResultEnvelope {
  nlohmann::ordered_json config;
  nlohmann::ordered_json payload;
  std::vector<std::string> warnings;
  std::string version = kVersion;
  double wall_ms = 0.0;

  // everything except wall time; the byte-determinism contract covers this
  std::string deterministic_bytes() const {
    nlohmann::ordered_json j;
    j["config"] = config;
    j["payload"] = payload;
    j["warnings"] = warnings;
    j["version"] = version;
    return j.dump(2);
  }
};

namespace detail {

inline nlohmann::ordered_json echo_config(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["omega"] = c.omega_spec;
  j["method"] = c.method;
  j["cmd"] = c.cmd;
  j["mode"] = c.mode;
  j["potential"] = c.potential;
  j["kind"] = c.kind;
  j["n"] = c.n;
  j["k"] = c.k;
  j["m"] = c.m;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["q_max"] = c.q_max;
  j["nx"] = c.nx;
  j["ny"] = c.ny;
  j["nw"] = c.nw;
  j["p"] = c.pq_p;
  j["q"] = c.pq_q;
  j["lambda"] = c.lambda;
  j["E"] = c.E;
  j["C"] = c.C;
  j["threshold"] = c.threshold;
  j["xi"] = c.xi;
  j["x"] = c.x;
  j["y"] = c.y;
  j["yarg"] = c.yarg;
  j["m_list"] = c.m_list;
  j["format"] = c.format;
  return j;
}

inline PotentialKind parse_potential(const std::string& s) {
  if (s == "skew") return PotentialKind::skew;
  if (s == "amo") return PotentialKind::amo;
  throw UsageError("unknown potential: " + s);
}

inline WeylKind parse_kind(const std::string& s) {
  if (s == "W") return WeylKind::pure;
  if (s == "S") return WeylKind::linear_shifted;
  throw UsageError("unknown sum kind: " + s);
}

inline nlohmann::ordered_json moment_json(const MomentReport& r) {
  nlohmann::ordered_json j;
  j["m"] = r.m;
  j["estimate"] = r.estimate;
  j["stderr"] = r.stderr_;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  return j;
}

inline void run_alpha(const RunConfig& c, const Frequency& om,
                      nlohmann::ordered_json& payload,
                      std::vector<std::string>& warnings) {
  const std::string key = "alpha" + std::to_string(2 * c.k);
  if (c.method == "brute") {
    payload[key] = alpha_bruteforce(c.n, c.k, om);
  } else if (c.method == "closed") {
    if (c.k == 1)
      payload[key] = alpha2_closed(c.n);
    else if (c.k == 2)
      payload[key] = alpha4_closed(c.n, om);
    else
      throw UsageError("closed forms exist only for k = 1 and k = 2");
  } else if (c.method == "oracle") {
    CoefficientTable t = poly_oracle(c.n, om, GridSpec{c.nx, c.ny});
    payload["coeffs"] = t.coeffs;
    payload["max_odd_abs"] = t.max_odd_abs;
    if (!t.grid_exact) warnings.push_back("grid below exactness threshold");
  } else if (c.method == "top") {
    TopCoeffReport r = alpha_top_check(c.n, om, GridSpec{c.nx, c.ny});
    payload["alpha_top"] = r.alpha_top;
    payload["alpha_second"] = r.alpha_second;
    payload["bound_ok"] = r.bound_ok;
  } else if (c.method == "beta") {
    payload["beta" + std::to_string(2 * c.k)] =
        beta_bruteforce(c.n, c.k, torus_point(c.x, c.y), om);
  } else if (c.method == "omega-avg") {
    payload["omega_avg_alpha4"] = omega_avg_alpha4(c.n);
  } else if (c.method == "lambda4") {
    Lambda4Report r = log_lambda4_term(c.n, Lambda4Grids{c.nx, c.ny, c.nw});
    payload["e_beta4"] = r.e_beta4;
    payload["e_beta2_sq"] = r.e_beta2_sq;
    payload["value"] = r.value;
    payload["ratio"] = r.ratio;
  } else {
    throw UsageError("unknown alpha method: " + c.method);
  }
}

inline void run_weyl_moments(const RunConfig& c, nlohmann::ordered_json& payload) {
  if (c.cmd == "second") {
    payload["value"] = second_moment_check(c.n);
  } else if (c.cmd == "first") {
    payload.update(moment_json(
        first_moment_estimate(c.m, c.samples, c.seed, parse_kind(c.kind))));
  } else if (c.cmd == "zn") {
    payload["value"] = z_n(parse_omega(c.omega_spec), c.n);
  } else if (c.cmd == "parity") {
    payload["value"] = parity_identity_check(c.m, parse_omega(c.omega_spec));
  } else if (c.cmd == "sum") {
    const Frequency om = parse_omega(c.omega_spec);
    const cplx s = c.kind == "general"
                       ? weyl_general(c.m, om.value(), c.xi)
                       : (parse_kind(c.kind) == WeylKind::pure
                              ? pure_weyl_prefix(c.m, om).at(c.m)
                              : weyl_prefix(c.m, om).at(c.m));
    payload["re"] = s.real();
    payload["im"] = s.imag();
    payload["abs"] = std::abs(s);
  } else if (c.cmd == "hl") {
    const Frequency om = parse_omega(c.omega_spec);
    HlStep st = hl_step(c.m, om.value(), c.xi);
    payload["m_next"] = st.m_next;
    payload["omega_next"] = st.omega_next;
    payload["xi_next"] = st.xi_next;
    payload["prefactor_re"] = st.prefactor.real();
    payload["prefactor_im"] = st.prefactor.imag();
    payload["error_budget"] = st.error_budget;
  } else {
    throw UsageError("unknown weyl-moments cmd: " + c.cmd);
  }
}

inline void run_fjk(const RunConfig& c, nlohmann::ordered_json& payload) {
  const Frequency om = parse_omega(c.omega_spec);
  if (c.mode == "subseq") {
    SubsequenceReport rep = subsequence_bound_check(om.value(), c.C, c.q_max);
    payload["omega"] = rep.omega;
    payload["C"] = rep.C;
    payload["q_max"] = rep.q_max;
    auto arr = nlohmann::ordered_json::array();
    for (const SubsequenceEntry& e : rep.entries) {
      nlohmann::ordered_json row;
      row["p"] = e.p;
      row["q"] = e.q;
      row["N"] = e.N;
      row["lhs"] = e.lhs;
      row["ratio"] = e.ratio;
      row["flagged"] = e.flagged;
      arr.push_back(row);
    }
    payload["entries"] = arr;
  } else if (c.mode == "approx") {
    auto arr = nlohmann::ordered_json::array();
    for (const Rational& r : even_numerator_approx(om.value(), c.C, c.q_max))
      arr.push_back({{"p", r.p}, {"q", r.q}});
    payload["pairs"] = arr;
  } else if (c.mode == "cf") {
    ContinuedFraction cf = continued_fraction(om.value(), int(c.n));
    payload["quotients"] = cf.quotients;
    auto arr = nlohmann::ordered_json::array();
    for (const Rational& r : cf.convergents)
      arr.push_back({{"p", r.p}, {"q", r.q}});
    payload["convergents"] = arr;
    payload["terminated"] = cf.terminated;
  } else if (c.mode == "context") {
    if (c.pq_q <= 0) throw UsageError("fjk context mode needs --p and --q");
    FJKContext ctx = fjk_context(om.value(), Rational{c.pq_p, c.pq_q});
    payload["p"] = ctx.p;
    payload["q"] = ctx.q;
    payload["xi"] = ctx.xi;
    payload["theta"] = ctx.theta;
    payload["A"] = ctx.A;
    payload["a"] = ctx.a;
    if (c.m > 0) {
      payload["t_abs"] = fjk_main_term_magnitude(c.m, ctx);
      payload["s_abs"] = std::abs(weyl_prefix(c.m, om).at(c.m));
    }
  } else if (c.mode == "fresnel") {
    const cplx f = fresnel(c.yarg);
    payload["re"] = f.real();
    payload["im"] = f.imag();
    payload["abs"] = std::abs(f);
  } else {
    throw UsageError("unknown fjk mode: " + c.mode);
  }
}

}  // namespace detail

// Dispatches one command; `verify` belongs to the CLI driver, which runs the
// acceptance suite instead.
inline ResultEnvelope run(const RunConfig& c) {
  const auto tic = std::chrono::steady_clock::now();
  ResultEnvelope env;
  env.config = detail::echo_config(c);
  nlohmann::ordered_json& payload = env.payload;

  if (c.command == "alpha") {
    detail::run_alpha(c, parse_omega(c.omega_spec), payload, env.warnings);
  } else if (c.command == "pn") {
    const PnResult p =
        p_n_grid(c.n, c.lambda, parse_omega(c.omega_spec), GridSpec{c.nx, c.ny});
    payload["P"] = p.value;
    payload["rate"] = std::log(p.value) / double(c.n);
    if (!p.grid_exact) env.warnings.push_back("grid below exactness threshold");
  } else if (c.command == "lyapunov") {
    const LyapunovEstimate est =
        lyapunov_mc(c.lambda, c.E, parse_omega(c.omega_spec), c.n, c.samples,
                    c.seed, detail::parse_potential(c.potential));
    payload["value"] = est.value;
    payload["stderr"] = est.stderr_;
    payload["samples"] = est.samples;
    payload["n"] = est.n;
  } else if (c.command == "weyl-moments") {
    detail::run_weyl_moments(c, payload);
  } else if (c.command == "goodset") {
    double threshold = c.threshold;
    if (threshold < 0.0) {
      const CjvhReport cv =
          cjvh_estimate({4000}, std::min<i64>(c.samples, 400), c.seed);
      threshold = cv.c0;  // c1^2 / 16
    }
    if (c.omega_spec != "0" && !c.omega_spec.empty()) {
      const Frequency om = parse_omega(c.omega_spec);
      if (om.is_rational())
        throw UsageError(
            "goodset: rational frequencies are excluded (Gauss-sum scale "
            "breaks the diffusive normalization)");
      Kahan acc;
      detail::weyl_scan(c.n - 1, om, WeylKind::linear_shifted,
                        [&](i64, cplx s) { acc.add(std::norm(s)); });
      const double energy = acc.value() / (double(c.n) * double(c.n));
      payload["threshold"] = threshold;
      payload["energy"] = energy;
      payload["member"] = energy > threshold;
    } else {
      const GoodSetReport rep =
          good_set_measure(c.n, threshold, c.samples, c.seed);
      payload["measure"] = rep.measure;
      payload["stderr"] = rep.stderr_;
      payload["samples"] = rep.samples;
      payload["threshold"] = rep.threshold;
    }
  } else if (c.command == "cjvh") {
    const std::vector<i64> ms = c.m_list.empty()
                                    ? std::vector<i64>{2000, 8000, 32000}
                                    : c.m_list;
    const CjvhReport rep = cjvh_estimate(ms, c.samples, c.seed);
    auto arr = nlohmann::ordered_json::array();
    for (const MomentReport& r : rep.per_m) arr.push_back(detail::moment_json(r));
    payload["per_m"] = arr;
    payload["c_jvh"] = rep.c_jvh;
    payload["c1"] = rep.c1;
    payload["c0"] = rep.c0;
    payload["delta"] = rep.delta;
  } else if (c.command == "fjk") {
    detail::run_fjk(c, payload);
  } else if (c.command == "curlicue") {
    const PathPolyline path = curlicue_path(c.n, parse_omega(c.omega_spec));
    auto ts = nlohmann::ordered_json::array();
    auto re = nlohmann::ordered_json::array();
    auto im = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < path.t.size(); ++i) {
      ts.push_back(path.t[i]);
      re.push_back(path.pos[i].real());
      im.push_back(path.pos[i].imag());
    }
    payload["t"] = ts;
    payload["re"] = re;
    payload["im"] = im;
  } else if (c.command == "amo") {
    const Frequency om = parse_omega(c.omega_spec);
    const std::string key = "amo_alpha" + std::to_string(2 * c.k);
    if (c.method == "closed") {
      if (c.k != 1) throw UsageError("amo closed form exists only for k = 1");
      payload[key] = amo_alpha2_closed(c.n, om);
    } else if (c.method == "brute") {
      payload[key] = amo_alpha_bruteforce(c.n, c.k, om);
    } else {
      throw UsageError("unknown amo method: " + c.method);
    }
  } else {
    throw UsageError("unknown command: " + c.command);
  }

  env.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - tic)
                    .count();
  return env;
}

// json: the full envelope with stable key order. csv: header row plus
// key,value rows, except curlicue paths which emit t,re,im columns.
inline std::string emit(const ResultEnvelope& env, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json j;
    j["config"] = env.config;
    j["payload"] = env.payload;
    j["warnings"] = env.warnings;
    j["version"] = env.version;
    j["wall_ms"] = env.wall_ms;
    return j.dump(2) + "\n";
  }
  if (format != "csv") throw UsageError("unknown format: " + format);
  std::ostringstream os;
  if (env.config["command"] == "curlicue") {
    os << "t,re,im\n";
    const auto& t = env.payload["t"];
    const auto& re = env.payload["re"];
    const auto& im = env.payload["im"];
    for (std::size_t i = 0; i < t.size(); ++i)
      os << fmt17(t[i].get<double>()) << ',' << fmt17(re[i].get<double>())
         << ',' << fmt17(im[i].get<double>()) << '\n';
    return os.str();
  }
  os << "key,value\n";
  for (const auto& [key, val] : env.payload.items()) {
    if (val.is_number_float())
      os << key << ',' << fmt17(val.get<double>()) << '\n';
    else
      os << key << ',' << val.dump() << '\n';
  }
  return os.str();
}

}  // namespace skewshift
