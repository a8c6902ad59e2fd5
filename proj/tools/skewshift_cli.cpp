// Command-line front end. Every numerical routine in the library is reachable
// through one of the subcommands below; results are emitted as JSON (stable
// key order) or CSV with the full configuration echoed back, so any output
// can be reproduced from its own header. `verify` runs the acceptance suite.
//
// Exit codes: 0 success, 1 verification failure (or internal error),
// 2 usage error. Worker thread count comes from SKEWSHIFT_THREADS.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "skewshift/acceptance.hpp"
#include "skewshift/harness.hpp"

namespace {

using namespace skewshift;

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--omega", cfg.omega_spec,
                  "frequency: decimal, p/q, sqrt2m1, or golden");
  cmd->add_option("--seed", cfg.seed, "RNG seed (echoed in the output)");
  cmd->add_option("--out", cfg.out_path, "write the result here instead of stdout");
  cmd->add_option("--format", cfg.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

int emit_result(const RunConfig& cfg) {
  const ResultEnvelope env = run(cfg);
  const std::string text = emit(env, cfg.format);
  if (cfg.out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream os(cfg.out_path, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot write " << cfg.out_path << "\n";
    return 2;
  }
  os << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skewshift: quadratic Weyl sums and the skew-shift cocycle"};
  app.require_subcommand(1);

  RunConfig cfg;

  CLI::App* alpha = app.add_subcommand(
      "alpha", "series coefficients of the averaged trace polynomial");
  alpha->add_option("--n", cfg.n, "matrix count");
  alpha->add_option("--k", cfg.k, "coefficient order (lambda^{2k})");
  alpha->add_option("--method", cfg.method,
                    "brute | closed | oracle | top | beta | omega-avg | lambda4");
  alpha->add_option("--x", cfg.x, "torus x (beta method)");
  alpha->add_option("--y", cfg.y, "torus y (beta method)");
  alpha->add_option("--nx", cfg.nx, "grid size in x (0 = exact default)");
  alpha->add_option("--ny", cfg.ny, "grid size in y (0 = exact default)");
  alpha->add_option("--nw", cfg.nw, "grid size in omega (0 = exact default)");
  add_common(alpha, cfg);

  CLI::App* pn = app.add_subcommand("pn", "torus-averaged Tr[M^T M] at E = 0");
  pn->add_option("--n", cfg.n, "matrix count");
  pn->add_option("--lambda", cfg.lambda, "coupling constant");
  pn->add_option("--nx", cfg.nx, "grid size in x (0 = exact default)");
  pn->add_option("--ny", cfg.ny, "grid size in y (0 = exact default)");
  add_common(pn, cfg);

  CLI::App* lyap = app.add_subcommand("lyapunov", "Monte-Carlo growth rate");
  lyap->add_option("--lambda", cfg.lambda, "coupling constant");
  lyap->add_option("--E", cfg.E, "energy");
  lyap->add_option("--n", cfg.n, "matrix count");
  lyap->add_option("--samples", cfg.samples, "Monte-Carlo samples");
  lyap->add_option("--potential", cfg.potential, "skew | amo")
      ->check(CLI::IsMember({"skew", "amo"}));
  add_common(lyap, cfg);

  CLI::App* wm = app.add_subcommand("weyl-moments", "Weyl-sum statistics");
  wm->add_option("--cmd", cfg.cmd, "second | first | zn | parity | sum | hl")
      ->check(CLI::IsMember({"second", "first", "zn", "parity", "sum", "hl"}));
  wm->add_option("--n", cfg.n, "prefix count (second, zn)");
  wm->add_option("--m", cfg.m, "sum length (first, parity, sum, hl)");
  wm->add_option("--samples", cfg.samples, "Monte-Carlo samples");
  wm->add_option("--kind", cfg.kind, "S | W | general");
  wm->add_option("--xi", cfg.xi, "linear coefficient (sum, hl)");
  add_common(wm, cfg);

  CLI::App* gs = app.add_subcommand("goodset", "good-set measure or membership");
  gs->add_option("--n", cfg.n, "prefix count");
  gs->add_option("--threshold", cfg.threshold,
                 "energy threshold (< 0: derive from a cjvh estimate)");
  gs->add_option("--samples", cfg.samples, "Monte-Carlo samples");
  add_common(gs, cfg);

  CLI::App* cj = app.add_subcommand("cjvh", "diffusive-constant estimate");
  cj->add_option("--m-list", cfg.m_list, "sum lengths (all >= 1000)");
  cj->add_option("--samples", cfg.samples, "Monte-Carlo samples per length");
  add_common(cj, cfg);

  CLI::App* fjk = app.add_subcommand(
      "fjk", "rational approximation and Fresnel main-term machinery");
  fjk->add_option("--mode", cfg.mode, "subseq | approx | cf | context | fresnel")
      ->check(CLI::IsMember({"subseq", "approx", "cf", "context", "fresnel"}));
  fjk->add_option("--C", cfg.C, "approximation strength");
  fjk->add_option("--q-max", cfg.q_max, "largest denominator");
  fjk->add_option("--n", cfg.n, "continued-fraction depth (cf)");
  fjk->add_option("--m", cfg.m, "sum length (context)");
  fjk->add_option("--p", cfg.pq_p, "numerator (context)");
  fjk->add_option("--q", cfg.pq_q, "denominator (context)");
  fjk->add_option("--yarg", cfg.yarg, "Fresnel argument (fresnel)");
  add_common(fjk, cfg);

  CLI::App* curli = app.add_subcommand("curlicue", "normalized prefix path");
  curli->add_option("--n", cfg.n, "prefix count");
  add_common(curli, cfg);

  CLI::App* amo = app.add_subcommand("amo", "Almost-Mathieu series coefficients");
  amo->add_option("--n", cfg.n, "matrix count");
  amo->add_option("--k", cfg.k, "coefficient order");
  amo->add_option("--method", cfg.method, "brute | closed");
  add_common(amo, cfg);

  CLI::App* verify =
      app.add_subcommand("verify", "run the acceptance suite (exit 1 on failure)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) {
      const auto results = skewshift::acceptance::run_all(std::cout);
      int failures = 0;
      for (const auto& r : results) failures += r.pass ? 0 : 1;
      std::cout << (failures == 0 ? "VERIFY PASS" : "VERIFY FAIL") << " ("
                << results.size() - failures << "/" << results.size()
                << " criteria)" << std::endl;
      return failures == 0 ? 0 : 1;
    }
    for (CLI::App* sub : app.get_subcommands()) {
      cfg.command = sub->get_name();
      return emit_result(cfg);
    }
    std::cerr << "error: no command given\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
