#include "skewshift/harness.hpp"

#include <gtest/gtest.h>

using namespace skewshift;
using nlohmann::ordered_json;

TEST(ParseOmega, Forms) {
  EXPECT_DOUBLE_EQ(parse_omega("0.25").value(), 0.25);
  Frequency r = parse_omega("3/7");
  EXPECT_TRUE(r.is_rational());
  EXPECT_EQ(r.p(), 3);
  EXPECT_EQ(r.q(), 7);
  EXPECT_DOUBLE_EQ(parse_omega("sqrt2m1").value(), std::sqrt(2.0) - 1.0);
  EXPECT_NEAR(parse_omega("golden").value(), (std::sqrt(5.0) - 1.0) / 2.0, 1e-16);
  EXPECT_DOUBLE_EQ(parse_omega("1.75").value(), 0.75);  // reduced mod 1
  EXPECT_THROW(parse_omega("abc"), UsageError);
  EXPECT_THROW(parse_omega("1.5x"), UsageError);
  EXPECT_THROW(parse_omega("1/0"), UsageError);
}

TEST(Run, AlphaPayloadKey) {
  RunConfig c;
  c.command = "alpha";
  c.n = 5;
  c.k = 1;
  c.omega_spec = "0.3";
  ResultEnvelope env = run(c);
  EXPECT_NEAR(env.payload["alpha2"].get<double>(), 10.0, 1e-10);
  EXPECT_EQ(env.config["seed"].get<u64>(), 1u);  // seed always echoed
}

TEST(Run, PnTrivialCase) {
  RunConfig c;
  c.command = "pn";
  c.n = 2;
  c.lambda = 0.0;
  c.omega_spec = "sqrt2m1";
  ResultEnvelope env = run(c);
  EXPECT_NEAR(env.payload["P"].get<double>(), 2.0, 1e-12);
  EXPECT_TRUE(env.warnings.empty());
}

TEST(Run, PnWarnsOnSmallGrid) {
  RunConfig c;
  c.command = "pn";
  c.n = 4;
  c.lambda = 0.5;
  c.omega_spec = "golden";
  c.nx = 5;
  c.ny = 7;
  ResultEnvelope env = run(c);
  ASSERT_EQ(env.warnings.size(), 1u);
}

TEST(Run, WeylSecondMoment) {
  RunConfig c;
  c.command = "weyl-moments";
  c.cmd = "second";
  c.n = 5;
  ResultEnvelope env = run(c);
  EXPECT_NEAR(env.payload["value"].get<double>(), 10.0, 1e-9);
}

TEST(Run, GoodsetRefusesRationalFrequency) {
  RunConfig c;
  c.command = "goodset";
  c.n = 64;
  c.threshold = 0.01;
  c.omega_spec = "1/3";
  EXPECT_THROW(run(c), UsageError);
}

TEST(Run, GoodsetMembership) {
  RunConfig c;
  c.command = "goodset";
  c.n = 64;
  c.threshold = 0.0;
  c.omega_spec = "0.377214";
  ResultEnvelope env = run(c);
  EXPECT_TRUE(env.payload["member"].get<bool>());
}

TEST(Run, UnknownCommand) {
  RunConfig c;
  c.command = "nope";
  EXPECT_THROW(run(c), UsageError);
}

TEST(Emit, JsonRoundTrips) {
  RunConfig c;
  c.command = "amo";
  c.n = 4;
  c.k = 1;
  c.omega_spec = "1/4";
  c.method = "closed";
  ResultEnvelope env = run(c);
  const std::string text = emit(env, "json");
  ordered_json parsed = ordered_json::parse(text);
  EXPECT_EQ(parsed["payload"], env.payload);
  EXPECT_EQ(parsed["config"], env.config);
  EXPECT_EQ(parsed["version"].get<std::string>(), kVersion);
}

TEST(Emit, CurlicueCsvFirstRow) {
  RunConfig c;
  c.command = "curlicue";
  c.n = 3;
  c.omega_spec = "0.3";
  c.format = "csv";
  const std::string text = emit(run(c), "csv");
  EXPECT_EQ(text.rfind("t,re,im\n0.0,0.0,0.0\n", 0), 0u);
}

TEST(Emit, KeyValueCsv) {
  RunConfig c;
  c.command = "weyl-moments";
  c.cmd = "zn";
  c.n = 2;
  c.omega_spec = "0.9";
  const std::string text = emit(run(c), "csv");
  EXPECT_EQ(text.rfind("key,value\nvalue,1.0\n", 0), 0u);
}

TEST(Envelope, PayloadBytesReproducible) {
  RunConfig c;
  c.command = "lyapunov";
  c.lambda = 1.3;
  c.omega_spec = "golden";
  c.n = 200;
  c.samples = 64;
  c.seed = 9;
  const std::string a = run(c).deterministic_bytes();
  const std::string b = run(c).deterministic_bytes();
  EXPECT_EQ(a, b);
}

TEST(Envelope, PayloadBytesThreadInvariant) {
  RunConfig c;
  c.command = "pn";
  c.n = 5;
  c.lambda = 1.1;
  c.omega_spec = "0.123456";
  const int saved = thread_override();
  thread_override() = 1;
  const std::string one = run(c).deterministic_bytes();
  thread_override() = 8;
  const std::string eight = run(c).deterministic_bytes();
  thread_override() = saved;
  EXPECT_EQ(one, eight);
}

TEST(Run, FjkContextMode) {
  RunConfig c;
  c.command = "fjk";
  c.mode = "context";
  c.omega_spec = "0.20710678118654752";  // (sqrt(2)-1)/2
  c.pq_p = 2;
  c.pq_q = 5;
  c.m = 10;
  ResultEnvelope env = run(c);
  EXPECT_NEAR(env.payload["xi"].get<double>(), 0.0710678, 1e-6);
  EXPECT_DOUBLE_EQ(env.payload["A"].get<double>(), -1.0);
  EXPECT_GT(env.payload["t_abs"].get<double>(), 0.0);
}

TEST(Run, AlphaMethodVariants) {
  RunConfig c;
  c.command = "alpha";
  c.n = 2;
  c.omega_spec = "0";
  c.method = "oracle";
  ResultEnvelope oracle = run(c);
  ASSERT_EQ(oracle.payload["coeffs"].size(), 3u);
  EXPECT_NEAR(oracle.payload["coeffs"][1].get<double>(), 4.0, 1e-10);

  c.method = "top";
  c.n = 3;
  c.omega_spec = "sqrt2m1";
  EXPECT_TRUE(run(c).payload["bound_ok"].get<bool>());

  c.method = "omega-avg";
  c.n = 5;
  EXPECT_DOUBLE_EQ(run(c).payload["omega_avg_alpha4"].get<double>(), 24.0);

  c.method = "beta";
  c.n = 2;
  c.k = 1;
  c.x = 0.0;
  c.y = 0.0;
  c.omega_spec = "0";
  EXPECT_NEAR(run(c).payload["beta2"].get<double>(), 0.0, 1e-12);

  c.method = "nope";
  EXPECT_THROW(run(c), UsageError);
}

TEST(Run, WeylHlStep) {
  RunConfig c;
  c.command = "weyl-moments";
  c.cmd = "hl";
  c.m = 100;
  c.omega_spec = "0.3";
  c.xi = 0.0;
  ResultEnvelope env = run(c);
  EXPECT_EQ(env.payload["m_next"].get<i64>(), 60);
  EXPECT_GT(env.payload["error_budget"].get<double>(), 0.0);
}

TEST(Run, CjvhSmall) {
  RunConfig c;
  c.command = "cjvh";
  c.m_list = {1000};
  c.samples = 100;
  c.seed = 3;
  ResultEnvelope env = run(c);
  const double cj = env.payload["c_jvh"].get<double>();
  EXPECT_GT(cj, 0.0);
  EXPECT_LE(cj, 1.0);
  const double c1 = env.payload["c1"].get<double>();
  EXPECT_NEAR(env.payload["c0"].get<double>(), c1 * c1 / 16.0, 1e-15);
  EXPECT_NEAR(env.payload["delta"].get<double>(), c1 * c1 / 2.0, 1e-15);
}
