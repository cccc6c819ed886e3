#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "drivetherm/commands.hpp"
#include "drivetherm/io.hpp"
#include "drivetherm/spin_analytics.hpp"
#include "test_support.hpp"

using namespace drivetherm;

namespace {

const char* kMinimal = R"(model:
  H0: {qubit: {omega: 1.0}}
  V: sigma_x
  beta_star: 2.0
drive:
  lambda0: 0.1
  envelope: {type: gaussian, beta0: 3.0, s_beta: 1.0}
  temporal: {type: cosine, omega_d: 1.0}
grid:
  t_end: 6.0
)";

std::string with(const std::string& extra) { return std::string(kMinimal) + extra; }

int error_line(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_SUITE("cli-io") {

TEST_CASE("minimal config resolves its defaults") {
  const auto c = parse_config(kMinimal);
  CHECK(c.config.model.dim == 2);
  CHECK(c.config.grid.n_steps == TimeGrid::auto_steps(6.0, 1.0));
  CHECK(c.config.drive.lambda0 == 0.1);
  CHECK(c.resolved.count("grid.n_steps") == 1);
  CHECK(c.resolved.count("model.dim") == 1);
  CHECK_FALSE(c.config.scan);
  CHECK(c.config.tolerances.scale == 1.0);
}

TEST_CASE("automatic envelope width is the Cramer-Rao width") {
  std::string y = kMinimal;
  y.replace(y.find("s_beta: 1.0"), 11, "s_beta: auto");
  const auto c = parse_config(y);
  const auto& g = std::get<GaussianEnvelope>(c.config.drive.envelope);
  CHECK(g.s_beta == doctest::Approx(1.0 / std::sqrt(spin::qubit_equilibrium_qfi(1.0, 2.0))).epsilon(1e-14));
  CHECK(c.resolved.count("drive.envelope.s_beta") == 1);
}

TEST_CASE("errors name the offending line") {
  std::string bad = kMinimal;
  bad.replace(bad.find("lambda0: 0.1"), 12, "lambda0: abc");
  CHECK(error_line(bad) == 6);
  CHECK(error_line(with("bogus: 1\n")) == 11);
  std::string unknown = kMinimal;
  unknown.replace(unknown.find("V: sigma_x"), 10, "V: sigma_q");
  CHECK(error_line(unknown) == 3);
  CHECK(error_line("model: [\n") > 0);
  CHECK_THROWS_AS(parse_config("- 1\n- 2\n"), ConfigError);
  std::string skew = kMinimal;
  skew.replace(skew.find("V: sigma_x"), 10, "V: {dense: {re: [[0, 1], [1, 0]], im: [[0, 1], [1, 0]]}}");
  CHECK(error_line(skew) == 3);
  std::string neg = kMinimal;
  neg.replace(neg.find("t_end: 6.0"), 10, "t_end: -1");
  CHECK(error_line(neg) == 10);
}

TEST_CASE("dimension mismatches are rejected") {
  std::string y = kMinimal;
  y.replace(y.find("V: sigma_x"), 10, "V: {diagonal: [1, 2, 3]}");
  CHECK_THROWS_AS(parse_config(y), ConfigError);
  std::string d = kMinimal;
  d.replace(d.find("  V: sigma_x"), 12, "  dim: 3\n  V: sigma_x");
  CHECK_THROWS_AS(parse_config(d), ConfigError);
}

TEST_CASE("beta beyond the full-rank guard carries a remediation hint") {
  std::string y = kMinimal;
  y.replace(y.find("beta_star: 2.0"), 14, "beta_star: 60");
  try {
    parse_config(y);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("FullRankViolation") != std::string::npos);
    CHECK(msg.find("beta_max") != std::string::npos);
    CHECK(e.line() == 4);
  }
}

TEST_CASE("scan section") {
  const auto c = parse_config(with("scan:\n  axis: frequency\n  values: {start: 0.5, stop: 2.0, count: 4}\n"));
  REQUIRE(c.config.scan);
  CHECK(c.config.scan->values == std::vector<double>{0.5, 1.0, 1.5, 2.0});
  CHECK(std::get<ValueAtTime>(c.config.scan->reduce).t == 6.0);
  CHECK_THROWS_AS(parse_config(with("scan:\n  axis: frequency\n  values: []\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("scan:\n  axis: frequency\n  values: [1, 0.5]\n")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("scan:\n  axis: temperature\n  values: [1, 70]\n")), ConfigError);
  const auto mx = parse_config(with("scan:\n  axis: time\n  values: [1, 2]\n  reduce: {max_over_t: 3}\n"));
  CHECK(std::get<MaxOverTime>(mx.config.scan->reduce).t_window == 3.0);
}

TEST_CASE("operator forms") {
  CHECK((build_operator(QubitSpec{2.0}).matrix() - pauli::z().matrix()).norm() == 0.0);
  CHECK((build_operator(PauliSpec{'y', 0.5}).matrix() - 0.5 * pauli::y().matrix()).norm() == 0.0);
  CHECK(operator_dim(DiagonalSpec{{1, 2, 3}}) == 3);
  DenseSpec d;
  d.re = {{1, 0}, {0, -1}};
  d.im = {{0, 1}, {-1, 0}};
  const auto op = build_operator(d);
  CHECK(op.matrix()(0, 1) == Complex(0, 1));
  d.im = {{0, 1}, {1, 0}};
  CHECK_THROWS(build_operator(d));
}

TEST_CASE("tolerance scale") {
  const auto c = parse_config(kMinimal, 10.0);
  CHECK(c.config.tolerances.scale == 10.0);
  CHECK(c.config.tolerances.rel_disagreement == doctest::Approx(1e-5));
  CHECK_THROWS_AS(parse_config(kMinimal, 0.0), ConfigError);
  {
    support::EnvGuard g("DRIVETHERM_TOLERANCE_SCALE", "2.5");
    CHECK(tolerance_scale_from_env() == 2.5);
  }
  {
    support::EnvGuard g("DRIVETHERM_TOLERANCE_SCALE", "junk");
    CHECK_THROWS_AS(tolerance_scale_from_env(), ConfigError);
  }
  {
    support::EnvGuard g("DRIVETHERM_TOLERANCE_SCALE", "-1");
    CHECK_THROWS_AS(tolerance_scale_from_env(), ConfigError);
  }
}

TEST_CASE("json snapshot round trip") {
  for (const char* name : {"fig2a.yaml", "fig2b.yaml", "fig2c.yaml", "fig3_beta0_5.yaml", "fig3_beta0_10.yaml",
                           "frequency_scan.yaml"}) {
    CAPTURE(name);
    const auto c = load_config(support::config_dir() / name);
    CHECK(config_from_json(to_json(c.config)) == c.config);
    CHECK(to_json(config_from_json(to_json(c.config))) == to_json(c.config));
  }
  CHECK(config_from_json(to_json(default_config())) == default_config());
}

TEST_CASE("doubles are written with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("simulate writes a CSV that references its manifest") {
  const auto dir = support::scratch("simulate");
  const auto c = load_config(support::config_dir() / "fig2b.yaml");
  CommandOptions o;
  const auto out = cmd_simulate(c, dir, o);
  CHECK(out.failed_checks.empty());
  const auto csv = read_csv(dir / "results.csv");
  CHECK(csv.columns == result_columns());
  CHECK(csv.columns == std::vector<std::string>{"t", "F_eq", "I_t", "F_total", "F_spectral", "rel_disagreement", "crb_sigma"});
  CHECK(csv.manifest_hash == sha256_hex(read_text(dir / "manifest.json")));
  CHECK(csv.manifest_hash == out.manifest_hash);
  REQUIRE(csv.rows.size() == *c.config.grid.n_steps + 1);
  CHECK(csv.rows.back()[5] <= 1e-6);
  for (const auto& r : csv.rows) CHECK(r[3] == r[1] + r[2]);

  // the manifest rebuilds the resolved configuration exactly
  CHECK(config_from_manifest(dir / "manifest.json") == c.config);
  const auto m = nlohmann::json::parse(read_text(dir / "manifest.json"));
  CHECK(m["version"] == kArtifactVersion);
  CHECK(m["command"] == "simulate");
  CHECK(m.contains("resolved_defaults"));
  CHECK(m["wall_clock"].contains("elapsed_seconds"));
  CHECK(m["diagnostics"]["dual_path"]["passed"] == true);
}

TEST_CASE("simulate edge cases") {
  const auto dir = support::scratch("edges");
  {
    std::string y = kMinimal;
    y.replace(y.find("t_end: 6.0"), 10, "t_end: 0");
    const auto out = cmd_simulate(parse_config(y), dir);
    const auto csv = read_csv(out.data.front());
    REQUIRE(csv.rows.size() == 1);
    CHECK(csv.rows[0][0] == 0.0);
    CHECK(csv.rows[0][3] == csv.rows[0][1]);
  }
  {
    std::string y = kMinimal;
    y.replace(y.find("lambda0: 0.1"), 12, "lambda0: 0");
    const auto csv = read_csv(cmd_simulate(parse_config(y), dir).data.front());
    for (const auto& r : csv.rows) {
      CHECK(r[2] == 0.0);
      CHECK(r[3] == r[1]);
    }
  }
  {
    const auto c = parse_config(with("output:\n  kernel: kernel.csv\n"));
    const auto out = cmd_simulate(c, dir);
    CHECK(out.data.size() == 2);
    const auto k = read_csv(dir / "kernel.csv");
    CHECK(k.rows.size() == *c.config.grid.n_steps + 1);
    CHECK(k.manifest_hash == out.manifest_hash);
  }
  CHECK_THROWS_AS(cmd_simulate(parse_config(with("scan:\n  axis: time\n  values: [1]\n")), dir), ConfigError);
}

TEST_CASE("scan writes a deterministic table") {
  const auto a = support::scratch("scan_a");
  const auto b = support::scratch("scan_b");
  const auto c = parse_config(with("scan:\n  axis: frequency\n  values: [0.5, 1.0, 2.0]\n"));
  CommandOptions seq, par;
  seq.parallelism = 1;
  par.parallelism = 3;
  const auto ra = cmd_scan(c, a, seq);
  const auto rb = cmd_scan(c, b, par);
  const auto ta = read_csv(ra.data.front());
  const auto tb = read_csv(rb.data.front());
  CHECK(ta.columns == scan_columns());
  CHECK(ta.rows == tb.rows);
  REQUIRE(ta.rows.size() == 3);
  const auto m = nlohmann::json::parse(read_text(ra.manifest));
  CHECK(m["scan"]["argmax"] == 1.0);
  CHECK(ta.manifest_hash == sha256_hex(read_text(ra.manifest)));
  CHECK(config_from_manifest(ra.manifest) == c.config);
}

TEST_CASE("temperature scan with a beta-independent envelope") {
  const auto dir = support::scratch("scan_const");
  std::string y = kMinimal;
  y.replace(y.find("{type: gaussian, beta0: 3.0, s_beta: 1.0}"), 41, "{type: constant}");
  y += "scan:\n  axis: temperature\n  values: [0.5, 1, 2, 4]\n";
  const auto t = read_csv(cmd_scan(parse_config(y), dir).data.front());
  for (const auto& r : t.rows) CHECK(r[4] == r[2]);
}

TEST_CASE("csv parser rejects malformed input") {
  CHECK_THROWS(parse_csv("t,F\n1,2\n"));
  CHECK_THROWS(parse_csv("# manifest-sha256: ab\nt,F\n1\n"));
  const auto ok = parse_csv("# manifest-sha256: ab\nt,F\n1,2\n");
  CHECK(ok.manifest_hash == "ab");
  CHECK(ok.rows == std::vector<std::vector<double>>{{1, 2}});
}

}
