#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "regcrit/cli.hpp"
#include "regcrit/config.hpp"
#include "regcrit/errors.hpp"
#include "regcrit/snapshot.hpp"

using namespace regcrit;
using namespace regcrit::testing;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"(# reference
grid.n = 16
fluid.mu = 0.1
time.dt = 0.01
time.t_end = 0.1
init.kind = taylor_green
monitors.pairs = 6:4, inf:2
output.dir = out
)";

SimulationConfig parse_sim(const std::string& text) {
  return parse_simulation_config(KeyValueFile::parse(text, "test.cfg"));
}

int config_error_line(const std::string& text) {
  try {
    parse_sim(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("key-value parsing keeps lines and strips comments") {
  const auto f = KeyValueFile::parse("a = 1\n\n# note\nb=two # trailing\n", "x");
  REQUIRE(f.entries().size() == 2);
  CHECK(f.get("a") == "1");
  CHECK(f.get("b") == "two");
  CHECK(f.line_of("b") == 4);
  CHECK_FALSE(f.get("c").has_value());
  CHECK_THROWS_AS(KeyValueFile::parse("just words\n"), ConfigError);
}

TEST_CASE("simulation config defaults") {
  const auto c = parse_sim(kBase);
  CHECK(c.solver.grid().n() == 16);
  CHECK(c.solver.grid().length() == 2.0 * std::numbers::pi);
  CHECK(c.solver.mu() == 0.1);
  CHECK(c.solver.step_count() == 10);
  CHECK(c.solver.monitor_stride() == 1);
  CHECK(c.solver.snapshot_stride() == 100);
  CHECK(c.solver.init().kind == InitKind::taylor_green);
  REQUIRE(c.monitors.pairs.size() == 2);
  CHECK(c.monitors.pairs[1].p().is_infinite());
  CHECK(c.monitors.gronwall);
  CHECK(c.output_dir == "out");
  CHECK_FALSE(c.calibration_record.has_value());
  CHECK(c.corpus.seeds.size() == 100);
  CHECK(c.corpus.n == 16);
}

TEST_CASE("config errors name the key and line") {
  CHECK(config_error_line(std::string(kBase) + "grid.m = 3\n") == 9);
  CHECK(config_error_line(std::string(kBase) + "fluid.mu = 0.2\n") == 9);
  CHECK(config_error_line(std::string(kBase) + "monitors.stride = many\n") == 9);
  CHECK(config_error_line(std::string(kBase) + "monitors.enable = serrin, vorticity\n") == 9);
  std::string dt_too_big = kBase;
  dt_too_big.replace(dt_too_big.find("time.dt = 0.01"), 14, "time.dt = 0.1");
  dt_too_big.replace(dt_too_big.find("grid.n = 16"), 11, "grid.n = 64");
  CHECK(config_error_line(dt_too_big) == 4);
  try {
    parse_sim(std::string(kBase) + "monitors.pairs = 2:4\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "monitors.pairs");
    CHECK(std::string(e.what()).find("test.cfg:9") != std::string::npos);
  }
  std::string missing = kBase;
  missing.replace(missing.find("fluid.mu = 0.1"), 14, "");
  CHECK_THROWS_AS(parse_sim(missing), ConfigError);
}

TEST_CASE("monitor enable list") {
  const auto c = parse_sim(std::string(kBase) + "monitors.enable = serrin, log_serrin\n");
  CHECK(c.monitors.serrin);
  CHECK(c.monitors.log_serrin);
  CHECK_FALSE(c.monitors.bkm);
  CHECK_FALSE(c.monitors.gronwall);
}

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("3") == std::vector<std::uint64_t>{3});
  CHECK(parse_seed_list("1,4,9-11") == std::vector<std::uint64_t>{1, 4, 9, 10, 11});
  CHECK(parse_seed_list("0-99").size() == 100);
  CHECK(parse_seed_list("").empty());
  CHECK_THROWS_AS(parse_seed_list("5-2"), InvalidArgument);
  CHECK_THROWS_AS(parse_seed_list("x"), InvalidArgument);
  CHECK_THROWS_AS(parse_sim(std::string(kBase) + "calibration.seeds = ,\n"), ConfigError);
}

TEST_CASE("calibration config") {
  const auto c = parse_calibration_config(KeyValueFile::parse(
      "fluid.mu = 0.1\ncalibration.p = 4, 6, inf\ncalibration.seeds = 0-3\ncalibration.n = 16\n"
      "output.dir = cal\n"));
  CHECK(c.exponents.size() == 3);
  CHECK(c.corpus.seeds.size() == 4);
  CHECK(c.corpus.n == 16);
  CHECK(c.output == fs::path("cal") / "calibration.txt");
  CHECK_THROWS_AS(parse_calibration_config(KeyValueFile::parse("fluid.mu = 0.1\ncalibration.p = 3\n"
                                                               "output.dir = x\n")),
                  ConfigError);
}

TEST_CASE("calibration record round trip") {
  CalibrationConfig config;
  config.mu = 0.1;
  config.corpus.n = 16;
  config.corpus.seeds = {0, 1, 2};
  config.corpus.seeds_text = "0-2";
  config.exponents = {LebesgueExponent(6.0), LebesgueExponent::infinity()};
  const auto record = calibrate(config);
  const fs::path path = fs::temp_directory_path() / "regcrit_test_record.txt";
  record.write(path);
  const auto back = CalibrationRecord::read(path);
  CHECK(back.to_text() == record.to_text());
  REQUIRE(back.find(LebesgueExponent::infinity()) != nullptr);
  CHECK(back.find(LebesgueExponent::infinity())->c_gn == 2.0);
  CHECK(back.find(LebesgueExponent(6.0))->c_cal == record.find(LebesgueExponent(6.0))->c_cal);
  CHECK(back.find(LebesgueExponent(4.0)) == nullptr);
  fs::remove(path);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("snapshot encoding") {
  const Grid g(4);
  const auto u = noise_field(g, 1);
  const auto bytes = encode_snapshot(u, 0.25);
  const std::string header = bytes.substr(0, bytes.find('\n'));
  CHECK(header == "{\"n\":4,\"length\":6.2831853071795862,\"time\":0.25,\"components\":\"u1,u2,u3\"}");
  CHECK(bytes.size() == header.size() + 1 + 3 * 64 * 8);

  // Little-endian, component-major, x fastest: the first payload value is u1 at the origin.
  const char* payload = bytes.data() + header.size() + 1;
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(payload[b]);
  double first = 0.0;
  std::memcpy(&first, &bits, sizeof first);
  CHECK(first == u.component(0)[0]);

  const auto snap = decode_snapshot(bytes);
  CHECK(snap.time == 0.25);
  CHECK(max_abs_diff(snap.u, u) == 0.0);

  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, bytes.size() - 8)), Error);
  CHECK_THROWS_AS(decode_snapshot("{\"n\":4}\n"), Error);
  CHECK(snapshot_name(100) == "snap_000100.bin");
}

TEST_CASE("golden CSV header") {
  const std::vector<SerrinPair> pairs = {SerrinPair::parse("6:4"), SerrinPair::parse("inf:2")};
  CHECK(csv_header(pairs) ==
        "t,energy,lp_6,serrin_6_4,log_serrin_6_4,lp_inf,serrin_inf_2,log_serrin_inf_2,"
        "linf,sobolev1,sobolev2,sobolev3,bkm,chan_vasseur,identity_residual,gronwall_bound");
}

TEST_CASE("CSV rows round trip through the parser") {
  MonitorSample s;
  s.t = 0.1;
  s.energy = 1.0 / 3.0;
  s.pairs = {PairSample{SerrinPair::parse("6:4"), 2.0, 16.0, std::nan("")}};
  s.linf = 1.5;
  s.sobolev = {0.0, 1.0, 2.0, 3.0};
  s.bkm = 4.0;
  s.chan_vasseur = 5.0;
  s.identity_residual = 1e-17;
  s.gronwall_bound = std::numeric_limits<double>::infinity();
  const std::vector<SerrinPair> pairs = {SerrinPair::parse("6:4")};
  const auto table = parse_csv(csv_header(pairs) + "\n" + csv_row(s) + "\n");
  REQUIRE(table.rows.size() == 1);
  CHECK(table.column("energy")[0] == s.energy);
  CHECK(std::isnan(table.column("log_serrin_6_4")[0]));
  CHECK(std::isinf(table.column("gronwall_bound")[0]));
  CHECK(csv_row(s).find(",nan,") != std::string::npos);
  CHECK_THROWS_AS(table.column("missing"), Error);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), Error);
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.config = "config.txt";
  m.output_dir = "/tmp/run";
  m.csv = "monitors.csv";
  m.snapshots = {"snapshots/snap_000000.bin", "snapshots/snap_000010.bin"};
  m.calibration = fs::path("calibration.txt");
  m.calibration_p = "6";
  m.c_gn = 0.25;
  m.c_cal = 1234.5;
  m.corpus = "random_divfree n=16";
  m.exit_status = 2;
  const auto back = RunManifest::parse(m.to_text());
  CHECK(back.to_text() == m.to_text());
  CHECK(back.snapshots.size() == 2);
  CHECK(back.c_cal == 1234.5);
  CHECK(back.exit_status == 2);
}

TEST_CASE("default corpus calibration (frozen regression)") {
  // Frozen at the first desk run: 100 seeds, n = 32, slope -2, unit amplitude, mu = 0.1.
  CalibrationConfig config;
  config.mu = 0.1;
  config.corpus.seeds = parse_seed_list("0-99");
  config.corpus.seeds_text = "0-99";
  config.exponents = {LebesgueExponent(6.0)};
  const auto record = calibrate(config);
  const auto* entry = record.find(LebesgueExponent(6.0));
  REQUIRE(entry != nullptr);
  CHECK(entry->c_gn == doctest::Approx(0.28404891236055579).epsilon(1e-12));
  CHECK(entry->c_cal == doctest::Approx(6865.8817846411648).epsilon(1e-10));
}
