#include "regcrit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "regcrit/config.hpp"
#include "regcrit/errors.hpp"
#include "regcrit/run.hpp"
#include "regcrit/snapshot.hpp"

namespace regcrit {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string csv_value(double v) { return std::isnan(v) ? std::string("nan") : format_double(v); }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

// Streams samples and snapshots into the run directory as they arrive.
class DirectorySink : public RunSink {
 public:
  DirectorySink(const fs::path& dir, std::span<const SerrinPair> pairs)
      : dir_(dir), csv_(dir / kCsvName, std::ios::binary) {
    if (!csv_) throw Error("cannot write '" + (dir / kCsvName).string() + "'");
    csv_ << csv_header(pairs) << '\n' << std::flush;
  }

  void on_sample(const MonitorSeries& series) override {
    csv_ << csv_row(series.samples.back()) << '\n' << std::flush;
  }

  void on_snapshot(const SolverState& state) override {
    const fs::path rel = fs::path("snapshots") / snapshot_name(state.step_index);
    write_snapshot(dir_ / rel, fft_inverse(state.u_hat), state.t);
    snapshots_.push_back(rel);
  }

  const std::vector<fs::path>& snapshots() const { return snapshots_; }

 private:
  fs::path dir_;
  std::ofstream csv_;
  std::vector<fs::path> snapshots_;
};

SolverState state_from_snapshot(const fs::path& path) {
  const auto snap = read_snapshot(path);
  return SolverState{snap.time, fft_forward(snap.u), 0};
}

// Tracks the worst margin of one check across samples.
class CheckBuilder {
 public:
  explicit CheckBuilder(std::string name) { check_.name = std::move(name); }

  void observe(double allowed, double observed, const std::string& where) {
    const double margin = allowed - observed;
    const bool ok = observed <= allowed;
    if (check_.evaluated == 0 || margin < check_.worst_margin || std::isnan(margin)) {
      if (check_.evaluated == 0 || !std::isnan(check_.worst_margin)) {
        check_.worst_margin = margin;
        worst_where_ = where;
      }
    }
    if (!ok) {
      check_.passed = false;
      if (first_failure_.empty()) first_failure_ = where;
    }
    ++check_.evaluated;
  }

  void fail(const std::string& why) {
    check_.passed = false;
    if (first_failure_.empty()) first_failure_ = why;
  }

  VerificationCheck finish() {
    if (!first_failure_.empty()) {
      check_.detail = "first failure at " + first_failure_;
    } else if (check_.evaluated > 0) {
      check_.detail = "worst at " + worst_where_;
    } else {
      check_.detail = "nothing to evaluate";
    }
    return check_;
  }

 private:
  VerificationCheck check_;
  std::string worst_where_;
  std::string first_failure_;
};

std::string row_label(const std::vector<double>& t, std::size_t i) {
  return "t=" + format_double(t[i]);
}

struct RunArtifacts {
  RunManifest manifest;
  SimulationConfig config;
  CsvTable csv;
};

RunArtifacts load_run(const fs::path& run_dir) {
  const fs::path manifest_path = run_dir / kManifestName;
  if (!fs::is_regular_file(manifest_path)) {
    throw Error("missing " + manifest_path.string());
  }
  auto manifest = RunManifest::parse(read_text(manifest_path), manifest_path.string());
  std::vector<fs::path> required = {manifest.config, manifest.csv};
  required.insert(required.end(), manifest.snapshots.begin(), manifest.snapshots.end());
  if (manifest.calibration) required.push_back(*manifest.calibration);
  for (const auto& rel : required) {
    if (!fs::is_regular_file(run_dir / rel)) throw Error("missing artifact " + (run_dir / rel).string());
  }
  const fs::path config_path = run_dir / manifest.config;
  auto config = parse_simulation_config(KeyValueFile::parse(read_text(config_path), config_path.string()));
  auto csv = read_csv(run_dir / manifest.csv);
  if (csv.columns != csv_columns(config.monitors.pairs)) {
    throw Error((run_dir / manifest.csv).string() + ": columns do not match the run config");
  }
  if (manifest.calibration) config.monitors.c_cal = manifest.c_cal;
  return {std::move(manifest), std::move(config), std::move(csv)};
}

double trapezoid(double t0, double f0, double t1, double f1) { return 0.5 * (t1 - t0) * (f0 + f1); }

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

std::string RunManifest::to_text() const {
  std::ostringstream out;
  out << "# regcrit run manifest\n";
  out << "config = " << config.generic_string() << "\n";
  out << "output_dir = " << output_dir.generic_string() << "\n";
  out << "csv = " << csv.generic_string() << "\n";
  for (const auto& s : snapshots) out << "snapshot = " << s.generic_string() << "\n";
  if (calibration) {
    out << "calibration = " << calibration->generic_string() << "\n";
    out << "calibration.p = " << calibration_p << "\n";
    out << "calibration.C_GN = " << format_double(c_gn) << "\n";
    out << "calibration.C_cal = " << format_double(c_cal) << "\n";
    out << "calibration.corpus = " << corpus << "\n";
  }
  out << "exit_status = " << exit_status << "\n";
  return out.str();
}

RunManifest RunManifest::parse(const std::string& text, const std::string& source) {
  const auto file = KeyValueFile::parse(text, source);
  auto need = [&](const std::string& key) {
    auto v = file.get(key);
    if (!v) throw Error(source + ": manifest lacks '" + key + "'");
    return *v;
  };
  RunManifest m;
  m.config = need("config");
  m.output_dir = need("output_dir");
  m.csv = need("csv");
  for (const auto& s : file.get_all("snapshot")) m.snapshots.emplace_back(s);
  if (auto cal = file.get("calibration")) {
    m.calibration = fs::path(*cal);
    m.calibration_p = need("calibration.p");
    m.c_gn = std::strtod(need("calibration.C_GN").c_str(), nullptr);
    m.c_cal = std::strtod(need("calibration.C_cal").c_str(), nullptr);
    m.corpus = file.get("calibration.corpus").value_or("");
  }
  m.exit_status = std::atoi(need("exit_status").c_str());
  return m;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::string> csv_columns(std::span<const SerrinPair> pairs) {
  std::vector<std::string> cols = {"t", "energy"};
  for (const auto& pair : pairs) {
    cols.push_back("lp_" + pair.p().label());
    cols.push_back("serrin_" + pair.label());
    cols.push_back("log_serrin_" + pair.label());
  }
  for (const char* name : {"linf", "sobolev1", "sobolev2", "sobolev3", "bkm", "chan_vasseur",
                           "identity_residual", "gronwall_bound"}) {
    cols.emplace_back(name);
  }
  return cols;
}

std::string csv_header(std::span<const SerrinPair> pairs) {
  std::string out;
  for (const auto& c : csv_columns(pairs)) out += (out.empty() ? "" : ",") + c;
  return out;
}

std::string csv_row(const MonitorSample& s) {
  std::vector<double> values = {s.t, s.energy};
  for (const auto& ps : s.pairs) {
    values.push_back(ps.lp);
    values.push_back(ps.serrin);
    values.push_back(ps.log_serrin);
  }
  values.insert(values.end(), {s.linf, s.sobolev[1], s.sobolev[2], s.sobolev[3], s.bkm,
                               s.chan_vasseur, s.identity_residual, s.gronwall_bound});
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += csv_value(values[i]);
  }
  return out;
}

std::size_t CsvTable::index_of(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error("CSV has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto idx = index_of(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (table.columns.empty()) {
      table.columns = std::move(cells);
      continue;
    }
    if (cells.size() != table.columns.size()) {
      throw Error(source + ":" + std::to_string(line_no) + ": wrong number of fields");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') {
        throw Error(source + ":" + std::to_string(line_no) + ": bad number '" + c + "'");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw Error(source + ": empty CSV");
  return table;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text(path), path.string()); }

// ---------------------------------------------------------------------------
// Verification

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string VerificationReport::to_text() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << c.name << ' ' << (c.passed ? "PASS" : "FAIL") << " worst_margin="
        << csv_value(c.worst_margin) << " evaluated=" << c.evaluated << " (" << c.detail << ")\n";
  }
  out << "overall " << (all_passed() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

VerificationReport verify_run(const fs::path& run_dir) {
  const auto art = load_run(run_dir);
  const auto& cfg = art.config;
  const double mu = cfg.solver.mu();
  const auto t = art.csv.column("t");
  VerificationReport report;

  {
    // Energy law: E(t) - E(0) + 2 mu int ||grad u||^2 = 0, trapezoid over rows.
    CheckBuilder check("energy_law");
    const auto energy = art.csv.column("energy");
    const auto h1 = art.csv.column("sobolev1");
    if (!energy.empty()) {
      const double tol = 1e-5 * energy[0];
      double integral = 0.0;
      for (std::size_t i = 0; i < energy.size(); ++i) {
        if (i > 0) integral += trapezoid(t[i - 1], h1[i - 1] * h1[i - 1], t[i], h1[i] * h1[i]);
        check.observe(tol, std::abs(energy[i] - energy[0] + 2.0 * mu * integral), row_label(t, i));
      }
    }
    report.checks.push_back(check.finish());
  }

  std::vector<std::pair<fs::path, SolverState>> states;
  for (const auto& rel : art.manifest.snapshots) {
    states.emplace_back(rel, state_from_snapshot(run_dir / rel));
  }

  {
    CheckBuilder check("h2_identity");
    for (const auto& [rel, state] : states) {
      const auto id = h2_identity_residual(state.u_hat, mu);
      check.observe(1e-8 * (1.0 + std::abs(id.lhs)), id.residual, rel.generic_string());
    }
    report.checks.push_back(check.finish());
  }

  std::set<std::string> seen_p;
  for (const auto& pair : cfg.monitors.pairs) {
    if (!seen_p.insert(pair.p().label()).second) continue;
    CheckBuilder check("holder_p" + pair.p().label());
    for (const auto& [rel, state] : states) {
      const auto h = holder_check(state.u_hat, pair.p());
      check.observe(h.bound * (1.0 + 1e-10), h.actual, rel.generic_string());
    }
    report.checks.push_back(check.finish());
  }

  if (cfg.monitors.gronwall) {
    if (!art.manifest.calibration) throw Error("run enabled d2/gronwall but has no calibration record");
    CriterionConfig monitors = cfg.monitors;
    monitors.identity = true;
    const SerrinPair pair = monitors.gronwall_pair();
    {
      CheckBuilder check("d2");
      for (const auto& [rel, state] : states) {
        const auto sample = evaluate_sample(state, monitors);
        const auto d2 = d2_check(sample, pair, monitors.c_cal, mu);
        check.observe(d2.rhs, d2.lhs, rel.generic_string());
      }
      report.checks.push_back(check.finish());
    }
    {
      // Rebuilds the bound from the CSV norms and compares it with the
      // recorded column as well as with the measured quantity.
      CheckBuilder check("gronwall");
      GronwallTracker tracker(pair, monitors.c_cal);
      const auto lp = art.csv.column("lp_" + pair.p().label());
      const auto linf = art.csv.column("linf");
      const auto h2 = art.csv.column("sobolev2");
      const auto recorded = art.csv.column("gronwall_bound");
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto point = tracker.add(t[i], lp[i], linf[i], h2[i]);
        const bool same = point.bound == recorded[i] ||
                          std::abs(point.bound - recorded[i]) <= 1e-12 * std::abs(point.bound);
        if (!same) {
          check.fail("recorded gronwall_bound disagrees at " + row_label(t, i));
        }
        check.observe(point.bound, point.measured, row_label(t, i));
      }
      report.checks.push_back(check.finish());
    }
  }

  {
    // Remark 2: the (5,5) log-improved integrand never exceeds Chan-Vasseur's.
    CheckBuilder check("remark2");
    const SerrinPair five(LebesgueExponent(5.0), 5.0);
    for (const auto& [rel, state] : states) {
      const auto u = fft_inverse(state.u_hat);
      check.observe(chan_vasseur_integrand(u), log_serrin_integrand(u, five), rel.generic_string());
    }
    report.checks.push_back(check.finish());
  }

  {
    CheckBuilder check("divergence_free");
    for (const auto& [rel, state] : states) {
      const double kmax = 0.5 * state.u_hat.grid().n() * state.u_hat.grid().wavenumber_scale();
      const double tol = 1e-10 * kmax * max_abs(state.u_hat);
      check.observe(tol, max_divergence_coefficient(state.u_hat), rel.generic_string());
    }
    report.checks.push_back(check.finish());
  }
  return report;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

int simulate(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  SimulationConfig config = load_simulation_config(config_path);
  RunManifest manifest;
  manifest.config = kConfigCopyName;
  manifest.csv = kCsvName;
  manifest.output_dir = fs::absolute(config.output_dir).lexically_normal();

  const fs::path dir = config.output_dir;
  fs::create_directories(dir / "snapshots");
  write_text(dir / kConfigCopyName, read_text(config_path));

  if (config.monitors.gronwall) {
    const auto p = config.monitors.gronwall_pair().p();
    CalibrationRecord record;
    if (config.calibration_record) {
      fs::path rec_path = *config.calibration_record;
      if (rec_path.is_relative()) rec_path = config_path.parent_path() / rec_path;
      record = CalibrationRecord::read(rec_path);
      if (record.mu != config.solver.mu()) {
        throw ConfigError("calibration record mu " + format_double(record.mu) +
                              " differs from fluid.mu " + format_double(config.solver.mu()),
                          "calibration.record");
      }
      if (!record.find(p)) {
        throw ConfigError("calibration record has no entry for p = " + p.label(),
                          "calibration.record");
      }
    } else {
      CalibrationConfig cc;
      cc.mu = config.solver.mu();
      cc.corpus = config.corpus;
      cc.exponents = {p};
      record = calibrate(cc);
    }
    record.write(dir / kCalibrationName);
    const Calibration* entry = record.find(p);
    config.monitors.c_cal = entry->c_cal;
    manifest.calibration = fs::path(kCalibrationName);
    manifest.calibration_p = p.label();
    manifest.c_gn = entry->c_gn;
    manifest.c_cal = entry->c_cal;
    manifest.corpus = record.corpus.describe();
  }

  DirectorySink sink(dir, config.monitors.pairs);
  int status = exit_success;
  try {
    run(config.solver, config.monitors, &sink);
  } catch (const NumericalBlowup& blowup) {
    err << "numerical blowup at t = " << format_double(blowup.time()) << ": " << blowup.what()
        << "\n";
    status = exit_blowup;
  }
  manifest.snapshots = sink.snapshots();
  manifest.exit_status = status;
  write_text(dir / kManifestName, manifest.to_text());
  out << "wrote " << (dir / kManifestName).string() << "\n";
  return status;
}

int calibrate_command(const fs::path& config_path, std::ostream& out) {
  const auto config = load_calibration_config(config_path);
  const auto record = calibrate(config);
  record.write(config.output);
  for (const auto& e : record.entries) {
    out << "p = " << e.p.label() << "  C_GN = " << format_double(e.c_gn)
        << "  C_cal = " << format_double(e.c_cal) << "\n";
  }
  out << "wrote " << config.output.string() << "\n";
  return exit_success;
}

}  // namespace

int cmd_simulate(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  try {
    return simulate(config_path, out, err);
  } catch (const Error& e) {
    err << "simulate: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "simulate: " << e.what() << "\n";
  }
  return exit_usage;
}

int cmd_calibrate(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  try {
    return calibrate_command(config_path, out);
  } catch (const Error& e) {
    err << "calibrate: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "calibrate: " << e.what() << "\n";
  }
  return exit_usage;
}

int cmd_verify(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  VerificationReport report;
  try {
    report = verify_run(run_dir);
  } catch (const Error& e) {
    err << "verify: " << e.what() << "\n";
    return exit_usage;
  }
  const auto text = report.to_text();
  write_text(run_dir / kVerificationName, text);
  out << text;
  return report.all_passed() ? exit_success : exit_verification_failed;
}

int cmd_report(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  std::optional<RunArtifacts> art;
  try {
    art.emplace(load_run(run_dir));
  } catch (const Error& e) {
    err << "report: " << e.what() << "\n";
    return exit_usage;
  }
  const fs::path dir = run_dir / "report";
  fs::create_directories(dir);
  const auto& csv = art->csv;
  const auto t = csv.column("t");

  int series_files = 0;
  for (std::size_t c = 1; c < csv.columns.size(); ++c) {
    const bool enabled = std::any_of(csv.rows.begin(), csv.rows.end(),
                                     [&](const auto& r) { return !std::isnan(r[c]); });
    if (!enabled) continue;
    std::ostringstream series;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
      series << format_double(t[i]) << ' ' << csv_value(csv.rows[i][c]) << '\n';
    }
    write_text(dir / (csv.columns[c] + ".dat"), series.str());
    ++series_files;
  }

  std::ostringstream summary;
  summary << "# pair classical_integral log_integral ratio min_denominator\n";
  const auto linf = csv.column("linf");
  double min_den = std::numeric_limits<double>::infinity();
  for (double v : linf) min_den = std::min(min_den, log_denominator(v));
  for (const auto& pair : art->config.monitors.pairs) {
    const auto classical = csv.column("serrin_" + pair.label());
    const auto logv = csv.column("log_serrin_" + pair.label());
    double ic = 0.0;
    double il = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      ic += trapezoid(t[i - 1], classical[i - 1], t[i], classical[i]);
      il += trapezoid(t[i - 1], logv[i - 1], t[i], logv[i]);
    }
    summary << pair.label() << ' ' << csv_value(ic) << ' ' << csv_value(il) << ' '
            << csv_value(ic > 0.0 ? il / ic : kNaN) << ' ' << csv_value(min_den) << '\n';
  }
  write_text(dir / "summary.txt", summary.str());

  std::ostringstream pressure;
  pressure << "# t q_min q_max q_rms\n";
  for (const auto& rel : art->manifest.snapshots) {
    const auto state = state_from_snapshot(run_dir / rel);
    const auto q = fft_inverse(reconstruct_pressure(state.u_hat));
    const auto v = q.values();
    double lo = v.empty() ? 0.0 : v[0];
    double hi = lo;
    double sq = 0.0;
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      sq += x * x;
    }
    pressure << format_double(state.t) << ' ' << format_double(lo) << ' ' << format_double(hi)
             << ' ' << format_double(std::sqrt(sq / static_cast<double>(v.size()))) << '\n';
  }
  write_text(dir / "pressure.dat", pressure.str());
  out << "wrote " << series_files << " series files, summary.txt and pressure.dat to "
      << dir.string() << "\n";
  return exit_success;
}

}  // namespace regcrit
