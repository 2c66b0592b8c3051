#include "regcrit/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "regcrit/errors.hpp"

namespace regcrit {
namespace {

namespace fs = std::filesystem;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "grid.n",          "grid.length",         "fluid.mu",           "time.dt",
      "time.t_end",      "init.kind",           "init.amplitude",     "init.seed",
      "init.slope",      "monitors.pairs",      "monitors.stride",    "monitors.enable",
      "monitors.linf_oversample", "snapshots.stride", "output.dir",   "calibration.record",
      "calibration.seeds", "calibration.n",     "calibration.slope",  "calibration.amplitude",
      "calibration.length", "calibration.p",    "calibration.output",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

// Typed accessors that turn parse failures into ConfigError with location.
class Reader {
 public:
  explicit Reader(const KeyValueFile& file) : file_(file) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const int line = file_.line_of(key);
    std::string where = file_.source();
    if (line > 0) where += ":" + std::to_string(line);
    throw ConfigError(where + ": key '" + key + "': " + message, key, line);
  }

  std::optional<std::string> text(const std::string& key) const { return file_.get(key); }

  std::string required_text(const std::string& key) const {
    auto v = file_.get(key);
    if (!v || v->empty()) fail(key, "missing required key");
    return *v;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    auto v = file_.get(key);
    if (!v) {
      if (fallback) return *fallback;
      fail(key, "missing required key");
    }
    std::size_t used = 0;
    double out = 0.0;
    try {
      out = std::stod(*v, &used);
    } catch (const std::exception&) {
      fail(key, "expected a number, got '" + *v + "'");
    }
    if (used != v->size() || !std::isfinite(out)) fail(key, "expected a number, got '" + *v + "'");
    return out;
  }

  long integer(const std::string& key, std::optional<long> fallback = std::nullopt) const {
    auto v = file_.get(key);
    if (!v) {
      if (fallback) return *fallback;
      fail(key, "missing required key");
    }
    std::size_t used = 0;
    long out = 0;
    try {
      out = std::stol(*v, &used);
    } catch (const std::exception&) {
      fail(key, "expected an integer, got '" + *v + "'");
    }
    if (used != v->size()) fail(key, "expected an integer, got '" + *v + "'");
    return out;
  }

  template <typename Fn>
  auto guarded(const std::string& key, Fn&& fn) const -> decltype(fn()) {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(key, e.what());
    }
  }

 private:
  const KeyValueFile& file_;
};

void reject_unknown_and_duplicate(const KeyValueFile& file) {
  std::set<std::string> seen;
  for (const auto& e : file.entries()) {
    const std::string where = file.source() + ":" + std::to_string(e.line);
    if (!known_keys().contains(e.key)) {
      throw ConfigError(where + ": unknown key '" + e.key + "'", e.key, e.line);
    }
    if (!seen.insert(e.key).second) {
      throw ConfigError(where + ": duplicate key '" + e.key + "'", e.key, e.line);
    }
  }
}

CorpusSpec read_corpus(const Reader& r, int default_n, double default_length) {
  CorpusSpec c;
  c.n = static_cast<int>(r.integer("calibration.n", default_n));
  c.length = r.number("calibration.length", default_length);
  c.spectrum_slope = r.number("calibration.slope", -2.0);
  c.amplitude = r.number("calibration.amplitude", 1.0);
  c.seeds_text = r.text("calibration.seeds").value_or("0-99");
  c.seeds = r.guarded("calibration.seeds", [&] { return parse_seed_list(c.seeds_text); });
  if (c.seeds.empty()) r.fail("calibration.seeds", "empty corpus");
  r.guarded("calibration.n", [&] { return Grid(c.n, c.length); });
  return c;
}

}  // namespace

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

// ---------------------------------------------------------------------------
// KeyValueFile

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& source) {
  KeyValueFile file;
  file.source_ = source;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'", {}, line);
    }
    Entry e{trim(content.substr(0, eq)), trim(content.substr(eq + 1)), line};
    if (e.key.empty()) {
      throw ConfigError(source + ":" + std::to_string(line) + ": empty key", {}, line);
    }
    file.entries_.push_back(std::move(e));
  }
  return file;
}

KeyValueFile KeyValueFile::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return it->value;
  }
  return std::nullopt;
}

std::vector<std::string> KeyValueFile::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(e.value);
  }
  return out;
}

int KeyValueFile::line_of(const std::string& key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return it->line;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Corpus

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : split(text, ',')) {
    const auto dash = part.find('-', 1);
    try {
      std::size_t used = 0;
      if (dash == std::string::npos) {
        const auto v = std::stoull(part, &used);
        if (used != part.size() || part.front() == '-') throw InvalidArgument("bad seed");
        seeds.push_back(v);
      } else {
        const std::string lo_text = trim(part.substr(0, dash));
        const std::string hi_text = trim(part.substr(dash + 1));
        const auto lo = std::stoull(lo_text, &used);
        if (used != lo_text.size()) throw InvalidArgument("bad seed");
        const auto hi = std::stoull(hi_text, &used);
        if (used != hi_text.size() || hi < lo) throw InvalidArgument("bad seed");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::exception&) {
      throw InvalidArgument("cannot parse seed list entry '" + part + "'");
    }
  }
  return seeds;
}

std::string CorpusSpec::describe() const {
  return "random_divfree n=" + std::to_string(n) + " length=" + format_double(length) +
         " slope=" + format_double(spectrum_slope) + " amplitude=" + format_double(amplitude) +
         " seeds=" + seeds_text;
}

std::vector<SpectralVelocityField> build_corpus(const CorpusSpec& spec) {
  const Grid grid(spec.n, spec.length);
  std::vector<SpectralVelocityField> corpus;
  corpus.reserve(spec.seeds.size());
  for (auto seed : spec.seeds) {
    corpus.push_back(init_random_divfree(grid, seed, spec.spectrum_slope, spec.amplitude));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Simulation and calibration configs

SimulationConfig parse_simulation_config(const KeyValueFile& file) {
  reject_unknown_and_duplicate(file);
  const Reader r(file);
  const int n = static_cast<int>(r.integer("grid.n"));
  const double length = r.number("grid.length", 2.0 * std::numbers::pi);
  const Grid grid = r.guarded("grid.n", [&] { return Grid(n, length); });

  InitSpec init;
  init.kind = r.guarded("init.kind", [&] { return parse_init_kind(r.required_text("init.kind")); });
  init.amplitude = r.number("init.amplitude", 1.0);
  const long seed = r.integer("init.seed", 0);
  if (seed < 0) r.fail("init.seed", "seed must be non-negative");
  init.seed = static_cast<std::uint64_t>(seed);
  init.spectrum_slope = r.number("init.slope", -2.0);

  const double mu = r.number("fluid.mu");
  const double dt = r.number("time.dt");
  const double t_end = r.number("time.t_end");
  const long monitor_stride = r.integer("monitors.stride", 1);
  const long snapshot_stride = r.integer("snapshots.stride", 100);

  auto solver = [&] {
    try {
      return SolverConfig(grid, mu, dt, t_end, init, static_cast<int>(monitor_stride),
                          static_cast<int>(snapshot_stride));
    } catch (const ConfigError& e) {
      r.fail(e.key(), e.what());
    }
  }();

  CriterionConfig monitors;
  monitors.mu = mu;
  const std::string pairs_text = r.text("monitors.pairs").value_or("6:4");
  for (const auto& item : split(pairs_text, ',')) {
    monitors.pairs.push_back(r.guarded("monitors.pairs", [&] { return SerrinPair::parse(item); }));
  }
  if (auto enable = r.text("monitors.enable")) {
    monitors.serrin = monitors.log_serrin = monitors.bkm = monitors.chan_vasseur = false;
    monitors.identity = monitors.gronwall = false;
    for (const auto& name : split(*enable, ',')) {
      if (name == "serrin") monitors.serrin = true;
      else if (name == "log_serrin") monitors.log_serrin = true;
      else if (name == "bkm") monitors.bkm = true;
      else if (name == "chan_vasseur") monitors.chan_vasseur = true;
      else if (name == "identity") monitors.identity = true;
      else if (name == "gronwall") monitors.gronwall = true;
      else r.fail("monitors.enable", "unknown monitor '" + name + "'");
    }
  }
  monitors.linf_oversample = static_cast<int>(r.integer("monitors.linf_oversample", 1));
  if (monitors.linf_oversample < 1) r.fail("monitors.linf_oversample", "must be >= 1");
  if ((monitors.serrin || monitors.log_serrin || monitors.gronwall) && monitors.pairs.empty()) {
    r.fail("monitors.pairs", "at least one Serrin pair is required");
  }

  std::optional<fs::path> record;
  if (auto v = r.text("calibration.record")) record = fs::path(*v);

  return SimulationConfig{solver, monitors, fs::path(r.required_text("output.dir")), record,
                          read_corpus(r, n, length)};
}

SimulationConfig load_simulation_config(const fs::path& path) {
  return parse_simulation_config(KeyValueFile::load(path));
}

CalibrationConfig parse_calibration_config(const KeyValueFile& file) {
  reject_unknown_and_duplicate(file);
  const Reader r(file);
  CalibrationConfig c;
  c.mu = r.number("fluid.mu");
  if (!(c.mu > 0.0)) r.fail("fluid.mu", "mu must be positive");
  const int default_n = static_cast<int>(r.integer("grid.n", 32));
  const double default_length = r.number("grid.length", 2.0 * std::numbers::pi);
  c.corpus = read_corpus(r, default_n, default_length);
  for (const auto& item : split(r.text("calibration.p").value_or("6"), ',')) {
    const auto p = r.guarded("calibration.p", [&] { return LebesgueExponent::parse(item); });
    if (!p.is_infinite() && !(p.value() > 3.0)) r.fail("calibration.p", "requires 3 < p <= inf");
    c.exponents.push_back(p);
  }
  if (c.exponents.empty()) r.fail("calibration.p", "no exponent given");
  if (auto out = r.text("calibration.output")) {
    c.output = *out;
  } else if (auto dir = r.text("output.dir")) {
    c.output = fs::path(*dir) / "calibration.txt";
  } else {
    r.fail("calibration.output", "missing; set calibration.output or output.dir");
  }
  return c;
}

CalibrationConfig load_calibration_config(const fs::path& path) {
  return parse_calibration_config(KeyValueFile::load(path));
}

// ---------------------------------------------------------------------------
// Calibration record

const Calibration* CalibrationRecord::find(LebesgueExponent p) const {
  for (const auto& e : entries) {
    if (e.p == p) return &e;
  }
  return nullptr;
}

std::string CalibrationRecord::to_text() const {
  std::ostringstream out;
  out << "# regcrit calibration record\n";
  out << "mu = " << format_double(mu) << "\n";
  out << "corpus.kind = random_divfree\n";
  out << "corpus.n = " << corpus.n << "\n";
  out << "corpus.length = " << format_double(corpus.length) << "\n";
  out << "corpus.slope = " << format_double(corpus.spectrum_slope) << "\n";
  out << "corpus.amplitude = " << format_double(corpus.amplitude) << "\n";
  out << "corpus.seeds = " << corpus.seeds_text << "\n";
  out << "corpus.size = " << corpus.seeds.size() << "\n";
  std::string labels;
  for (const auto& e : entries) labels += (labels.empty() ? "" : ",") + e.p.label();
  out << "p = " << labels << "\n";
  for (const auto& e : entries) {
    const std::string tag = e.p.label();
    out << "max_ratio." << tag << " = " << format_double(e.max_ratio) << "\n";
    out << "C_GN." << tag << " = " << format_double(e.c_gn) << "\n";
    out << "C_cal." << tag << " = " << format_double(e.c_cal) << "\n";
  }
  return out.str();
}

void CalibrationRecord::write(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write calibration record '" + path.string() + "'");
  out << to_text();
}

CalibrationRecord CalibrationRecord::read(const fs::path& path) {
  const auto file = KeyValueFile::load(path);
  const Reader r(file);
  CalibrationRecord rec;
  rec.mu = r.number("mu");
  rec.corpus.n = static_cast<int>(r.integer("corpus.n"));
  rec.corpus.length = r.number("corpus.length");
  rec.corpus.spectrum_slope = r.number("corpus.slope");
  rec.corpus.amplitude = r.number("corpus.amplitude");
  rec.corpus.seeds_text = r.required_text("corpus.seeds");
  rec.corpus.seeds = r.guarded("corpus.seeds", [&] { return parse_seed_list(rec.corpus.seeds_text); });
  for (const auto& label : split(r.required_text("p"), ',')) {
    Calibration c;
    c.p = r.guarded("p", [&] { return LebesgueExponent::parse(label); });
    c.mu = rec.mu;
    c.corpus_size = rec.corpus.seeds.size();
    c.max_ratio = r.number("max_ratio." + label);
    c.c_gn = r.number("C_GN." + label);
    c.c_cal = r.number("C_cal." + label);
    rec.entries.push_back(c);
  }
  return rec;
}

CalibrationRecord calibrate(const CalibrationConfig& config) {
  CalibrationRecord rec;
  rec.mu = config.mu;
  rec.corpus = config.corpus;
  const auto corpus = build_corpus(config.corpus);
  for (const auto& p : config.exponents) {
    rec.entries.push_back(calibrate_constants(corpus, p, config.mu));
  }
  return rec;
}

}  // namespace regcrit
