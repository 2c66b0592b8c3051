#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "regcrit/criteria.hpp"
#include "regcrit/solver.hpp"

namespace regcrit {

/// Flat "key = value" text with '#' comments. Keys may repeat; `get`
/// returns the last occurrence.
class KeyValueFile {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  static KeyValueFile parse(const std::string& text, const std::string& source = "<text>");
  static KeyValueFile load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;
  int line_of(const std::string& key) const;
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::vector<Entry> entries_;
};

/// A reproducible set of random divergence-free fields.
struct CorpusSpec {
  int n = 32;
  double length = 2.0 * std::numbers::pi;
  double spectrum_slope = -2.0;
  double amplitude = 1.0;
  std::vector<std::uint64_t> seeds;
  std::string seeds_text;

  std::string describe() const;
};

/// "0-99", "3", "1,4,9-12".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

std::vector<SpectralVelocityField> build_corpus(const CorpusSpec& spec);

struct SimulationConfig {
  SolverConfig solver;
  CriterionConfig monitors;  ///< c_cal is filled in from calibration
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> calibration_record;
  CorpusSpec corpus;
};

struct CalibrationConfig {
  double mu = 0.0;
  CorpusSpec corpus;
  std::vector<LebesgueExponent> exponents;
  std::filesystem::path output;
};

/// Both loaders throw ConfigError naming the key and its line.
SimulationConfig load_simulation_config(const std::filesystem::path& path);
SimulationConfig parse_simulation_config(const KeyValueFile& file);
CalibrationConfig load_calibration_config(const std::filesystem::path& path);
CalibrationConfig parse_calibration_config(const KeyValueFile& file);

/// Key-value record written by `calibrate` and read back by `simulate` and
/// `verify`.
struct CalibrationRecord {
  double mu = 0.0;
  CorpusSpec corpus;
  std::vector<Calibration> entries;

  const Calibration* find(LebesgueExponent p) const;
  std::string to_text() const;
  void write(const std::filesystem::path& path) const;
  static CalibrationRecord read(const std::filesystem::path& path);
};

CalibrationRecord calibrate(const CalibrationConfig& config);

/// %.17g formatting: round-trip exact for doubles.
std::string format_double(double v);

}  // namespace regcrit
