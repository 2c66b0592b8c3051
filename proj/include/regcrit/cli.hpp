#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regcrit/criteria.hpp"

namespace regcrit {

enum ExitCode : int {
  exit_success = 0,
  exit_usage = 1,
  exit_blowup = 2,
  exit_verification_failed = 3,
};

/// Index of a run directory. Paths are stored relative to the directory.
struct RunManifest {
  std::filesystem::path config;
  std::filesystem::path output_dir;
  std::filesystem::path csv;
  std::vector<std::filesystem::path> snapshots;
  std::optional<std::filesystem::path> calibration;
  std::string calibration_p;
  double c_gn = 0.0;
  double c_cal = 0.0;
  std::string corpus;
  int exit_status = 0;

  std::string to_text() const;
  static RunManifest parse(const std::string& text, const std::string& source = "<text>");
};

inline constexpr const char* kManifestName = "manifest.txt";
inline constexpr const char* kCsvName = "monitors.csv";
inline constexpr const char* kConfigCopyName = "config.txt";
inline constexpr const char* kCalibrationName = "calibration.txt";
inline constexpr const char* kVerificationName = "verification.txt";

// Monitor CSV.
std::vector<std::string> csv_columns(std::span<const SerrinPair> pairs);
std::string csv_header(std::span<const SerrinPair> pairs);
std::string csv_row(const MonitorSample& sample);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws Error when the column is absent.
  std::size_t index_of(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text, const std::string& source = "<text>");
CsvTable read_csv(const std::filesystem::path& path);

struct VerificationCheck {
  std::string name;
  bool passed = true;
  double worst_margin = 0.0;  ///< smallest (allowed - observed); negative on failure
  std::size_t evaluated = 0;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  bool all_passed() const;
  std::string to_text() const;
};

/// Throws Error when an artifact is missing or unreadable.
VerificationReport verify_run(const std::filesystem::path& run_dir);

int cmd_simulate(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_calibrate(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
int cmd_verify(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

}  // namespace regcrit
