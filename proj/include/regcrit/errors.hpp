#pragma once

#include <memory>
#include <stdexcept>
#include <string>

namespace regcrit {

struct MonitorSeries;

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Spectral input lacks the conjugate symmetry of a real field.
class NonHermitianInput : public Error {
 public:
  using Error::Error;
};

/// The field has a vanishing seminorm where a ratio needs it nonzero.
class DegenerateField : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class NonMonotoneTime : public Error {
 public:
  using Error::Error;
};

/// Invalid solver or monitor configuration. `key` names the offending entry
/// and `line` its 1-based line in a config file (0 when not file-backed).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::string key = {}, int line = 0)
      : Error(message), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

/// A coefficient became non-finite or the CFL bound was exceeded mid-run.
/// When raised from `run`, the samples recorded before the failure are
/// attached.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& message, double t)
      : Error(message), time_(t) {}
  NumericalBlowup(const NumericalBlowup& cause,
                  std::shared_ptr<const MonitorSeries> partial)
      : Error(cause.what()), time_(cause.time_), partial_(std::move(partial)) {}

  double time() const noexcept { return time_; }
  const std::shared_ptr<const MonitorSeries>& partial_series() const noexcept {
    return partial_;
  }

 private:
  double time_;
  std::shared_ptr<const MonitorSeries> partial_;
};

}  // namespace regcrit
