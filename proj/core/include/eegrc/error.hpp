#pragma once

#include <stdexcept>
#include <string>

namespace eegrc {

// Error categories map one-to-one onto CLI exit codes (see tools/eegrc.cpp).
enum class ErrorKind {
  kConfig,      // bad parameters or configuration, exit 2
  kData,        // malformed or degenerate input data, exit 3
  kLeakage,     // train/validation overlap, exit 4
  kMetric,      // metric undefined for the given input, exit 3
  kStructural,  // tensor shape mismatch, exit 3
  kTraining,    // non-finite gradient or similar, exit 3
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};
struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};
struct LeakageError : Error {
  explicit LeakageError(const std::string& what) : Error(ErrorKind::kLeakage, what) {}
};
struct MetricError : Error {
  explicit MetricError(const std::string& what) : Error(ErrorKind::kMetric, what) {}
};
struct StructuralError : Error {
  explicit StructuralError(const std::string& what)
      : Error(ErrorKind::kStructural, what) {}
};
struct TrainingError : Error {
  explicit TrainingError(const std::string& what) : Error(ErrorKind::kTraining, what) {}
};

}  // namespace eegrc
