#ifndef PGV_ERRORS_HPP
#define PGV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pgv {

/// Precondition violations on public operations.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the noise has zero amplitude on a mode that the low-mode
/// control needs to invert.
class H0Degenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a trajectory leaves the finite range; carries the time and
/// norms at detection.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(double time, double norm_h, double norm_v)
      : std::runtime_error(message(time, norm_h, norm_v)),
        time_(time),
        norm_h_(norm_h),
        norm_v_(norm_v) {}

  double time() const { return time_; }
  double norm_h() const { return norm_h_; }
  double norm_v() const { return norm_v_; }

 private:
  static std::string message(double t, double nh, double nv) {
    return "blow-up at t=" + std::to_string(t) + " (|T|=" + std::to_string(nh) +
           ", ||T||=" + std::to_string(nv) + ")";
  }
  double time_;
  double norm_h_;
  double norm_v_;
};

/// Schema violation while reading a run configuration. `path` names the
/// offending field, e.g. "integrator.dt".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Failure to read or write run artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pgv

#endif  // PGV_ERRORS_HPP
