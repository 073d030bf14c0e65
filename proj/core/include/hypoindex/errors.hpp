#pragma once

#include <stdexcept>
#include <string>

namespace hypoindex {

/// A zero of f where no derivative up to the configured cap exceeds tolerance.
struct FlatZeroDetected : std::runtime_error {
  double location;
  explicit FlatZeroDetected(double loc, const std::string& msg)
      : std::runtime_error(msg), location(loc) {}
};

/// An eigenvalue refinement stalled before reaching the requested tolerance.
struct ConvergenceFailure : std::runtime_error {
  double achieved;  // best discrepancy reached before giving up
  ConvergenceFailure(double got, const std::string& msg)
      : std::runtime_error(msg), achieved(got) {}
};

struct CurveThroughZero : std::runtime_error {
  double min_modulus;
  CurveThroughZero(double mm, const std::string& msg)
      : std::runtime_error(msg), min_modulus(mm) {}
};

struct NonConvergent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CertificateRequired : std::logic_error {
  using std::logic_error::logic_error;
};

struct RankAmbiguous : std::runtime_error {
  double singular_value;
  double threshold;
  RankAmbiguous(double sv, double thr, const std::string& msg)
      : std::runtime_error(msg), singular_value(sv), threshold(thr) {}
};

}  // namespace hypoindex
