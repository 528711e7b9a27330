#pragma once

#include <stdexcept>
#include <string>

namespace vns {

/// Input violates a documented precondition or type invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computed quantity failed an internal consistency check
/// (e.g. an expectation value with a large imaginary part).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The noise superoperator is too far from Hermitian for a spectral
/// decomposition to be meaningful.
class NonHermitianNoise : public std::runtime_error {
 public:
  NonHermitianNoise(double defect, double tolerance)
      : std::runtime_error("noise superoperator is not Hermitian: defect " +
                           std::to_string(defect) + " exceeds tolerance " +
                           std::to_string(tolerance)),
        defect_(defect) {}

  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

/// The closed-form VNS estimators are undefined because the measured
/// expectation values changed sign or grow with amplification.
class SignFlip : public std::runtime_error {
 public:
  explicit SignFlip(const std::string& what, std::string which = {})
      : std::runtime_error(which.empty() ? what : which + ": " + what),
        which_(std::move(which)) {}

  /// Which input series triggered the failure (empty when unambiguous).
  const std::string& which() const noexcept { return which_; }

 private:
  std::string which_;
};

/// A JSON document does not follow one of the versioned schemas.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vns
