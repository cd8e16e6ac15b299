#pragma once

#include <stdexcept>
#include <string>

namespace deltaion {

/// Thrown when an argument lies outside the domain of an operation.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed (quadrature, root polishing, singular rate).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what, double estimate = 0.0)
      : std::runtime_error(what), estimate_(estimate) {}

  /// Best value reached before giving up, when one exists.
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// The Volterra solver's self-consistency probe failed.
class convergence_error : public numeric_error {
 public:
  convergence_error(const std::string& what, double deviation)
      : numeric_error(what, deviation) {}
};

/// Not enough data for an estimate, e.g. too few peaks for a period.
class insufficient_data_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

}  // namespace deltaion
