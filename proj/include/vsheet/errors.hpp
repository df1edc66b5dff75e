#pragma once

#include <stdexcept>
#include <string>

namespace vsheet {

/// Raised when an argument lies outside the domain of an operation
/// (s <= 0, mu outside (1/2, 1), a point on the vortex sheet, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an integrand produces a non-finite value.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double abscissa)
      : std::runtime_error(what), abscissa_(abscissa) {}

  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

/// Raised when a Kaden velocity is requested too close to the spiral.
class PoleError : public DomainError {
 public:
  PoleError(const std::string& what, double nearest_parameter, double distance)
      : DomainError(what), nearest_parameter_(nearest_parameter), distance_(distance) {}

  double nearest_parameter() const noexcept { return nearest_parameter_; }
  double distance() const noexcept { return distance_; }

 private:
  double nearest_parameter_;
  double distance_;
};

}  // namespace vsheet
