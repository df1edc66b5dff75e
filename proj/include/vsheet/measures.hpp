#pragma once

// Vorticity measures: the time-zero half-line sheet and the Kaden spiral.

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <variant>

#include "vsheet/quadrature.hpp"

namespace vsheet {

/// The exponent pair (mu, alpha = 2 - 1/mu) with mu in (1/2, 1).
class SheetMu {
 public:
  explicit SheetMu(double mu);
  static SheetMu from_alpha(double alpha);

  double mu() const noexcept { return mu_; }
  double alpha() const noexcept { return alpha_; }

 private:
  double mu_;
  double alpha_;
};

/// alpha s^(alpha-1) ds on the positive real axis.
struct TimeZeroSheet {
  SheetMu params;
};

/// The spiral s -> s exp(i (t / 2 pi) s^(-1/mu)) carrying density alpha s^(alpha-1).
class KadenSheet {
 public:
  KadenSheet(SheetMu params, double t);

  const SheetMu& params() const noexcept { return params_; }
  double t() const noexcept { return t_; }

 private:
  SheetMu params_;
  double t_;
};

using Sheet = std::variant<TimeZeroSheet, KadenSheet>;

const SheetMu& sheet_params(const Sheet& sheet);

double density(const Sheet& sheet, double s);

/// Polar angle of the spiral at arc parameter s (unreduced, decreasing in s).
double spiral_angle(const KadenSheet& sheet, double s);
std::complex<double> spiral_point(const KadenSheet& sheet, double s);
/// Position of the sheet point with parameter s (the real point s for time zero).
std::complex<double> sheet_point(const Sheet& sheet, double s);

/// omega(B(0, r)) = r^alpha.
double ball_mass(const Sheet& sheet, double r);

/// Radial window of a pushforward integral together with the power-law
/// behaviour of f(point(s)) at its ends, f ~ s^k.
struct RadialRange {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  double power_at_zero = 0.0;
  std::optional<double> power_at_infinity;
};

/// Integral of f against the sheet measure over lower < s < upper.
quad::ComplexIntegralResult pushforward_integral(const Sheet& sheet,
                                                 const std::function<std::complex<double>(std::complex<double>)>& f,
                                                 const RadialRange& range, const quad::QuadConfig& cfg);

/// Integral of u^k d omega over lower < |u| < upper, divided by
/// scale^(k + alpha) (a choice of scale near the window keeps high orders
/// representable). Exact for the time-zero sheet; for the spiral the phase
/// k t s^(-1/mu) / 2 pi is linearised.
quad::ComplexIntegralResult sheet_power_integral(const Sheet& sheet, int k, double lower, double upper,
                                                 const quad::QuadConfig& cfg, double scale = 1.0);

/// Same spiral integral over (0, upper] by graded panels without the phase
/// substitution; an independent second strategy.
quad::ComplexIntegralResult sheet_power_integral_graded(const KadenSheet& sheet, int k, double upper,
                                                        const quad::QuadConfig& cfg, double scale = 1.0);

}  // namespace vsheet
