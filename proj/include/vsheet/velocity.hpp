#pragma once

// Biot-Savart velocities of the two sheets, in the complex convention
// w = v1 + i v2, so that w(z) = (i / 2 pi) * integral of d omega(y) / conj(z - y).

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "vsheet/measures.hpp"
#include "vsheet/quadrature.hpp"

namespace vsheet {

using Vec2 = std::array<double, 2>;

enum class VelocityMethod { ClosedForm, Quadrature };

struct VelocitySample {
  std::complex<double> point;
  Vec2 vector{};
  VelocityMethod method = VelocityMethod::Quadrature;
  double error_estimate = 0.0;
  bool converged = true;

  std::complex<double> complex_velocity() const { return {vector[0], vector[1]}; }
};

/// Time-zero sheet velocity by half-line quadrature of the Biot-Savart integral.
/// The point must not lie on the closed half-line [0, inf) x {0}.
VelocitySample velocity_timezero(std::complex<double> x, const SheetMu& params, const quad::QuadConfig& cfg);

/// Same field in closed form: conj(w) = i alpha / (2 sin(pi alpha)) * (-z)^(alpha-1),
/// principal branch, cut along the sheet.
VelocitySample velocity_timezero_closed(std::complex<double> x, const SheetMu& params);

/// PV of t^(alpha-1) / (1 - t) over (0, inf), by excision and by the reduction
/// to the regular integral of (t^(alpha-1) - t^(-alpha)) / (1 - t) over (0, 1).
struct PvLemmaResult {
  double alpha = 0.0;
  quad::IntegralResult excision;
  quad::IntegralResult reduction;
  double value = 0.0;  ///< the excision value
  double path_difference = 0.0;
  bool converged = false;
};

PvLemmaResult pv_lemma_value(double alpha, const quad::QuadConfig& cfg);

/// One-sided limits of the velocity on the sheet, v(s, 0 +- 0). v2 comes from
/// homogeneity, v2(s, 0) = s^(alpha-1) (alpha / 2 pi) PV.
Vec2 trace_above(double s, const SheetMu& params, const quad::QuadConfig& cfg);
Vec2 trace_below(double s, const SheetMu& params, const quad::QuadConfig& cfg);
/// Traces with the PV replaced by pi cot(pi alpha); for bulk evaluation.
Vec2 trace_above_closed(double s, const SheetMu& params);
Vec2 trace_below_closed(double s, const SheetMu& params);

struct TraceLimitSide {
  std::vector<Vec2> samples;  ///< velocity at (s, +-x2) for each x2 of the schedule
  Vec2 limit{};               ///< extrapolated x2 -> 0
  Vec2 trace{};               ///< trace_above / trace_below
  double distance = 0.0;      ///< |limit - trace|
  bool monotone = true;       ///< each component approaches monotonically
};

struct TraceLimitReport {
  double s = 0.0;
  std::vector<double> x2_schedule;
  TraceLimitSide above;
  TraceLimitSide below;
};

TraceLimitReport trace_limit_check(double s, const SheetMu& params, const std::vector<double>& x2_schedule,
                                   const quad::QuadConfig& cfg);

/// Velocity of the Kaden sheet at time t. The sheet inside radius rho is
/// replaced by its inner moments (a convergent multipole series at |z| > rho);
/// the rest is integrated along the spiral in the linearised phase variable.
class KadenVelocity {
 public:
  enum class Strategy {
    Linearised,  ///< rho = |z|/4, moments by phase substitution
    Graded       ///< rho = |z|/2, moments by graded panels
  };

  KadenVelocity(KadenSheet sheet, quad::QuadConfig cfg, Strategy strategy = Strategy::Linearised);

  /// Throws PoleError within 1e-8 of the spiral and DomainError at the origin.
  VelocitySample operator()(std::complex<double> z) const;

  /// Closest spiral parameter to z and the distance to it.
  std::pair<double, double> nearest(std::complex<double> z) const;

  const KadenSheet& sheet() const noexcept { return sheet_; }

 private:
  KadenSheet sheet_;
  quad::QuadConfig cfg_;
  Strategy strategy_;
};

inline constexpr double kSpiralPoleTolerance = 1e-8;

/// w(z) = v(z, 1), the self-similar profile.
VelocitySample kaden_profile(std::complex<double> z, const SheetMu& params, const quad::QuadConfig& cfg);

/// Angle in [0, 2 pi) at which the spiral crosses the circle |z| = r.
double spiral_crossing_angle(const KadenSheet& sheet, double r);

/// n . w on the spiral at cumulative vorticity gamma (mu = 2/3), with the
/// exact right-hand side 1/pi of the velocity-matching condition.
struct MatchingResult {
  double gamma = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  std::vector<quad::ExcisionEntry> excision_trace;
};

MatchingResult matching_lhs(double gamma, const quad::QuadConfig& cfg);

/// The matching integrand f(t) with pole at t = gamma, written in terms of
/// the offset u = t - gamma so that the pole is resolved without cancellation.
double matching_integrand(double gamma, double t, double offset);

}  // namespace vsheet
