#pragma once

// Weak steady Euler checks for the time-zero sheet: divergence-free test
// fields, the momentum form, its boundary decomposition, the impulse vector
// and the line distribution, and the condition report.

#include <array>
#include <vector>

#include "vsheet/measures.hpp"
#include "vsheet/quadrature.hpp"
#include "vsheet/velocity.hpp"

namespace vsheet {

enum class BumpProfile { Polynomial, Exponential };

/// psi(x) = amplitude * b(|x - center|^2 / radius^2), with b(q) = (1 - q)^order
/// or exp(1 - 1 / (1 - q)) for q < 1 and 0 otherwise.
struct StreamBump {
  Vec2 center{};
  double radius = 1.0;
  double amplitude = 1.0;
  BumpProfile profile = BumpProfile::Polynomial;
  int order = 4;

  /// Throws DomainError for radius <= 0 or a polynomial order below 3.
  void validate() const;

  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;
  /// hessian[i][j] = d_i d_j psi
  std::array<Vec2, 2> hessian(Vec2 x) const;
};

struct TestFieldValue {
  Vec2 phi{};
  /// gradient[i][j] = d_i phi_j
  std::array<Vec2, 2> gradient{};
};

/// phi = (d2 psi, -d1 psi), divergence-free by construction.
struct TestField {
  StreamBump source;
};

TestFieldValue test_field_eval(const TestField& field, Vec2 x);

struct WeakFormResult {
  double value = 0.0;          ///< excision limit
  double error_estimate = 0.0;
  /// Integral of the absolute integrand bound, the natural size of the value.
  double scale = 0.0;
  /// Bound on the excised core at the smallest radius.
  double core_bound = 0.0;
  bool converged = false;
  std::vector<quad::ExcisionEntry> excision_trace;
};

/// Integral over the plane of sum_ij v_i v_j d_i phi_j for the time-zero field.
WeakFormResult momentum_form(const SheetMu& params, const TestField& field, const quad::QuadConfig& cfg);

/// Integral of v . grad psi, zero when v is weakly divergence-free.
WeakFormResult weak_divergence(const SheetMu& params, const StreamBump& bump, const quad::QuadConfig& cfg);

/// The four pieces of the momentum form restricted to |x| > r, with nu = -x/r
/// the normal leaving the outer region:
///   circle_flux     = integral over |x| = r of (v . nu)(v . phi)
///   circle_pressure = -integral over |x| = r of (phi . nu) |v|^2 / 2
///   jump            = integral over (r, inf) of (|v+|^2 - |v-|^2) phi_2 / 2
///   line            = -integral over (r, inf) of v_2 phi . (v+ - v-)
struct BoundaryTerms {
  double r = 0.0;
  double circle_flux = 0.0;
  double circle_pressure = 0.0;
  double jump = 0.0;
  double line = 0.0;
  double error_estimate = 0.0;

  double total() const { return circle_flux + circle_pressure + jump + line; }
};

BoundaryTerms boundary_terms(const SheetMu& params, double r, const TestField& field, const quad::QuadConfig& cfg);

/// Y = integral over the unit circle of |v|^2 x / 2 - (v . x) v at alpha = 1/2.
Vec2 impulse_Y(const quad::QuadConfig& cfg);

/// integral over (0, inf) of alpha s^(alpha-1) v_2(s, 0) phi_1(s, 0) ds, alpha > 1/2.
quad::IntegralResult line_rhs(const SheetMu& params, const TestField& field, const quad::QuadConfig& cfg);

struct ConditionThresholds {
  /// Decay holds when the fitted exponent exceeds this.
  double decay_exponent = 1e-6;
  double matching = 1e-8;
  double pressure = 1e-8;
};

struct ConditionReport {
  double mu = 0.0;
  double alpha = 0.0;
  ConditionThresholds thresholds;

  std::vector<double> decay_radii;
  std::vector<double> decay_values;  ///< surface energy at each radius
  double decay_exponent = 0.0;       ///< fitted log-log slope
  bool decay_holds = false;

  double matching_witness = 0.0;  ///< v_2(1, 0)
  bool matching_holds = false;

  std::vector<double> pressure_grid;
  double pressure_witness = 0.0;  ///< sup |v1+ - v1-| over the grid
  bool pressure_continuity_holds = false;
  /// sup ||v+|^2 - |v-|^2|, the jump that enters the momentum balance.
  double kinetic_jump_witness = 0.0;

  bool all_hold() const { return decay_holds && matching_holds && pressure_continuity_holds; }
};

ConditionReport condition_report(const SheetMu& params, const quad::QuadConfig& cfg = {});

}  // namespace vsheet
