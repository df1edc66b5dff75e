#pragma once

// Adaptive one-dimensional quadrature: finite intervals with power-law
// endpoint singularities, half-lines with algebraic decay, Cauchy principal
// values by symmetric excision, and integrands with phase c * t^(-p).

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace vsheet::quad {

std::vector<double> default_excision_schedule();

struct QuadConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_subdivisions = 4000;
  /// Strictly decreasing, positive. Principal values are reported for each entry.
  std::vector<double> excision_schedule = default_excision_schedule();
  /// Fixed truncation point for half-line tails; empty means chosen from the decay hint.
  std::optional<double> tail_cutoff;
  /// Panels per oscillation period in the linearised phase variable.
  int period_panels = 2;
  /// Allows independent sub-problems (series terms, grid points) to run concurrently.
  bool parallel = false;

  /// Throws DomainError when an invariant is broken.
  void validate() const;

  double tolerance(double magnitude) const;

  /// Copy with both tolerances divided by `factor`.
  QuadConfig tightened(double factor) const;
};

struct ExcisionEntry {
  double epsilon;
  double partial;
};

template <class T>
struct BasicIntegralResult {
  T value{};
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = true;
  std::vector<ExcisionEntry> excision_trace;

  BasicIntegralResult& operator+=(const BasicIntegralResult& other) {
    value += other.value;
    error_estimate += other.error_estimate;
    evaluations += other.evaluations;
    converged = converged && other.converged;
    return *this;
  }
};

using IntegralResult = BasicIntegralResult<double>;
using ComplexIntegralResult = BasicIntegralResult<std::complex<double>>;

using RealFunction = std::function<double(double)>;
using ComplexFunction = std::function<std::complex<double>(double)>;

/// Integrand near a simple pole. Receives the abscissa `t` and the offset
/// `t - pole`, computed without cancellation; integrands that lose accuracy
/// near the pole should be written in terms of the offset.
using PoleFunction = std::function<double(double t, double offset)>;

struct Interval {
  double lower;
  double upper;  ///< may be +infinity where the operation allows it
};

/// Known power-law exponents of the integrand at the interval ends,
/// f ~ (x - a)^beta near a. Each must exceed -1.
struct EndpointExponents {
  std::optional<double> lower;
  std::optional<double> upper;
};

IntegralResult integrate_finite(const RealFunction& f, double a, double b, const QuadConfig& cfg,
                                const EndpointExponents& ends = {});
ComplexIntegralResult integrate_finite(const ComplexFunction& f, double a, double b,
                                       const QuadConfig& cfg, const EndpointExponents& ends = {});

struct HalflineOptions {
  std::optional<double> lower_exponent;
  /// Interior points where the integrand is sharply peaked or kinked.
  std::vector<double> breakpoints;
};

/// Integral over [a, inf) of f with |f(s)| <= C s^decay_hint for large s.
/// The part beyond the truncation point is bounded analytically and the bound
/// is added to the error estimate.
IntegralResult integrate_halfline(const RealFunction& f, double a, double decay_hint,
                                  const QuadConfig& cfg, const HalflineOptions& opts = {});
ComplexIntegralResult integrate_halfline(const ComplexFunction& f, double a, double decay_hint,
                                         const QuadConfig& cfg, const HalflineOptions& opts = {});

struct PvOptions {
  std::optional<double> lower_exponent;
  std::optional<double> upper_exponent;
  /// Required when the domain is unbounded above.
  std::optional<double> decay_hint;
  /// Number of odd powers eps, eps^3, ... eliminated by the extrapolation.
  int extrapolation_terms = 2;
};

/// Principal value over `domain` of an integrand with a simple pole. The
/// integral over the domain minus (pole - eps, pole + eps) is recorded for
/// every eps of the excision schedule and the eps -> 0 limit is extrapolated.
IntegralResult pv_cauchy(const PoleFunction& f, double pole, Interval domain, const QuadConfig& cfg,
                         const PvOptions& opts = {});
IntegralResult pv_cauchy(const RealFunction& f, double pole, Interval domain, const QuadConfig& cfg,
                         const PvOptions& opts = {});

struct PowerPhaseOptions {
  double phase_offset = 0.0;
  /// Below this abscissa the phase is linearised by u = t^-p. Defaults to the
  /// point where the phase reaches kCrossoverPeriods full turns.
  std::optional<double> crossover;
  /// Decay exponent of the amplitude, needed when the interval is unbounded.
  std::optional<double> decay_hint;
  /// Power-law exponent of the amplitude at a finite lower end handled directly.
  std::optional<double> lower_exponent;
};

inline constexpr double kCrossoverPeriods = 8.0;

/// Integral of g(t) * exp(i (c t^-p + phase_offset)) over the interval.
ComplexIntegralResult integrate_power_phase(const RealFunction& amplitude, double c, double p,
                                            Interval interval, const QuadConfig& cfg,
                                            const PowerPhaseOptions& opts = {});

/// Same integral over (0, upper] without the phase substitution: geometric
/// panels toward 0, each split by the local period, stopped once the
/// integration-by-parts bound of the remaining core drops below tolerance.
/// Requires |g(t)| t^(p+1) increasing near 0.
ComplexIntegralResult integrate_power_phase_graded(const RealFunction& amplitude, double c, double p,
                                                   double upper, const QuadConfig& cfg,
                                                   double phase_offset = 0.0);

struct Extrapolation {
  double value = 0.0;
  /// Largest difference among the last three diagonal estimates.
  double spread = 0.0;
  std::vector<double> estimates;
};

/// Richardson extrapolation of values(h) to h -> 0 assuming an error expansion
/// in the given powers of h. `steps` must be strictly decreasing.
Extrapolation richardson(std::span<const double> steps, std::span<const double> values,
                         std::span<const double> powers);

}  // namespace vsheet::quad
