#pragma once

// Power moments of the sheet measures and the energies built from them.

#include <complex>
#include <vector>

#include "vsheet/measures.hpp"
#include "vsheet/quadrature.hpp"

namespace vsheet {

/// m_{r,n} = integral over B(0, r) of u^n d omega.
std::complex<double> inner_moment(const Sheet& sheet, double r, int n, const quad::QuadConfig& cfg);

/// M_{r,k} = integral outside B(0, r) of u^(-k) d omega, k >= 1.
std::complex<double> outer_moment(const Sheet& sheet, double r, int k, const quad::QuadConfig& cfg);

/// Explicit-constant moment bounds, alpha r^(n+alpha) / (n+alpha) and
/// alpha r^(alpha-k) / (k-alpha).
double inner_moment_bound(const SheetMu& params, double r, int n);
double outer_moment_bound(const SheetMu& params, double r, int k);

struct MomentTable {
  double r = 0.0;
  std::vector<std::complex<double>> inner;  ///< n = 0..N
  std::vector<std::complex<double>> outer;  ///< k = 1..N, stored at index k-1
  /// Bound on the omitted part of the spherical-average series.
  double truncation_bound = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

MomentTable moment_table(const Sheet& sheet, double r, int order, const quad::QuadConfig& cfg);

struct SeriesOptions {
  /// Largest truncation order; spiral series start at 16 and double until
  /// the fitted tail meets `tolerance`. The time-zero tail is exact.
  int order = 128;
  /// Relative accuracy demanded of the tail estimate.
  double tolerance = 1e-6;
};

struct SeriesResult {
  double value = 0.0;
  double partial_sum = 0.0;
  double tail = 0.0;
  double truncation_bound = 0.0;
  double error_estimate = 0.0;
  int order = 0;
  bool converged = false;
};

/// Angular mean of |v|^2 over |x| = r from the moment series.
SeriesResult spherical_average_series(const Sheet& sheet, double r, const quad::QuadConfig& cfg,
                                      const SeriesOptions& opts = {});

enum class EnergyMethod { Series, Direct };

struct EnergyResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  long evaluations = 0;
};

/// Integral of |v|^2 over the circle |x| = r.
EnergyResult surface_energy(const Sheet& sheet, double r, EnergyMethod method, const quad::QuadConfig& cfg,
                            const SeriesOptions& opts = {});

/// pi alpha^2 r^(2 alpha - 1) / (2 sin^2(pi alpha)).
double surface_energy_closed(const SheetMu& params, double r);

/// Integral of |v|^2 over B(0, r) by radial integration of the surface energy.
EnergyResult ball_energy(const TimeZeroSheet& sheet, double r, const quad::QuadConfig& cfg);

/// pi alpha r^(2 alpha) / (4 sin^2(pi alpha)).
double ball_energy_closed(const SheetMu& params, double r);

}  // namespace vsheet
