#include "vsheet/moments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <memory>
#include <numbers>
#include <optional>
#include <thread>

#include <boost/math/special_functions/trigamma.hpp>

#include "vsheet/errors.hpp"
#include "vsheet/velocity.hpp"

namespace vsheet {

namespace {

using Complex = std::complex<double>;
constexpr double pi = std::numbers::pi;
constexpr int kFirstOrder = 16;
constexpr double kSpreadSafety = 10.0;

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
}

// Moments divided by r^(n+alpha) and r^(alpha-k); each series term is then
// r^(2 alpha - 2) |normalised moment|^2.
struct Normalised {
  std::vector<Complex> inner, outer;
  std::vector<double> inner_err, outer_err;
  bool converged = true;
};

// Fills inner n in [first_inner, last] and outer k in [max(first_inner, 1), last].
void extend_moments(Normalised& out, const Sheet& sheet, double r, int first_inner, int last,
                    const quad::QuadConfig& cfg) {
  out.inner.resize(last + 1);
  out.inner_err.resize(last + 1);
  out.outer.resize(last);
  out.outer_err.resize(last);
  const double inf = std::numeric_limits<double>::infinity();
  const int first_outer = std::max(first_inner, 1);
  const int n_inner = last - first_inner + 1;

  auto job = [&](int j) {
    if (j < n_inner) {
      const int n = first_inner + j;
      auto res = sheet_power_integral(sheet, n, 0.0, r, cfg, r);
      out.inner[n] = res.value;
      out.inner_err[n] = res.error_estimate;
      return res.converged;
    }
    const int k = first_outer + (j - n_inner);
    auto res = sheet_power_integral(sheet, -k, r, inf, cfg, r);
    out.outer[k - 1] = res.value;
    out.outer_err[k - 1] = res.error_estimate;
    return res.converged;
  };

  const int jobs = n_inner + (last - first_outer + 1);
  if (cfg.parallel && std::holds_alternative<KadenSheet>(sheet)) {
    const int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::future<bool>> futures;
    for (int w = 0; w < workers; ++w) {
      futures.push_back(std::async(std::launch::async, [&, w] {
        bool ok = true;
        for (int j = w; j < jobs; j += workers) ok = job(j) && ok;
        return ok;
      }));
    }
    for (auto& f : futures) out.converged = f.get() && out.converged;
  } else {
    for (int j = 0; j < jobs; ++j) out.converged = job(j) && out.converged;
  }
}

Normalised normalised_moments(const Sheet& sheet, double r, int order, const quad::QuadConfig& cfg) {
  Normalised out;
  extend_moments(out, sheet, r, 0, order, cfg);
  return out;
}

// Tail of sum_{n > N} a / (n + b)^2.
double trigamma_tail(double a, double b, int last) { return a * boost::math::trigamma(last + 1 + b); }

struct TailFit {
  double tail = 0.0;
  double spread = 0.0;
  bool ok = false;
};

// Fits a / (n + b)^2 through the terms at n-1 and n.
std::optional<std::pair<double, double>> fit_pair(double prev, double last, int n) {
  if (!(prev > 0.0) || !(last > 0.0)) return std::nullopt;
  const double rho = std::sqrt(prev / last);
  if (!(rho > 1.0)) return std::nullopt;
  const double b = (rho * (n - 1) - n) / (1.0 - rho);
  if (!(n + b > 0.0)) return std::nullopt;
  return std::pair{last * (n + b) * (n + b), b};
}

// terms[i] belongs to index first + i
TailFit fit_tail(const std::vector<double>& terms, int first) {
  TailFit fit;
  const int m = static_cast<int>(terms.size());
  if (m < 4) return fit;
  const int last = first + m - 1;
  auto now = fit_pair(terms[m - 2], terms[m - 1], last);
  auto before = fit_pair(terms[m - 4], terms[m - 3], last - 2);
  if (!now || !before) return fit;
  fit.tail = trigamma_tail(now->first, now->second, last);
  fit.spread = std::abs(fit.tail - trigamma_tail(before->first, before->second, last));
  fit.ok = true;
  return fit;
}

}  // namespace

double inner_moment_bound(const SheetMu& params, double r, int n) {
  const double a = params.alpha();
  return a * std::pow(r, n + a) / (n + a);
}

double outer_moment_bound(const SheetMu& params, double r, int k) {
  const double a = params.alpha();
  return a * std::pow(r, a - k) / (k - a);
}

Complex inner_moment(const Sheet& sheet, double r, int n, const quad::QuadConfig& cfg) {
  check_radius(r);
  if (n < 0) throw DomainError("inner moment order must be non-negative");
  const double a = sheet_params(sheet).alpha();
  auto res = sheet_power_integral(sheet, n, 0.0, r, cfg, r);
  if (!res.converged) throw QuadratureError("inner moment did not converge", r);
  return res.value * std::pow(r, n + a);
}

Complex outer_moment(const Sheet& sheet, double r, int k, const quad::QuadConfig& cfg) {
  check_radius(r);
  if (k < 1) throw DomainError("outer moment order must be at least 1");
  const double a = sheet_params(sheet).alpha();
  auto res = sheet_power_integral(sheet, -k, r, std::numeric_limits<double>::infinity(), cfg, r);
  if (!res.converged) throw QuadratureError("outer moment did not converge", r);
  return res.value * std::pow(r, a - k);
}

MomentTable moment_table(const Sheet& sheet, double r, int order, const quad::QuadConfig& cfg) {
  check_radius(r);
  if (order < 1) throw DomainError("truncation order must be at least 1");
  const double a = sheet_params(sheet).alpha();
  auto norm = normalised_moments(sheet, r, order, cfg);
  MomentTable table;
  table.r = r;
  table.converged = norm.converged;
  for (int n = 0; n <= order; ++n) {
    const double s = std::pow(r, n + a);
    table.inner.push_back(norm.inner[n] * s);
    table.error_estimate = std::max(table.error_estimate, norm.inner_err[n] * s);
  }
  for (int k = 1; k <= order; ++k) {
    const double s = std::pow(r, a - k);
    table.outer.push_back(norm.outer[k - 1] * s);
    table.error_estimate = std::max(table.error_estimate, norm.outer_err[k - 1] * s);
  }
  table.truncation_bound = std::pow(r, 2 * a - 2) / (4 * pi * pi) * a * a *
                           (boost::math::trigamma(order + 1 + a) + boost::math::trigamma(order + 1 - a));
  return table;
}

SeriesResult spherical_average_series(const Sheet& sheet, double r, const quad::QuadConfig& cfg,
                                      const SeriesOptions& opts) {
  check_radius(r);
  if (opts.order < 1) throw DomainError("truncation order must be at least 1");
  const int N = opts.order;
  const double a = sheet_params(sheet).alpha();
  const double prefactor = std::pow(r, 2 * a - 2) / (4 * pi * pi);

  SeriesResult out;
  out.order = N;
  // Lemma-type bound on the omitted terms; exact for the time-zero sheet
  const double bound_inner = a * a * boost::math::trigamma(N + 1 + a);
  const double bound_outer = a * a * boost::math::trigamma(N + 1 - a);
  out.truncation_bound = prefactor * (bound_inner + bound_outer);

  if (std::holds_alternative<TimeZeroSheet>(sheet)) {
    double sum = 0.0;
    for (int n = N; n >= 0; --n) sum += a * a / ((n + a) * (n + a));
    for (int k = N; k >= 1; --k) sum += a * a / ((k - a) * (k - a));
    out.partial_sum = prefactor * sum;
    out.tail = out.truncation_bound;
    out.value = out.partial_sum + out.tail;
    out.error_estimate = 8 * std::numeric_limits<double>::epsilon() * out.value;
    out.converged = true;
    return out;
  }

  // orders 16, 32, ... up to N until the fitted tail is trustworthy
  Normalised norm;
  int order = std::min(N, kFirstOrder);
  extend_moments(norm, sheet, r, 0, order, cfg);
  for (;;) {
    std::vector<double> inner_terms(order + 1), outer_terms(order);
    double quad_err = 0.0;
    for (int n = 0; n <= order; ++n) {
      inner_terms[n] = std::norm(norm.inner[n]);
      quad_err += 2 * std::abs(norm.inner[n]) * norm.inner_err[n];
    }
    for (int k = 1; k <= order; ++k) {
      outer_terms[k - 1] = std::norm(norm.outer[k - 1]);
      quad_err += 2 * std::abs(norm.outer[k - 1]) * norm.outer_err[k - 1];
    }
    double sum = 0.0;
    for (int n = order; n >= 0; --n) sum += inner_terms[n];
    for (int k = order; k >= 1; --k) sum += outer_terms[k - 1];

    auto fit_in = fit_tail(inner_terms, 0);
    auto fit_out = fit_tail(outer_terms, 1);
    out.order = order;
    out.truncation_bound = prefactor * a * a *
                           (boost::math::trigamma(order + 1 + a) + boost::math::trigamma(order + 1 - a));
    out.partial_sum = prefactor * sum;
    if (fit_in.ok && fit_out.ok) {
      out.tail = prefactor * (fit_in.tail + fit_out.tail);
      out.error_estimate = prefactor * (fit_in.spread + fit_out.spread + quad_err);
    } else {
      // no usable fit: midpoint of [0, bound]
      out.tail = 0.5 * out.truncation_bound;
      out.error_estimate = 0.5 * out.truncation_bound + prefactor * quad_err;
    }
    out.value = out.partial_sum + out.tail;
    // the two-fit spread understates the error at low orders
    out.error_estimate *= kSpreadSafety;
    out.converged = norm.converged && out.error_estimate <= opts.tolerance * out.value;
    if (out.converged || order >= N) return out;
    const int next = std::min(N, 2 * order);
    extend_moments(norm, sheet, r, order + 1, next, cfg);
    order = next;
  }
}

double surface_energy_closed(const SheetMu& params, double r) {
  const double a = params.alpha();
  const double s = std::sin(pi * a);
  return pi * a * a * std::pow(r, 2 * a - 1) / (2 * s * s);
}

double ball_energy_closed(const SheetMu& params, double r) {
  const double a = params.alpha();
  const double s = std::sin(pi * a);
  return pi * a * std::pow(r, 2 * a) / (4 * s * s);
}

EnergyResult surface_energy(const Sheet& sheet, double r, EnergyMethod method, const quad::QuadConfig& cfg,
                            const SeriesOptions& opts) {
  check_radius(r);
  EnergyResult out;
  if (method == EnergyMethod::Series) {
    auto s = spherical_average_series(sheet, r, cfg, opts);
    out.value = 2 * pi * r * s.value;
    out.error_estimate = 2 * pi * r * s.error_estimate;
    out.converged = s.converged;
    return out;
  }

  // angular quadrature over one turn starting at the sheet crossing
  quad::QuadConfig outer = cfg;
  outer.rel_tol = std::max(cfg.rel_tol, 1e-10);
  outer.abs_tol = 0.0;
  double start = 0.0;
  // largest error of |v|^2 among the point evaluations
  auto point_err = std::make_shared<double>(0.0);
  auto squared = [point_err](const VelocitySample& v) {
    const double m2 = v.vector[0] * v.vector[0] + v.vector[1] * v.vector[1];
    *point_err = std::max(*point_err, 2 * std::sqrt(m2) * v.error_estimate);
    return m2;
  };
  quad::RealFunction f;
  if (const auto* tz = std::get_if<TimeZeroSheet>(&sheet)) {
    f = [&, params = tz->params](double theta) {
      return squared(velocity_timezero(std::polar(r, theta), params, cfg));
    };
  } else {
    const auto& kaden = std::get<KadenSheet>(sheet);
    start = spiral_crossing_angle(kaden, r);
    auto field = std::make_shared<KadenVelocity>(kaden, cfg);
    f = [field, r, &squared](double theta) { return squared((*field)(std::polar(r, theta))); };
  }
  auto res = quad::integrate_finite(f, start, start + 2 * pi, outer);
  out.value = r * res.value;
  out.error_estimate = r * (res.error_estimate + 2 * pi * *point_err);
  out.converged = res.converged;
  out.evaluations = res.evaluations;
  return out;
}

EnergyResult ball_energy(const TimeZeroSheet& sheet, double r, const quad::QuadConfig& cfg) {
  check_radius(r);
  // each circle by the exact series, then integrated in the radius
  const Sheet s = sheet;
  quad::QuadConfig radial = cfg;
  radial.rel_tol = std::max(cfg.rel_tol, 1e-12);
  auto f = quad::RealFunction([&](double rho) {
    if (rho == 0.0) return 0.0;
    return surface_energy(s, rho, EnergyMethod::Series, cfg).value;
  });
  const double a = sheet.params.alpha();
  auto res = quad::integrate_finite(f, 0.0, r, radial, {.lower = 2 * a - 1, .upper = std::nullopt});
  EnergyResult out;
  out.value = res.value;
  out.error_estimate = res.error_estimate;
  out.converged = res.converged;
  out.evaluations = res.evaluations;
  return out;
}

}  // namespace vsheet
