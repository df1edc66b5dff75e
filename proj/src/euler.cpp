#include "vsheet/euler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>

#include "vsheet/errors.hpp"
#include "vsheet/moments.hpp"

namespace vsheet {

namespace {

using Complex = std::complex<double>;
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2 * pi;

const std::array<double, 4> kExcisionRadii{1e-1, 1e-2, 1e-3, 1e-4};
// a weak-form value counts as converged when its error is below this share of its scale
constexpr double kConvergedFraction = 1e-6;

Vec2 closed_velocity(const SheetMu& params, Vec2 x) {
  return velocity_timezero_closed({x[0], x[1]}, params).vector;
}

double dot(Vec2 a, Vec2 b) { return a[0] * b[0] + a[1] * b[1]; }

// b(q), b'(q), b''(q) for 0 <= q < 1
std::array<double, 3> profile_derivatives(const StreamBump& bump, double q) {
  const double w = 1.0 - q;
  if (bump.profile == BumpProfile::Polynomial) {
    const int k = bump.order;
    return {std::pow(w, k), -k * std::pow(w, k - 1), k * (k - 1.0) * std::pow(w, k - 2)};
  }
  const double b = std::exp(1.0 - 1.0 / w);
  return {b, -b / (w * w), b / (w * w * w * w) - 2 * b / (w * w * w)};
}

using PlaneFunction = std::function<double(Vec2)>;

struct Disk {
  Vec2 center;
  double radius;
};

// Integral of f over disk minus the wedge cut along Sigma, restricted to
// rho_min < |x| < rho_max, in polar coordinates about the origin.
quad::IntegralResult polar_integral(const PlaneFunction& f, const Disk& disk, double rho_min, double rho_max,
                                    double abs_tol, double rel_tol, int max_subdivisions) {
  const double cx = disk.center[0], cy = disk.center[1], R = disk.radius;
  const double c2 = cx * cx + cy * cy;
  const bool contains_origin = c2 < R * R;

  quad::QuadConfig inner;
  inner.abs_tol = abs_tol / (4 * two_pi);
  inner.rel_tol = rel_tol / 4;
  inner.max_subdivisions = max_subdivisions;
  quad::QuadConfig outer = inner;
  outer.abs_tol = abs_tol / 2;
  outer.rel_tol = rel_tol / 2;

  long evaluations = 0;
  bool inner_ok = true;
  double inner_err = 0.0;
  auto radial = quad::RealFunction([&](double theta) {
    const double ex = std::cos(theta), ey = std::sin(theta);
    const double ce = cx * ex + cy * ey;
    const double disc = ce * ce - c2 + R * R;
    if (disc <= 0.0) return 0.0;
    const double root = std::sqrt(disc);
    double lo = contains_origin ? 0.0 : ce - root;
    double hi = ce + root;
    if (hi <= 0.0) return 0.0;
    lo = std::max(lo, rho_min);
    hi = std::min(hi, rho_max);
    if (!(hi > lo)) return 0.0;
    auto g = quad::RealFunction([&](double rho) { return rho * f({rho * ex, rho * ey}); });
    auto res = quad::integrate_finite(g, lo, hi, inner);
    evaluations += res.evaluations;
    inner_ok = inner_ok && res.converged;
    inner_err = std::max(inner_err, res.error_estimate);
    return res.value;
  });

  // angular windows inside (0, 2 pi); theta = 0 is the upper side of Sigma
  std::vector<std::pair<double, double>> windows;
  if (contains_origin || c2 == R * R) {
    windows.push_back({0.0, two_pi});
  } else {
    double beta = std::atan2(cy, cx);
    if (beta < 0.0) beta += two_pi;
    const double h = std::asin(R / std::sqrt(c2));
    double a = beta - h, b = beta + h;
    if (a < 0.0) {
      windows.push_back({0.0, b});
      windows.push_back({a + two_pi, two_pi});
    } else if (b > two_pi) {
      windows.push_back({a, two_pi});
      windows.push_back({0.0, b - two_pi});
    } else {
      windows.push_back({a, b});
    }
  }

  quad::IntegralResult total;
  for (auto [a, b] : windows) total += quad::integrate_finite(radial, a, b, outer);
  total.evaluations += evaluations;
  total.error_estimate += two_pi * inner_err;
  total.converged = total.converged && inner_ok;
  return total;
}

// Excision schedule over the support of `disk`: I(delta) for each radius,
// extrapolated to delta -> 0 in the given powers.
WeakFormResult excised_integral(const PlaneFunction& f, const PlaneFunction& magnitude, const Disk& disk,
                                std::span<const double> powers, double core_coefficient,
                                const quad::QuadConfig& cfg) {
  WeakFormResult out;
  const double inf = std::numeric_limits<double>::infinity();
  auto scale = polar_integral(magnitude, disk, 0.0, inf, 0.0, 1e-4, cfg.max_subdivisions);
  out.scale = scale.value;
  if (out.scale == 0.0) {
    out.converged = true;
    for (double d : kExcisionRadii) out.excision_trace.push_back({d, 0.0});
    return out;
  }

  const double abs_tol = 1e-12 * out.scale;
  const double rel_tol = std::max(cfg.rel_tol, 1e-10);
  bool ok = scale.converged;
  double err = 0.0;
  double running = 0.0;
  double upper = inf;
  std::vector<double> values;
  for (double d : kExcisionRadii) {
    auto piece = polar_integral(f, disk, d, upper, abs_tol, rel_tol, cfg.max_subdivisions);
    running += piece.value;
    err += piece.error_estimate;
    ok = ok && piece.converged;
    out.excision_trace.push_back({d, running});
    values.push_back(running);
    upper = d;
  }

  // Richardson on the three smallest radii
  const std::span<const double> steps(kExcisionRadii.data() + 1, 3);
  const std::span<const double> vals(values.data() + 1, 3);
  auto ex = quad::richardson(steps, vals, powers.first(2));
  // one power on the two smallest radii; the gap estimates what the second power removed
  auto coarse = quad::richardson(steps.last(2), vals.last(2), powers.first(1));
  out.value = ex.value;
  out.error_estimate = err + std::abs(ex.value - coarse.value);

  const double last = kExcisionRadii.back();
  out.core_bound = core_coefficient * std::pow(last, powers[0]);
  out.converged = ok && std::isfinite(out.value) && out.error_estimate <= std::max(cfg.abs_tol, kConvergedFraction * out.scale);
  return out;
}

double frobenius(const std::array<Vec2, 2>& m) {
  return std::sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]);
}

// sup of |g| over a small sample of B(0, r)
double sup_near_origin(const std::function<double(Vec2)>& g, double r) {
  double s = g({0.0, 0.0});
  for (int j = 0; j < 8; ++j) {
    const double t = two_pi * j / 8;
    s = std::max(s, g({r * std::cos(t), r * std::sin(t)}));
  }
  return s;
}

double line_velocity_factor(const SheetMu& params, const quad::QuadConfig& cfg) {
  const auto pv = pv_lemma_value(params.alpha(), cfg);
  return params.alpha() / two_pi * pv.value;
}

}  // namespace

void StreamBump::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("bump radius must be positive");
  if (profile == BumpProfile::Polynomial && order < 3) throw DomainError("polynomial bump order must be at least 3");
  if (!std::isfinite(amplitude) || !std::isfinite(center[0]) || !std::isfinite(center[1]))
    throw DomainError("bump parameters must be finite");
}

double StreamBump::value(Vec2 x) const {
  const double dx = x[0] - center[0], dy = x[1] - center[1];
  const double q = (dx * dx + dy * dy) / (radius * radius);
  if (q >= 1.0) return 0.0;
  return amplitude * profile_derivatives(*this, q)[0];
}

Vec2 StreamBump::gradient(Vec2 x) const {
  const double dx = x[0] - center[0], dy = x[1] - center[1];
  const double R2 = radius * radius;
  const double q = (dx * dx + dy * dy) / R2;
  if (q >= 1.0) return {0.0, 0.0};
  const double b1 = profile_derivatives(*this, q)[1];
  return {amplitude * b1 * 2 * dx / R2, amplitude * b1 * 2 * dy / R2};
}

std::array<Vec2, 2> StreamBump::hessian(Vec2 x) const {
  const double d[2] = {x[0] - center[0], x[1] - center[1]};
  const double R2 = radius * radius;
  const double q = (d[0] * d[0] + d[1] * d[1]) / R2;
  std::array<Vec2, 2> h{};
  if (q >= 1.0) return h;
  const auto b = profile_derivatives(*this, q);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      h[i][j] = amplitude * (b[2] * (2 * d[i] / R2) * (2 * d[j] / R2) + (i == j ? b[1] * 2 / R2 : 0.0));
  return h;
}

TestFieldValue test_field_eval(const TestField& field, Vec2 x) {
  const auto g = field.source.gradient(x);
  const auto h = field.source.hessian(x);
  TestFieldValue out;
  out.phi = {g[1], -g[0]};
  for (int i = 0; i < 2; ++i) {
    out.gradient[i][0] = h[i][1];
    out.gradient[i][1] = -h[i][0];
  }
  return out;
}

WeakFormResult momentum_form(const SheetMu& params, const TestField& field, const quad::QuadConfig& cfg) {
  field.source.validate();
  auto f = PlaneFunction([&](Vec2 x) {
    const auto t = test_field_eval(field, x);
    const Vec2 v = closed_velocity(params, x);
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s += v[i] * v[j] * t.gradient[i][j];
    return s;
  });
  auto mag = PlaneFunction([&](Vec2 x) {
    const Vec2 v = closed_velocity(params, x);
    return dot(v, v) * frobenius(test_field_eval(field, x).gradient);
  });
  const double a = params.alpha();
  const std::array<double, 2> powers{2 * a, 2 * a + 1};
  const double sup_grad = sup_near_origin(
      [&](Vec2 x) { return frobenius(test_field_eval(field, x).gradient); }, kExcisionRadii.back());
  return excised_integral(f, mag, {field.source.center, field.source.radius}, powers,
                          sup_grad * ball_energy_closed(params, 1.0), cfg);
}

WeakFormResult weak_divergence(const SheetMu& params, const StreamBump& bump, const quad::QuadConfig& cfg) {
  bump.validate();
  auto f = PlaneFunction([&](Vec2 x) { return dot(closed_velocity(params, x), bump.gradient(x)); });
  auto mag = PlaneFunction([&](Vec2 x) {
    const Vec2 v = closed_velocity(params, x), g = bump.gradient(x);
    return std::sqrt(dot(v, v) * dot(g, g));
  });
  const double a = params.alpha();
  const std::array<double, 2> powers{a + 1, a + 2};
  // |v| <= C rho^(alpha-1), so the core is at most C |grad psi| 2 pi delta^(alpha+1) / (alpha+1)
  const double C = a / (2 * std::sin(pi * a));
  const double sup_grad = sup_near_origin(
      [&](Vec2 x) { return std::sqrt(dot(bump.gradient(x), bump.gradient(x))); }, kExcisionRadii.back());
  return excised_integral(f, mag, {bump.center, bump.radius}, powers, C * sup_grad * two_pi / (a + 1), cfg);
}

BoundaryTerms boundary_terms(const SheetMu& params, double r, const TestField& field, const quad::QuadConfig& cfg) {
  if (!(r > 0.0)) throw DomainError("circle radius must be positive");
  field.source.validate();
  const double a = params.alpha();
  BoundaryTerms out;
  out.r = r;

  quad::QuadConfig qc = cfg;
  qc.rel_tol = std::max(cfg.rel_tol, 1e-11);
  qc.abs_tol = std::max(cfg.abs_tol, 1e-14);

  // real part: flux, imaginary part: pressure
  auto circle = quad::ComplexFunction([&](double theta) {
    const Vec2 x{r * std::cos(theta), r * std::sin(theta)};
    const Vec2 nu{-x[0] / r, -x[1] / r};
    const Vec2 v = closed_velocity(params, x);
    const Vec2 phi = test_field_eval(field, x).phi;
    return Complex(dot(v, nu) * dot(v, phi), -dot(phi, nu) * dot(v, v) / 2) * r;
  });
  auto c = quad::integrate_finite(circle, 0.0, two_pi, qc);
  out.circle_flux = c.value.real();
  out.circle_pressure = c.value.imag();
  out.error_estimate += c.error_estimate;

  // the sheet inside the support, beyond r
  const auto& src = field.source;
  const double cy = src.center[1];
  if (std::abs(cy) < src.radius) {
    const double half = std::sqrt(src.radius * src.radius - cy * cy);
    const double lo = std::max(r, src.center[0] - half), hi = src.center[0] + half;
    if (hi > lo) {
      const double v2_factor = line_velocity_factor(params, cfg);
      auto line = quad::ComplexFunction([&](double s) {
        const double sa = std::pow(s, a - 1);
        const Vec2 up{-a / 2 * sa, v2_factor * sa}, down{a / 2 * sa, v2_factor * sa};
        const Vec2 phi = test_field_eval(field, {s, 0.0}).phi;
        const double jump = (dot(up, up) - dot(down, down)) / 2 * phi[1];
        const Vec2 diff{up[0] - down[0], up[1] - down[1]};
        return Complex(jump, -up[1] * dot(phi, diff));
      });
      auto l = quad::integrate_finite(line, lo, hi, qc);
      out.jump = l.value.real();
      out.line = l.value.imag();
      out.error_estimate += l.error_estimate;
    }
  }
  return out;
}

Vec2 impulse_Y(const quad::QuadConfig& cfg) {
  const SheetMu half = SheetMu::from_alpha(0.5);
  quad::QuadConfig qc = cfg;
  qc.rel_tol = std::max(cfg.rel_tol, 1e-10);
  qc.abs_tol = std::max(cfg.abs_tol, 1e-13);
  // theta in (0, 2 pi) keeps the crossing at the ends; dS = d theta
  auto f = quad::ComplexFunction([&](double theta) {
    const Vec2 x{std::cos(theta), std::sin(theta)};
    const Vec2 v = velocity_timezero({x[0], x[1]}, half, cfg).vector;
    const double k = dot(v, v) / 2, vx = dot(v, x);
    return Complex(k * x[0] - vx * v[0], k * x[1] - vx * v[1]);
  });
  auto res = quad::integrate_finite(f, 0.0, two_pi, qc);
  if (!res.converged) throw QuadratureError("impulse quadrature did not converge", 0.0);
  return {res.value.real(), res.value.imag()};
}

quad::IntegralResult line_rhs(const SheetMu& params, const TestField& field, const quad::QuadConfig& cfg) {
  const double a = params.alpha();
  if (!(a > 0.5)) throw DomainError("the line distribution needs alpha > 1/2");
  field.source.validate();
  const auto& src = field.source;
  const double cy = src.center[1];
  quad::IntegralResult out;
  if (std::abs(cy) >= src.radius) return out;
  const double half = std::sqrt(src.radius * src.radius - cy * cy);
  const double lo = std::max(0.0, src.center[0] - half), hi = src.center[0] + half;
  if (!(hi > lo)) return out;

  const auto pv = pv_lemma_value(a, cfg);
  const double factor = a * a / two_pi * pv.value;
  auto f = quad::RealFunction([&](double s) {
    return factor * std::pow(s, 2 * a - 2) * test_field_eval(field, {s, 0.0}).phi[0];
  });
  quad::EndpointExponents ends;
  if (lo == 0.0) ends.lower = 2 * a - 2;
  out = quad::integrate_finite(f, lo, hi, cfg, ends);
  // the PV enters linearly
  if (pv.value != 0.0) out.error_estimate += std::abs(out.value) * pv.excision.error_estimate / std::abs(pv.value);
  out.converged = out.converged && pv.converged;
  return out;
}

ConditionReport condition_report(const SheetMu& params, const quad::QuadConfig& cfg) {
  ConditionReport rep;
  rep.mu = params.mu();
  rep.alpha = params.alpha();
  const Sheet sheet = TimeZeroSheet{params};

  rep.decay_radii = {1e-3, 1e-2, 1e-1};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double r : rep.decay_radii) {
    const double e = surface_energy(sheet, r, EnergyMethod::Series, cfg).value;
    rep.decay_values.push_back(e);
    const double lx = std::log(r), ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(rep.decay_radii.size());
  rep.decay_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.decay_holds = rep.decay_exponent > rep.thresholds.decay_exponent;

  rep.matching_witness = line_velocity_factor(params, cfg);
  rep.matching_holds = std::abs(rep.matching_witness) <= rep.thresholds.matching;

  rep.pressure_grid = {0.5, 1.0, 2.0};
  for (double s : rep.pressure_grid) {
    const Vec2 up = trace_above(s, params, cfg), down = trace_below(s, params, cfg);
    rep.pressure_witness = std::max(rep.pressure_witness, std::abs(up[0] - down[0]));
    rep.kinetic_jump_witness = std::max(rep.kinetic_jump_witness, std::abs(dot(up, up) - dot(down, down)));
  }
  rep.pressure_continuity_holds = rep.pressure_witness <= rep.thresholds.pressure;
  return rep;
}

}  // namespace vsheet
