#include "vsheet/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "vsheet/errors.hpp"

namespace vsheet {

namespace {

using Complex = std::complex<double>;
using std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

Vec2 to_vec(Complex w) { return {w.real(), w.imag()}; }

double pv_closed(double alpha) { return pi / std::tan(pi * alpha); }

}  // namespace

VelocitySample velocity_timezero(Complex x, const SheetMu& params, const quad::QuadConfig& cfg) {
  if (x.imag() == 0.0 && x.real() >= 0.0) {
    throw DomainError("point lies on the sheet or at the origin; use trace_above/trace_below");
  }
  const double a = params.alpha();
  const Complex zbar = std::conj(x);
  auto integrand = [&](double s) { return a * std::pow(s, a - 1.0) / (zbar - s); };
  quad::HalflineOptions opts{.lower_exponent = a - 1.0};
  if (x.real() > 0.0) {
    const double w = std::abs(x.imag());
    for (double bp : {x.real() - 4.0 * w, x.real(), x.real() + 4.0 * w}) {
      if (bp > 0.0) opts.breakpoints.push_back(bp);
    }
  }
  const auto r = quad::integrate_halfline(quad::ComplexFunction(integrand), 0.0, a - 2.0, cfg, opts);
  VelocitySample out;
  out.point = x;
  out.vector = to_vec(kI * r.value / (2.0 * pi));
  out.method = VelocityMethod::Quadrature;
  out.error_estimate = r.error_estimate / (2.0 * pi);
  out.converged = r.converged;
  return out;
}

VelocitySample velocity_timezero_closed(Complex x, const SheetMu& params) {
  if (x.imag() == 0.0 && x.real() >= 0.0) {
    throw DomainError("point lies on the sheet or at the origin; use trace_above/trace_below");
  }
  const double a = params.alpha();
  const Complex wbar = kI * a / (2.0 * std::sin(pi * a)) * std::pow(-x, a - 1.0);
  VelocitySample out;
  out.point = x;
  out.vector = to_vec(std::conj(wbar));
  out.method = VelocityMethod::ClosedForm;
  return out;
}

PvLemmaResult pv_lemma_value(double alpha, const quad::QuadConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie strictly inside (0, 1)");
  PvLemmaResult out;
  out.alpha = alpha;
  auto pole_form = [alpha](double t, double offset) { return std::pow(t, alpha - 1.0) / (-offset); };
  out.excision = quad::pv_cauchy(quad::PoleFunction(pole_form), 1.0, {0.0, INFINITY}, cfg,
                                 {.lower_exponent = alpha - 1.0, .decay_hint = alpha - 2.0});
  // t^(a-1) - t^(-a) = t^(-a) expm1((2a-1) log t), accurate as t -> 1
  auto reduced = [alpha](double t) {
    return std::pow(t, -alpha) * std::expm1((2.0 * alpha - 1.0) * std::log(t)) / (1.0 - t);
  };
  out.reduction = quad::integrate_finite(quad::RealFunction(reduced), 0.0, 1.0, cfg,
                                         {.lower = std::min(alpha - 1.0, -alpha)});
  out.value = out.excision.value;
  out.path_difference = std::abs(out.excision.value - out.reduction.value);
  out.converged = out.excision.converged && out.reduction.converged &&
                  out.path_difference <= out.excision.error_estimate + out.reduction.error_estimate +
                                             cfg.tolerance(out.value);
  return out;
}

namespace {

Vec2 trace(double s, const SheetMu& params, double pv, double side) {
  if (!(s > 0.0)) throw DomainError("trace requires s > 0");
  const double a = params.alpha();
  const double scale = std::pow(s, a - 1.0);
  return {-side * 0.5 * a * scale, a / (2.0 * pi) * pv * scale};
}

}  // namespace

Vec2 trace_above(double s, const SheetMu& params, const quad::QuadConfig& cfg) {
  if (!(s > 0.0)) throw DomainError("trace requires s > 0");
  return trace(s, params, pv_lemma_value(params.alpha(), cfg).value, 1.0);
}

Vec2 trace_below(double s, const SheetMu& params, const quad::QuadConfig& cfg) {
  if (!(s > 0.0)) throw DomainError("trace requires s > 0");
  return trace(s, params, pv_lemma_value(params.alpha(), cfg).value, -1.0);
}

Vec2 trace_above_closed(double s, const SheetMu& params) { return trace(s, params, pv_closed(params.alpha()), 1.0); }

Vec2 trace_below_closed(double s, const SheetMu& params) { return trace(s, params, pv_closed(params.alpha()), -1.0); }

TraceLimitReport trace_limit_check(double s, const SheetMu& params, const std::vector<double>& x2_schedule,
                                   const quad::QuadConfig& cfg) {
  if (!(s > 0.0)) throw DomainError("trace_limit_check requires s > 0");
  if (x2_schedule.size() < 2) throw DomainError("trace_limit_check needs at least two offsets");
  for (std::size_t i = 0; i < x2_schedule.size(); ++i) {
    if (!(x2_schedule[i] > 0.0) || (i > 0 && !(x2_schedule[i] < x2_schedule[i - 1]))) {
      throw DomainError("x2 schedule must be positive and strictly decreasing");
    }
  }
  TraceLimitReport out;
  out.s = s;
  out.x2_schedule = x2_schedule;
  const double pv = pv_lemma_value(params.alpha(), cfg).value;
  const std::vector<double> powers = {1.0, 2.0};

  auto fill = [&](TraceLimitSide& side, double sign) {
    std::array<std::vector<double>, 2> comp;
    for (double h : x2_schedule) {
      side.samples.push_back(velocity_timezero({s, sign * h}, params, cfg).vector);
      comp[0].push_back(side.samples.back()[0]);
      comp[1].push_back(side.samples.back()[1]);
    }
    for (int c = 0; c < 2; ++c) {
      side.limit[c] = quad::richardson(x2_schedule, comp[c], powers).value;
      const double scale = 1e-12 * (1.0 + std::abs(side.limit[c]));
      int direction = 0;
      for (std::size_t i = 1; i < comp[c].size(); ++i) {
        const double step = comp[c][i] - comp[c][i - 1];
        if (std::abs(step) <= scale) continue;
        const int d = step > 0 ? 1 : -1;
        if (direction != 0 && d != direction) side.monotone = false;
        direction = d;
      }
    }
    side.trace = trace(s, params, pv, sign);
    side.distance = std::hypot(side.limit[0] - side.trace[0], side.limit[1] - side.trace[1]);
  };
  fill(out.above, 1.0);
  fill(out.below, -1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Kaden spiral

double spiral_crossing_angle(const KadenSheet& sheet, double r) {
  const double theta = std::fmod(spiral_angle(sheet, r), 2.0 * pi);
  return theta < 0.0 ? theta + 2.0 * pi : theta;
}

namespace {

struct MomentCache {
  std::mutex lock;
  std::map<std::tuple<double, double, double, int, bool>, std::vector<Complex>> entries;
};

MomentCache& moment_cache() {
  static MomentCache cache;
  return cache;
}

}  // namespace

KadenVelocity::KadenVelocity(KadenSheet sheet, quad::QuadConfig cfg, Strategy strategy)
    : sheet_(sheet), cfg_(std::move(cfg)), strategy_(strategy) {
  cfg_.validate();
}

std::pair<double, double> KadenVelocity::nearest(Complex z) const {
  const double r = std::abs(z);
  auto dist = [&](double s) { return std::abs(z - spiral_point(sheet_, s)); };
  const double d0 = dist(r);
  // |z - Z(s)| >= | |z| - s |: the minimiser lies within d0 of r, and
  // anything farther than r/2 away is irrelevant for pole detection.
  const double reach = std::min(d0, 0.5 * r);
  const double lo = r - reach;
  const double hi = r + reach;
  const double turns = std::abs(spiral_angle(sheet_, lo) - spiral_angle(sheet_, hi)) / (2.0 * pi);
  const int samples = 64 + static_cast<int>(std::min(16.0 * turns, 1e5));
  double best_s = r;
  double best_d = d0;
  const double step = (hi - lo) / samples;
  for (int i = 0; i <= samples; ++i) {
    const double s = lo + step * i;
    const double d = dist(s);
    if (d < best_d) {
      best_d = d;
      best_s = s;
    }
  }
  // golden-section refinement around the best sample
  double a = std::max(lo, best_s - step);
  double b = std::min(hi, best_s + step);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = dist(c);
  double fd = dist(d);
  for (int it = 0; it < 100 && (b - a) > 1e-15 * r; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = dist(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = dist(d);
    }
  }
  const double s_ref = 0.5 * (a + b);
  const double d_ref = dist(s_ref);
  if (d_ref < best_d) return {s_ref, d_ref};
  return {best_s, best_d};
}

VelocitySample KadenVelocity::operator()(Complex z) const {
  const double r = std::abs(z);
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("Kaden velocity is undefined at the origin");
  const auto [s_near, distance] = nearest(z);
  if (distance < kSpiralPoleTolerance) {
    throw PoleError("point lies within 1e-8 of the spiral", s_near, distance);
  }

  const double a = sheet_.params().alpha();
  const double mu = sheet_.params().mu();
  const double t = sheet_.t();
  const Complex zbar = std::conj(z);
  const bool graded = strategy_ == Strategy::Graded;
  const double q = graded ? 0.5 : 0.25;
  const double rho = q * r;
  const double target = cfg_.tolerance(std::pow(r, a - 1.0));

  // Multipole part: (i / 2 pi) sum_k conj(m_k) / zbar^(k+1), |m_k| <= rho^(k+a).
  int terms = 1;
  while (std::pow(rho, a) * std::pow(q, terms) / ((1.0 - q) * r) > 0.1 * target && terms < 400) ++terms;
  const std::tuple<double, double, double, int, bool> key{mu, t, rho, terms, graded};
  std::vector<Complex> moments;
  MomentCache& cache = moment_cache();
  {
    std::lock_guard<std::mutex> guard(cache.lock);
    auto it = cache.entries.find(key);
    if (it != cache.entries.end()) moments = it->second;
  }
  double error = 0.0;
  bool converged = true;
  if (moments.empty()) {
    // moments normalised by rho^(k + a)
    moments.push_back(1.0);
    quad::QuadConfig mcfg = cfg_;
    mcfg.abs_tol = 0.1 * target * r / (terms * std::pow(rho, a));
    if (graded) mcfg.abs_tol = std::max(mcfg.abs_tol, 1e-11);
    for (int k = 1; k < terms; ++k) {
      const auto m = graded ? sheet_power_integral_graded(sheet_, k, rho, mcfg, rho)
                            : sheet_power_integral(Sheet(sheet_), k, 0.0, rho, mcfg, rho);
      moments.push_back(m.value);
      converged = converged && m.converged;
    }
    if (converged) {
      std::lock_guard<std::mutex> guard(cache.lock);
      if (cache.entries.size() > 4096) cache.entries.clear();
      cache.entries[key] = moments;
    }
  }
  // conj(m_k) / zbar^(k+1) = rho^a conj(mhat_k) q^k e^{i (k+1) phi} / r
  Complex inner{};
  const Complex turn = z / r;
  Complex factor = std::pow(rho, a) * turn / r;
  for (const Complex& m : moments) {
    inner += std::conj(m) * factor;
    factor *= q * turn;
  }
  error += std::pow(rho, a) * std::pow(q, terms) / ((1.0 - q) * r);

  // Along-spiral part over (rho, inf). Where the phase still turns fast the
  // range is cut into panels of equal phase, i.e. uniform in u = s^(-1/mu).
  auto integrand = [&](double s) {
    return a * std::pow(s, a - 1.0) / (zbar - s * std::polar(1.0, -spiral_angle(sheet_, s)));
  };
  const double panel_u = 4.0 * pi * pi / (t * cfg_.period_panels);
  const double u_rho = std::pow(rho, -1.0 / mu);
  const double u_c = 2.0 * pi * quad::kCrossoverPeriods * 2.0 * pi / t;  // phase = kCrossoverPeriods turns
  std::vector<double> cuts = {rho};
  double s_end = rho;
  if (u_rho > u_c) {
    const long count = static_cast<long>(std::ceil((u_rho - u_c) / panel_u));
    if (count > 2'000'000) throw DomainError("Kaden velocity: too many phase panels at this radius");
    for (long j = 1; j <= count; ++j) {
      const double u = std::max(u_c, u_rho - panel_u * static_cast<double>(j));
      cuts.push_back(std::pow(u, -mu));
    }
    s_end = cuts.back();
  }
  std::vector<double> extra;
  for (double bp : {r, s_near, s_near - 4.0 * distance, s_near + 4.0 * distance}) {
    if (bp > rho) extra.push_back(bp);
  }
  std::vector<double> tail_breaks;
  for (double bp : extra) {
    if (bp < s_end) {
      cuts.push_back(bp);
    } else {
      tail_breaks.push_back(bp);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  quad::QuadConfig sub = cfg_;
  sub.abs_tol = target / static_cast<double>(cuts.size() + 1);
  quad::ComplexIntegralResult outer;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    outer += quad::integrate_finite(quad::ComplexFunction(integrand), cuts[i - 1], cuts[i], sub);
  }
  outer += quad::integrate_halfline(quad::ComplexFunction(integrand), s_end, a - 2.0, sub,
                                    {.breakpoints = tail_breaks});

  VelocitySample out;
  out.point = z;
  out.vector = to_vec(kI * (inner + outer.value) / (2.0 * pi));
  out.method = VelocityMethod::Quadrature;
  out.error_estimate = (error + outer.error_estimate) / (2.0 * pi);
  out.converged = converged && outer.converged;
  return out;
}

VelocitySample kaden_profile(Complex z, const SheetMu& params, const quad::QuadConfig& cfg) {
  return KadenVelocity(KadenSheet(params, 1.0), cfg)(z);
}

// ---------------------------------------------------------------------------
// Velocity matching at mu = 2/3

double matching_integrand(double gamma, double t, double offset) {
  const double u = offset;
  const double g3 = gamma * gamma * gamma;
  const double theta = -u * (3.0 * gamma * gamma + 3.0 * gamma * u + u * u) / (2.0 * pi * g3 * t * t * t);
  const double half_sin = std::sin(0.5 * theta);
  const double t2 = t * t;
  const Complex den(-u * (2.0 * gamma + u) + 2.0 * t2 * half_sin * half_sin, -t2 * std::sin(theta));
  const double beta = 3.0 / (2.0 * pi * gamma * gamma);
  return std::real(Complex(2.0 * gamma, -beta) / den);
}

MatchingResult matching_lhs(double gamma, const quad::QuadConfig& cfg) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be a finite positive number");
  cfg.validate();
  MatchingResult out;
  out.gamma = gamma;
  out.rhs = 1.0 / pi;

  // Below t* = gamma/2 the kernel 1/D expands geometrically in (t/gamma)^2 e^{i theta},
  // leaving integrals of t^(2k) exp(i k t^-3 / 2 pi) handled by the phase substitution.
  const double t_star = 0.5 * gamma;
  const double beta = 3.0 / (2.0 * pi * gamma * gamma);
  const Complex lead = Complex(2.0 * gamma, -beta) / (gamma * gamma);
  const double ratio = 0.25;
  quad::QuadConfig sub = cfg;
  sub.abs_tol = 0.25 * cfg.abs_tol;
  Complex series = lead * t_star;  // k = 0
  double inner_error = 0.0;
  bool inner_ok = true;
  int k = 1;
  for (; k < 200; ++k) {
    const double remainder = std::abs(lead) * t_star * std::pow(ratio, k) / (1.0 - ratio);
    if (remainder < 0.1 * sub.abs_tol) break;
    const double c = k / (2.0 * pi);
    const auto ik = quad::integrate_power_phase([k](double s) { return std::pow(s, 2.0 * k); }, c, 3.0,
                                                {0.0, t_star}, sub, {.lower_exponent = 2.0 * k});
    const Complex shift = std::polar(std::pow(gamma, -2.0 * k), -k / (2.0 * pi * gamma * gamma * gamma));
    series += lead * shift * ik.value;
    inner_error += std::abs(lead) * std::pow(gamma, -2.0 * k) * ik.error_estimate;
    inner_ok = inner_ok && ik.converged;
  }
  inner_error += std::abs(lead) * t_star * std::pow(ratio, k) / (1.0 - ratio);
  const double inner = series.real();

  const auto pv = quad::pv_cauchy(
      quad::PoleFunction([gamma](double t, double offset) { return matching_integrand(gamma, t, offset); }), gamma,
      {t_star, INFINITY}, sub, {.decay_hint = -2.0});

  for (const auto& e : pv.excision_trace) out.excision_trace.push_back({e.epsilon, (inner + e.partial) / (2.0 * pi)});
  out.lhs = (inner + pv.value) / (2.0 * pi);
  out.residual = out.lhs - out.rhs;
  out.error_estimate = (inner_error + pv.error_estimate) / (2.0 * pi);
  out.converged = inner_ok && pv.converged && out.error_estimate <= cfg.tolerance(out.lhs);
  return out;
}

}  // namespace vsheet
