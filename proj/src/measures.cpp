#include "vsheet/measures.hpp"

#include <cmath>
#include <numbers>

#include "vsheet/errors.hpp"

namespace vsheet {

namespace {

using Complex = std::complex<double>;
using std::numbers::pi;

void require_positive(double s, const char* what) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError(std::string(what) + " must be a finite positive number");
}

}  // namespace

SheetMu::SheetMu(double mu) : mu_(mu), alpha_(2.0 - 1.0 / mu) {
  if (!(mu > 0.5 && mu < 1.0)) throw DomainError("mu must lie strictly inside (1/2, 1)");
}

SheetMu SheetMu::from_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie strictly inside (0, 1)");
  SheetMu p(1.0 / (2.0 - alpha));
  p.alpha_ = alpha;  // keep the requested value bit-exact
  return p;
}

KadenSheet::KadenSheet(SheetMu params, double t) : params_(params), t_(t) { require_positive(t, "t"); }

const SheetMu& sheet_params(const Sheet& sheet) {
  return std::visit(
      [](const auto& s) -> const SheetMu& {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, TimeZeroSheet>) {
          return s.params;
        } else {
          return s.params();
        }
      },
      sheet);
}

double density(const Sheet& sheet, double s) {
  require_positive(s, "s");
  const double a = sheet_params(sheet).alpha();
  return a * std::pow(s, a - 1.0);
}

double spiral_angle(const KadenSheet& sheet, double s) {
  require_positive(s, "s");
  return sheet.t() / (2.0 * pi) * std::pow(s, -1.0 / sheet.params().mu());
}

Complex spiral_point(const KadenSheet& sheet, double s) { return std::polar(s, spiral_angle(sheet, s)); }

Complex sheet_point(const Sheet& sheet, double s) {
  if (const auto* k = std::get_if<KadenSheet>(&sheet)) return spiral_point(*k, s);
  require_positive(s, "s");
  return {s, 0.0};
}

double ball_mass(const Sheet& sheet, double r) {
  require_positive(r, "r");
  return std::pow(r, sheet_params(sheet).alpha());
}

quad::ComplexIntegralResult pushforward_integral(const Sheet& sheet, const std::function<Complex(Complex)>& f,
                                                 const RadialRange& range, const quad::QuadConfig& cfg) {
  if (!(range.lower >= 0.0 && range.lower < range.upper)) throw DomainError("radial range must satisfy 0 <= lower < upper");
  const double a = sheet_params(sheet).alpha();
  auto integrand = [&](double s) { return f(sheet_point(sheet, s)) * density(sheet, s); };
  quad::EndpointExponents ends;
  if (range.lower == 0.0) ends.lower = range.power_at_zero + a - 1.0;
  if (std::isinf(range.upper)) {
    if (!range.power_at_infinity) throw DomainError("pushforward over an unbounded range needs power_at_infinity");
    return quad::integrate_halfline(quad::ComplexFunction(integrand), range.lower, *range.power_at_infinity + a - 1.0,
                                    cfg, {.lower_exponent = ends.lower});
  }
  return quad::integrate_finite(quad::ComplexFunction(integrand), range.lower, range.upper, cfg, ends);
}

quad::ComplexIntegralResult sheet_power_integral(const Sheet& sheet, int k, double lower, double upper,
                                                 const quad::QuadConfig& cfg, double scale) {
  if (!(lower >= 0.0 && lower < upper)) throw DomainError("sheet_power_integral requires 0 <= lower < upper");
  require_positive(scale, "scale");
  const double a = sheet_params(sheet).alpha();
  const double power = k + a;  // never zero: alpha is not an integer
  if (lower == 0.0 && power < 0.0) throw DomainError("u^k is not integrable at the origin for k < 0");
  if (std::isinf(upper) && power > 0.0) throw DomainError("u^k is not integrable at infinity for k >= 0");
  const double lo = lower / scale;
  const double hi = upper / scale;

  quad::ComplexIntegralResult out;
  const auto* kaden = std::get_if<KadenSheet>(&sheet);
  if (kaden == nullptr || k == 0) {
    const double top = std::isinf(hi) ? 0.0 : std::pow(hi, power);
    const double bottom = lo == 0.0 ? 0.0 : std::pow(lo, power);
    out.value = a * (top - bottom) / power;
    return out;
  }
  const double p = 1.0 / kaden->params().mu();
  // in sigma = s / scale the phase coefficient picks up scale^-p
  const double c = k * kaden->t() / (2.0 * pi) * std::pow(scale, -p);
  auto amplitude = [a, power](double sigma) { return a * std::pow(sigma, power - 1.0); };
  quad::PowerPhaseOptions opts;
  if (lo == 0.0) opts.lower_exponent = power - 1.0;
  double top = hi;
  double dropped = 0.0;
  if (std::isinf(hi)) {
    // |integral beyond T| <= a T^power / |power|; for steep powers truncate there
    const double cut = std::pow(0.1 * cfg.abs_tol * std::abs(power) / a, 1.0 / power);
    if (std::isfinite(cut) && cut < 1e3 * std::max(lo, 1.0) && cut > lo) {
      top = cut;
      dropped = a * std::pow(cut, power) / std::abs(power);
    } else {
      opts.decay_hint = power - 1.0;
    }
  }
  auto res = quad::integrate_power_phase(amplitude, c, p, {lo, top}, cfg, opts);
  res.error_estimate += dropped;
  return res;
}

quad::ComplexIntegralResult sheet_power_integral_graded(const KadenSheet& sheet, int k, double upper,
                                                        const quad::QuadConfig& cfg, double scale) {
  if (k < 0) throw DomainError("graded sheet integral needs k >= 0");
  require_positive(scale, "scale");
  const double a = sheet.params().alpha();
  const double power = k + a;
  const double p = 1.0 / sheet.params().mu();
  auto amplitude = [a, power](double sigma) { return a * std::pow(sigma, power - 1.0); };
  const double hi = upper / scale;
  if (k == 0) {
    auto r = quad::integrate_finite(quad::RealFunction(amplitude), 0.0, hi, cfg, {.lower = power - 1.0});
    quad::ComplexIntegralResult out;
    out.value = r.value;
    out.error_estimate = r.error_estimate;
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    return out;
  }
  const double c = k * sheet.t() / (2.0 * pi) * std::pow(scale, -p);
  return quad::integrate_power_phase_graded(amplitude, c, p, hi, cfg);
}

}  // namespace vsheet
