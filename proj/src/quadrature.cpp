#include "vsheet/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "vsheet/errors.hpp"

namespace vsheet::quad {

namespace {

using Complex = std::complex<double>;
using std::numbers::pi;

// Gauss-Kronrod 10/21 nodes and weights (QUADPACK qk21).
constexpr std::array<double, 11> kNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208031315899, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kMachineEps = std::numeric_limits<double>::epsilon();
constexpr double kUnderflow = std::numeric_limits<double>::min();
constexpr long kMaxPanels = 2'000'000;

bool finite(double v) { return std::isfinite(v); }
bool finite(const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

std::string format_abscissa(double x) {
  std::ostringstream os;
  os.precision(17);
  os << "integrand returned a non-finite value at x = " << x;
  return os.str();
}

template <class T, class F>
T evaluate_checked(const F& f, double x) {
  T v = f(x);
  if (!finite(v)) throw QuadratureError(format_abscissa(x), x);
  return v;
}

template <class T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
};

template <class T>
struct ByError {
  bool operator()(const Segment<T>& l, const Segment<T>& r) const { return l.error < r.error; }
};

template <class T, class F>
Segment<T> kronrod21(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = evaluate_checked<T>(f, center);
  T gauss{};
  T kronrod = fc * kKronrodWeights[10];
  double abs_sum = std::abs(fc) * kKronrodWeights[10];
  std::array<T, 10> left{};
  std::array<T, 10> right{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kNodes[j];
    left[j] = evaluate_checked<T>(f, center - dx);
    right[j] = evaluate_checked<T>(f, center + dx);
    const T pair = left[j] + right[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(left[j]) + std::abs(right[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const T mean = kronrod * 0.5;
  double asc = kKronrodWeights[10] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j) {
    asc += kKronrodWeights[j] * (std::abs(left[j] - mean) + std::abs(right[j] - mean));
  }
  const double scale = std::abs(half);
  abs_sum *= scale;
  asc *= scale;
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  if (abs_sum > kUnderflow / (50.0 * kMachineEps)) err = std::max(50.0 * kMachineEps * abs_sum, err);
  return {a, b, kronrod * half, err};
}

template <class T, class F>
BasicIntegralResult<T> adaptive(const F& f, double a, double b, double abs_tol, double rel_tol,
                                int max_subdivisions) {
  BasicIntegralResult<T> out;
  if (a == b) return out;
  std::priority_queue<Segment<T>, std::vector<Segment<T>>, ByError<T>> heap;
  std::vector<Segment<T>> stuck;
  Segment<T> first = kronrod21<T>(f, a, b);
  out.evaluations = 21;
  T total = first.value;
  double err = first.error;
  heap.push(first);
  int subdivisions = 0;
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (heap.empty() || subdivisions >= max_subdivisions) break;
    Segment<T> s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (!(s.a < mid && mid < s.b)) {
      stuck.push_back(s);
      continue;
    }
    Segment<T> l = kronrod21<T>(f, s.a, mid);
    Segment<T> r = kronrod21<T>(f, mid, s.b);
    out.evaluations += 42;
    ++subdivisions;
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
  }
  // Positional summation keeps the result independent of heap internals.
  std::vector<Segment<T>> all = std::move(stuck);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  out.value = T{};
  out.error_estimate = 0.0;
  for (const auto& s : all) {
    out.value += s.value;
    out.error_estimate += s.error;
  }
  out.converged = out.error_estimate <= std::max(abs_tol, rel_tol * std::abs(out.value));
  return out;
}

int substitution_power(double exponent) {
  const double k = std::ceil(2.0 / (exponent + 1.0));
  return static_cast<int>(std::clamp(k, 1.0, 12.0));
}

bool needs_substitution(const std::optional<double>& exponent) {
  if (!exponent) return false;
  return *exponent < 0.0 || *exponent != std::floor(*exponent);
}

void check_exponent(const std::optional<double>& exponent) {
  if (exponent && !(*exponent > -1.0)) {
    throw DomainError("endpoint exponent must exceed -1 for an integrable singularity");
  }
}

// x = a + h u^k on [0, 1] (or b - h u^k when `from_upper`).
template <class T, class F>
BasicIntegralResult<T> graded(const F& f, double a, double b, double exponent, bool from_upper,
                              double abs_tol, double rel_tol, int max_subdivisions) {
  const int k = substitution_power(exponent);
  const double h = b - a;
  const double anchor = from_upper ? b : a;
  const double sign = from_upper ? -1.0 : 1.0;
  auto mapped = [&](double u) -> T {
    const double uk1 = std::pow(u, k - 1);
    const double x = anchor + sign * h * uk1 * u;
    if (x == anchor) return T{};
    return evaluate_checked<T>(f, x) * (h * k * uk1);
  };
  return adaptive<T>(mapped, 0.0, 1.0, abs_tol, rel_tol, max_subdivisions);
}

template <class T, class F>
BasicIntegralResult<T> finite_impl(const F& f, double a, double b, const QuadConfig& cfg,
                                   const EndpointExponents& ends) {
  if (a > b || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate_finite requires finite a <= b");
  }
  check_exponent(ends.lower);
  check_exponent(ends.upper);
  const bool lo = needs_substitution(ends.lower);
  const bool hi = needs_substitution(ends.upper);
  if (!lo && !hi) return adaptive<T>(f, a, b, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions);
  if (lo && hi) {
    const double mid = 0.5 * (a + b);
    auto out = graded<T>(f, a, mid, *ends.lower, false, 0.5 * cfg.abs_tol, cfg.rel_tol,
                         cfg.max_subdivisions);
    out += graded<T>(f, mid, b, *ends.upper, true, 0.5 * cfg.abs_tol, cfg.rel_tol,
                     cfg.max_subdivisions);
    return out;
  }
  return lo ? graded<T>(f, a, b, *ends.lower, false, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions)
            : graded<T>(f, a, b, *ends.upper, true, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions);
}

template <class T, class F>
BasicIntegralResult<T> halfline_impl(const F& f, double a, double decay, const QuadConfig& cfg,
                                     const HalflineOptions& opts) {
  cfg.validate();
  if (!(decay < -1.0)) throw DomainError("decay_hint must be < -1 for a convergent half-line integral");
  if (!std::isfinite(a)) throw DomainError("integrate_halfline requires a finite lower limit");

  std::vector<double> cuts;
  for (double bp : opts.breakpoints) {
    if (bp > a && std::isfinite(bp)) cuts.push_back(bp);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double start = std::max(a + 1.0, 2.0 * a);
  if (!cuts.empty()) start = std::max(start, 2.0 * cuts.back());
  cuts.push_back(start);

  const double pieces = static_cast<double>(cuts.size() + 1);
  QuadConfig sub = cfg;
  sub.abs_tol = cfg.abs_tol / pieces;

  BasicIntegralResult<T> out;
  double left = a;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    EndpointExponents ends;
    if (i == 0) ends.lower = opts.lower_exponent;
    out += finite_impl<T>(f, left, cuts[i], sub, ends);
    left = cuts[i];
  }

  // Tail [start, cutoff] in y with s = start * y^-q, so a pure power law
  // s^decay becomes constant in y.
  const double q = 1.0 / (-decay - 1.0);
  auto envelope = [&](double cutoff) {
    double c = 0.0;
    for (int j = 0; j < 8; ++j) {
      const double s = cutoff * std::pow(2.0, 0.5 * j);
      c = std::max(c, std::abs(evaluate_checked<T>(f, s)) * std::pow(s, -decay));
    }
    return 2.0 * c * std::pow(cutoff, decay + 1.0) / (-decay - 1.0);
  };
  const double target = std::max(sub.abs_tol, cfg.rel_tol * std::abs(out.value)) / 10.0;
  double cutoff = start * 10.0;
  double tail_bound = 0.0;
  if (cfg.tail_cutoff) {
    cutoff = std::max(*cfg.tail_cutoff, start);
    tail_bound = envelope(cutoff);
  } else {
    tail_bound = envelope(cutoff);
    while (tail_bound > target && cutoff < 1e250) {
      cutoff *= 10.0;
      tail_bound = envelope(cutoff);
    }
  }
  if (cutoff > start) {
    const double y_min = std::pow(start / cutoff, 1.0 / q);
    auto mapped = [&](double y) -> T {
      const double s = start * std::pow(y, -q);
      return evaluate_checked<T>(f, s) * (q * s / y);
    };
    out += adaptive<T>(mapped, y_min, 1.0, sub.abs_tol, sub.rel_tol, sub.max_subdivisions);
  }
  out.error_estimate += tail_bound;
  out.converged = out.converged && tail_bound <= 10.0 * target &&
                  out.error_estimate <= cfg.tolerance(std::abs(out.value));
  return out;
}

}  // namespace

std::vector<double> default_excision_schedule() {
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9};
}

void QuadConfig::validate() const {
  if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0)) throw DomainError("tolerances must be non-negative");
  if (abs_tol == 0.0 && rel_tol == 0.0) throw DomainError("abs_tol and rel_tol cannot both be zero");
  if (max_subdivisions <= 0) throw DomainError("max_subdivisions must be positive");
  if (period_panels <= 0) throw DomainError("period_panels must be positive");
  if (tail_cutoff && !(*tail_cutoff > 0.0)) throw DomainError("tail_cutoff must be positive");
  if (excision_schedule.empty()) throw DomainError("excision_schedule must not be empty");
  for (std::size_t i = 0; i < excision_schedule.size(); ++i) {
    if (!(excision_schedule[i] > 0.0)) throw DomainError("excision_schedule entries must be positive");
    if (i > 0 && !(excision_schedule[i] < excision_schedule[i - 1])) {
      throw DomainError("excision_schedule must be strictly decreasing");
    }
  }
}

double QuadConfig::tolerance(double magnitude) const {
  return std::max(abs_tol, rel_tol * std::abs(magnitude));
}

QuadConfig QuadConfig::tightened(double factor) const {
  QuadConfig c = *this;
  c.abs_tol /= factor;
  c.rel_tol /= factor;
  return c;
}

IntegralResult integrate_finite(const RealFunction& f, double a, double b, const QuadConfig& cfg,
                                const EndpointExponents& ends) {
  cfg.validate();
  return finite_impl<double>(f, a, b, cfg, ends);
}

ComplexIntegralResult integrate_finite(const ComplexFunction& f, double a, double b,
                                       const QuadConfig& cfg, const EndpointExponents& ends) {
  cfg.validate();
  return finite_impl<Complex>(f, a, b, cfg, ends);
}

IntegralResult integrate_halfline(const RealFunction& f, double a, double decay_hint,
                                  const QuadConfig& cfg, const HalflineOptions& opts) {
  return halfline_impl<double>(f, a, decay_hint, cfg, opts);
}

ComplexIntegralResult integrate_halfline(const ComplexFunction& f, double a, double decay_hint,
                                         const QuadConfig& cfg, const HalflineOptions& opts) {
  return halfline_impl<Complex>(f, a, decay_hint, cfg, opts);
}

Extrapolation richardson(std::span<const double> steps, std::span<const double> values,
                         std::span<const double> powers) {
  if (steps.size() != values.size() || values.empty()) {
    throw DomainError("richardson: steps and values must be non-empty and of equal length");
  }
  const std::size_t n = values.size();
  std::vector<std::vector<double>> table(n);
  Extrapolation out;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && !(steps[k] < steps[k - 1])) throw DomainError("richardson: steps must decrease");
    table[k].push_back(values[k]);
    const std::size_t depth = std::min(k, powers.size());
    for (std::size_t j = 1; j <= depth; ++j) {
      const double ratio = std::pow(steps[k - 1] / steps[k], powers[j - 1]);
      table[k].push_back(table[k][j - 1] + (table[k][j - 1] - table[k - 1][j - 1]) / (ratio - 1.0));
    }
    out.estimates.push_back(table[k].back());
  }
  out.value = out.estimates.back();
  if (n == 1) {
    out.spread = std::numeric_limits<double>::infinity();
  } else {
    out.spread = std::abs(out.estimates[n - 1] - out.estimates[n - 2]);
    if (n >= 3) out.spread = std::max(out.spread, std::abs(out.estimates[n - 2] - out.estimates[n - 3]));
  }
  return out;
}

IntegralResult pv_cauchy(const PoleFunction& f, double pole, Interval domain, const QuadConfig& cfg,
                         const PvOptions& opts) {
  cfg.validate();
  if (!(domain.lower < pole && pole < domain.upper)) {
    throw DomainError("pv_cauchy: pole must lie strictly inside the domain");
  }
  const bool unbounded = std::isinf(domain.upper);
  if (unbounded && !opts.decay_hint) throw DomainError("pv_cauchy: decay_hint required on a half-line");
  const double left = pole - domain.lower;
  const double right = domain.upper - pole;
  // The fold stays clear of the domain ends so that endpoint singularities are
  // met in the original variable, where t near the end is exact.
  const double half = 0.5 * std::min(left, right);
  const auto& schedule = cfg.excision_schedule;
  if (!(schedule.front() < half)) {
    throw DomainError("pv_cauchy: largest excision must be below half the pole's distance to the boundary");
  }

  auto at = [&](double t, double offset) {
    const double v = f(t, offset);
    if (!std::isfinite(v)) throw QuadratureError(format_abscissa(t), t);
    return v;
  };
  // Both abscissae are formed from the same exactly representable offset so
  // that rounding cannot break the symmetry of the pair.
  auto fold = [&](double u) {
    const double above = pole + u;
    const double offset = above - pole;
    return at(pole - offset, -offset) + at(above, offset);
  };

  const double pieces = static_cast<double>(2 + schedule.size());
  QuadConfig sub = cfg;
  sub.abs_tol = cfg.abs_tol / (2.0 * pieces);
  sub.rel_tol = cfg.rel_tol / 4.0;

  auto plain = [&](double t) { return at(t, t - pole); };
  IntegralResult outer =
      integrate_finite(RealFunction(plain), domain.lower, pole - half, sub, {.lower = opts.lower_exponent});
  if (unbounded) {
    outer += integrate_halfline(RealFunction(plain), pole + half, *opts.decay_hint, sub);
  } else {
    outer += integrate_finite(RealFunction(plain), pole + half, domain.upper, sub, {.upper = opts.upper_exponent});
  }

  IntegralResult out;
  out.evaluations = outer.evaluations;
  // Convergence is judged on the summed error estimate below.
  double integration_error = outer.error_estimate;
  double partial = outer.value;
  double upper_edge = half;
  std::vector<double> values;
  for (double eps : schedule) {
    IntegralResult band = integrate_finite(RealFunction(fold), eps, upper_edge, sub);
    partial += band.value;
    integration_error += band.error_estimate;
    out.evaluations += 2 * band.evaluations;
    out.excision_trace.push_back({eps, partial});
    values.push_back(partial);
    upper_edge = eps;
  }

  std::vector<double> powers;
  for (int j = 0; j < opts.extrapolation_terms; ++j) powers.push_back(2.0 * j + 1.0);
  const Extrapolation ex = richardson(schedule, values, powers);
  out.value = ex.value;
  out.error_estimate = ex.spread + integration_error;
  out.converged = std::isfinite(out.value) && out.error_estimate <= cfg.tolerance(out.value);
  return out;
}

IntegralResult pv_cauchy(const RealFunction& f, double pole, Interval domain, const QuadConfig& cfg,
                         const PvOptions& opts) {
  return pv_cauchy(PoleFunction([&f](double t, double) { return f(t); }), pole, domain, cfg, opts);
}

namespace {

// Integral over [u_start, u_end] (u_end may be infinite) of
// h(u) exp(i (c u + offset)), panel by panel along the period.
ComplexIntegralResult linear_phase(const RealFunction& h, double c, double offset, double u_start,
                                   double u_end, std::optional<double> start_exponent,
                                   double target, const QuadConfig& cfg) {
  auto integrand = [&](double u) { return h(u) * std::polar(1.0, c * u + offset); };
  const double period = 2.0 * pi / std::abs(c);
  double panel = period / cfg.period_panels;

  ComplexIntegralResult out;
  double stop = u_end;
  Complex tail{};
  double tail_bound = 0.0;
  if (std::isinf(u_end)) {
    // Tail by two integration-by-parts terms; the remainder is bounded by the next term.
    double upper = u_start + 8.0 * period;
    for (;;) {
      const double h0 = h(upper);
      const double far = h(2.0 * upper);
      if (h0 != 0.0 && std::abs(far) >= std::abs(h0)) {
        throw DomainError("power-phase amplitude does not decay after the phase substitution");
      }
      const double d = 1e-3 * upper;
      const double hp = h(upper + d);
      const double hm = h(upper - d);
      const double d1 = (hp - hm) / (2.0 * d);
      const double d2 = (hp - 2.0 * h0 + hm) / (d * d);
      tail_bound = 2.0 * std::abs(d2) / std::pow(std::abs(c), 3);
      const double panels = (upper - u_start) / panel;
      if (tail_bound <= target / 10.0 || panels > kMaxPanels) {
        const Complex ic(0.0, c);
        tail = std::polar(1.0, c * upper + offset) * (-h0 / ic + d1 / (ic * ic));
        out.converged = tail_bound <= target / 10.0;
        break;
      }
      upper = u_start + 2.0 * (upper - u_start);
    }
    stop = upper;
  }

  long count = static_cast<long>(std::ceil((stop - u_start) / panel));
  if (count > kMaxPanels) {
    count = kMaxPanels;
    out.converged = false;
  }
  count = std::max<long>(count, 1);
  panel = (stop - u_start) / static_cast<double>(count);
  QuadConfig sub = cfg;
  sub.abs_tol = target / (2.0 * static_cast<double>(count));
  sub.rel_tol = cfg.rel_tol * 0.1;
  for (long j = 0; j < count; ++j) {
    const double a = u_start + panel * static_cast<double>(j);
    const double b = (j + 1 == count) ? stop : a + panel;
    EndpointExponents ends;
    if (j == 0) ends.lower = start_exponent;
    out += finite_impl<Complex>(integrand, a, b, sub, ends);
  }
  out.value += tail;
  out.error_estimate += tail_bound;
  return out;
}

}  // namespace

ComplexIntegralResult integrate_power_phase(const RealFunction& g, double c, double p,
                                            Interval interval, const QuadConfig& cfg,
                                            const PowerPhaseOptions& opts) {
  cfg.validate();
  if (!(p > 0.0)) throw DomainError("integrate_power_phase requires p > 0");
  if (!(interval.lower >= 0.0 && interval.lower < interval.upper)) {
    throw DomainError("integrate_power_phase requires 0 <= lower < upper");
  }
  const bool unbounded = std::isinf(interval.upper);
  if (unbounded && !opts.decay_hint) throw DomainError("integrate_power_phase: decay_hint required on a half-line");

  auto amplitude = [&](double t) { return evaluate_checked<double>(g, t); };
  const Complex rotation = std::polar(1.0, opts.phase_offset);

  if (c == 0.0) {
    IntegralResult r = unbounded
                           ? integrate_halfline(RealFunction(amplitude), interval.lower, *opts.decay_hint, cfg,
                                                {.lower_exponent = opts.lower_exponent})
                           : integrate_finite(RealFunction(amplitude), interval.lower, interval.upper, cfg,
                                              {.lower = opts.lower_exponent});
    ComplexIntegralResult out;
    out.value = r.value * rotation;
    out.error_estimate = r.error_estimate;
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    return out;
  }

  const double crossover =
      opts.crossover.value_or(std::pow(std::abs(c) / (2.0 * pi * kCrossoverPeriods), 1.0 / p));
  const double sub_upper = std::min(crossover, interval.upper);
  const double direct_lower = std::max(interval.lower, crossover);
  const bool has_sub = interval.lower < sub_upper;
  const bool has_direct = direct_lower < interval.upper;

  QuadConfig half = cfg;
  if (has_sub && has_direct) half.abs_tol *= 0.5;

  ComplexIntegralResult out;
  if (has_direct) {
    auto f = [&](double t) { return amplitude(t) * std::polar(1.0, c * std::pow(t, -p) + opts.phase_offset); };
    const std::optional<double> lower_exp =
        direct_lower == interval.lower ? opts.lower_exponent : std::nullopt;
    if (unbounded) {
      out += integrate_halfline(ComplexFunction(f), direct_lower, *opts.decay_hint, half,
                                {.lower_exponent = lower_exp});
    } else {
      out += integrate_finite(ComplexFunction(f), direct_lower, interval.upper, half, {.lower = lower_exp});
    }
  }
  if (has_sub) {
    const double u_start = std::isinf(sub_upper) ? 0.0 : std::pow(sub_upper, -p);
    const double u_end = interval.lower > 0.0 ? std::pow(interval.lower, -p)
                                              : std::numeric_limits<double>::infinity();
    auto h = [&](double u) {
      return amplitude(std::pow(u, -1.0 / p)) * std::pow(u, -1.0 / p - 1.0) / p;
    };
    std::optional<double> start_exponent;
    if (u_start == 0.0) start_exponent = -(*opts.decay_hint + 1.0) / p - 1.0;
    // A pure relative tolerance has no scale here yet; fall back to a small absolute one.
    const double target = half.abs_tol > 0.0 ? half.abs_tol : half.rel_tol * 1e-3;
    out += linear_phase(h, c, opts.phase_offset, u_start, u_end, start_exponent, target, half);
  }
  out.converged = out.converged && out.error_estimate <= cfg.tolerance(std::abs(out.value));
  return out;
}

ComplexIntegralResult integrate_power_phase_graded(const RealFunction& g, double c, double p,
                                                   double upper, const QuadConfig& cfg,
                                                   double phase_offset) {
  cfg.validate();
  if (!(p > 0.0) || !(upper > 0.0) || !std::isfinite(upper)) {
    throw DomainError("integrate_power_phase_graded requires p > 0 and finite upper > 0");
  }
  auto amplitude = [&](double t) { return evaluate_checked<double>(g, t); };
  auto f = [&](double t) { return amplitude(t) * std::polar(1.0, c * std::pow(t, -p) + phase_offset); };
  if (c == 0.0) return finite_impl<Complex>(f, 0.0, upper, cfg, {});

  const double target = cfg.abs_tol;
  auto core_bound = [&](double t) {
    return 3.0 * std::abs(amplitude(t)) * std::pow(t, p + 1.0) / (std::abs(c) * p);
  };
  ComplexIntegralResult out;
  double hi = upper;
  for (int level = 0; level < 200; ++level) {
    const double lo = 0.5 * hi;
    if (core_bound(0.5 * lo) > core_bound(lo)) {
      throw DomainError("graded power-phase integration requires |g(t)| t^(p+1) increasing near 0");
    }
    // Pieces one local period wide, walking down from hi.
    auto period = [&](double t) { return 2.0 * pi / (std::abs(c) * p * std::pow(t, -p - 1.0)); };
    const double expected = (hi - lo) / period(lo);
    if (expected > kMaxPanels) {
      out.converged = false;
      out.error_estimate += core_bound(hi);
      return out;
    }
    QuadConfig sub = cfg;
    sub.abs_tol = 1e-2 * target / std::max(1.0, expected);
    double b = hi;
    while (b > lo) {
      const double a = std::max(lo, b - period(b));
      out += finite_impl<Complex>(f, a, b, sub, {});
      b = a;
    }
    const double bound = core_bound(lo);
    if (bound <= target / 10.0) {
      out.error_estimate += bound;
      out.converged = out.converged && out.error_estimate <= cfg.tolerance(std::abs(out.value));
      return out;
    }
    hi = lo;
  }
  out.converged = false;
  return out;
}

}  // namespace vsheet::quad
