#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vsheet/errors.hpp"
#include "vsheet/velocity.hpp"

using namespace vsheet;
using std::numbers::pi;
using Complex = std::complex<double>;

namespace {

const SheetMu kHalf = SheetMu(2.0 / 3.0);
const SheetMu kThreeQuarters = SheetMu(0.8);

double rel_diff(const Vec2& a, const Vec2& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]) / std::hypot(b[0], b[1]);
}

Complex random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(0.05, 5.0), angle(0.05, 2 * pi - 0.05);
  return std::polar(radius(rng), angle(rng));
}

}  // namespace

TEST_CASE("time-zero velocity at (0,1)") {
  quad::QuadConfig cfg;
  // int_0^inf s^(-+1/2) / (1 + s^2) ds = pi / sqrt 2 gives both components
  const double expected = -1.0 / (4.0 * std::sqrt(2.0));
  const auto v = velocity_timezero({0, 1}, kHalf, cfg);
  CHECK(v.converged);
  CHECK(std::abs(v.vector[0] - expected) < 1e-12);
  CHECK(std::abs(v.vector[1] - expected) < 1e-12);
  const auto c = velocity_timezero_closed({0, 1}, kHalf);
  CHECK(std::abs(c.vector[0] - expected) < 1e-15);
  CHECK(std::abs(c.vector[1] - expected) < 1e-15);

  CHECK_THROWS_AS(velocity_timezero({1, 0}, kHalf, cfg), DomainError);
  CHECK_THROWS_AS(velocity_timezero({0, 0}, kHalf, cfg), DomainError);
  CHECK_NOTHROW(velocity_timezero({-1, 0}, kHalf, cfg));
}

TEST_CASE("closed form matches quadrature") {
  quad::QuadConfig cfg;
  std::mt19937_64 rng(11);
  for (const SheetMu& p : {kHalf, kThreeQuarters, SheetMu(0.55)}) {
    for (int i = 0; i < 10; ++i) {
      const Complex x = random_point(rng);
      CHECK(rel_diff(velocity_timezero(x, p, cfg).vector, velocity_timezero_closed(x, p).vector) < 1e-10);
    }
  }
}

TEST_CASE("property: homogeneity and parity") {
  quad::QuadConfig cfg;
  std::mt19937_64 rng(12345);
  for (const SheetMu& p : {kHalf, kThreeQuarters}) {
    const double a = p.alpha();
    for (int i = 0; i < 20; ++i) {
      const Complex x = random_point(rng);
      const Vec2 v = velocity_timezero(x, p, cfg).vector;
      for (double t : {2.0, 1.0 / 3.0}) {
        const Vec2 vt = velocity_timezero(t * x, p, cfg).vector;
        const double f = std::pow(t, a - 1.0);
        CHECK(rel_diff(vt, {f * v[0], f * v[1]}) < 1e-8);
      }
      const Vec2 m = velocity_timezero(std::conj(x), p, cfg).vector;
      CHECK(std::abs(m[0] + v[0]) <= 1e-10 * std::hypot(v[0], v[1]));
      CHECK(std::abs(m[1] - v[1]) <= 1e-10 * std::hypot(v[0], v[1]));
    }
  }
  // the literal example at (0,2) vs (0,1)
  const Vec2 v1 = velocity_timezero({0, 1}, kHalf, cfg).vector;
  const Vec2 v2 = velocity_timezero({0, 2}, kHalf, cfg).vector;
  CHECK(rel_diff(v2, {v1[0] / std::sqrt(2.0), v1[1] / std::sqrt(2.0)}) < 1e-10);
}

TEST_CASE("PV lemma") {
  quad::QuadConfig cfg;
  CHECK(std::abs(pv_lemma_value(0.5, cfg).value) < 1e-9);
  CHECK(pv_lemma_value(0.75, cfg).value < 0.0);
  CHECK(std::abs(pv_lemma_value(0.25, cfg).value - pi) < 1e-8);
  for (int i = 1; i <= 9; ++i) {
    const double a = 0.1 * i;
    const auto r = pv_lemma_value(a, cfg);
    CHECK(r.converged);
    CHECK(r.path_difference < 1e-9);
    CHECK(std::abs(r.value - pi / std::tan(pi * a)) < 1e-8);
    if (i < 5) CHECK(r.value > 0.0);
    if (i > 5) CHECK(r.value < 0.0);
  }
  CHECK_THROWS_AS(pv_lemma_value(1.5, cfg), DomainError);
  CHECK_THROWS_AS(pv_lemma_value(0.0, cfg), DomainError);
}

TEST_CASE("boundary traces") {
  quad::QuadConfig cfg;
  const Vec2 up = trace_above(1.0, kHalf, cfg);
  const Vec2 down = trace_below(1.0, kHalf, cfg);
  CHECK(up[0] == doctest::Approx(-0.25));
  CHECK(std::abs(up[1]) < 1e-10);
  CHECK(down[0] == doctest::Approx(0.25));
  const Vec2 q = trace_above(1.0, kThreeQuarters, cfg);
  CHECK(std::abs(q[0] + 0.375) < 1e-14);
  CHECK(std::abs(q[1] + 0.375) < 1e-9);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> sd(0.01, 10);
  for (int i = 0; i < 10; ++i) {
    const double s = sd(rng);
    const Vec2 a = trace_above_closed(s, kThreeQuarters);
    const Vec2 b = trace_below_closed(s, kThreeQuarters);
    CHECK(a[1] == b[1]);
    CHECK(a[0] == -b[0]);
  }
  CHECK_THROWS_AS(trace_above(0.0, kHalf, cfg), DomainError);
}

TEST_CASE("trace limits from off-sheet velocities") {
  quad::QuadConfig cfg;
  const std::vector<double> schedule = {1e-1, 1e-2, 1e-3, 1e-4};
  for (const SheetMu& p : {kHalf, kThreeQuarters}) {
    for (double s : {0.5, 1.0, 2.0}) {
      const auto rep = trace_limit_check(s, p, schedule, cfg);
      CHECK(rep.above.distance < 1e-4);
      CHECK(rep.below.distance < 1e-4);
    }
  }
  const auto four = trace_limit_check(4.0, kHalf, schedule, cfg);
  CHECK(std::abs(four.above.limit[0] + 0.125) < 1e-4);
  CHECK(std::abs(four.below.limit[0] - 0.125) < 1e-4);
  const auto v2 = trace_limit_check(1.0, kThreeQuarters, schedule, cfg);
  CHECK(std::abs(v2.above.limit[1] + 0.375) < 1e-4);
  CHECK(std::abs(v2.below.limit[1] + 0.375) < 1e-4);
  CHECK_THROWS_AS(trace_limit_check(1.0, kHalf, {1e-2, 1e-1}, cfg), DomainError);
}

TEST_CASE("Kaden profile: two strategies and scaling") {
  quad::QuadConfig cfg;
  const KadenSheet sheet(kHalf, 1.0);
  const auto a = KadenVelocity(sheet, cfg, KadenVelocity::Strategy::Linearised)({0, 2});
  const auto b = KadenVelocity(sheet, cfg, KadenVelocity::Strategy::Graded)({0, 2});
  CHECK(a.converged);
  CHECK(rel_diff(a.vector, b.vector) < 1e-8);

  const double mu = kHalf.mu();
  for (double t : {4.0, 0.5}) {
    for (Complex x : {Complex(0, 2), Complex(-1.5, 0.3), Complex(0.7, -0.9)}) {
      const Vec2 direct = KadenVelocity(KadenSheet(kHalf, t), cfg)(x).vector;
      const Vec2 w = kaden_profile(x / std::pow(t, mu), kHalf, cfg).vector;
      const double f = std::pow(t, mu - 1.0);
      CHECK(rel_diff(direct, {f * w[0], f * w[1]}) < 1e-7);
    }
  }
}

TEST_CASE("Kaden velocity tends to the time-zero field as t -> 0") {
  quad::QuadConfig cfg;
  for (Complex x : {Complex(0, 1), Complex(-2, 0.5), Complex(1, -1)}) {
    const Vec2 k = KadenVelocity(KadenSheet(kThreeQuarters, 1e-10), cfg)(x).vector;
    const Vec2 z = velocity_timezero_closed(x, kThreeQuarters).vector;
    CHECK(rel_diff(k, z) < 1e-6);
  }
}

TEST_CASE("Kaden spiral poles") {
  quad::QuadConfig cfg;
  const KadenSheet sheet(kHalf, 1.0);
  const KadenVelocity w(sheet, cfg);
  const Complex on = spiral_point(sheet, 1.3);
  try {
    w(on);
    FAIL("expected PoleError");
  } catch (const PoleError& e) {
    CHECK(std::abs(e.nearest_parameter() - 1.3) < 1e-6);
    CHECK(e.distance() < 1e-8);
  }
  const auto [s, d] = w.nearest(on * 1.01);
  CHECK(d < 0.02);
  CHECK(std::abs(s - 1.3) < 0.03);
  CHECK_THROWS_AS(w(Complex(0, 0)), DomainError);

  const double angle = spiral_crossing_angle(sheet, 0.5);
  CHECK(angle >= 0.0);
  CHECK(angle < 2 * pi);
  CHECK(std::abs(std::polar(0.5, angle) - spiral_point(sheet, 0.5)) < 1e-12);
}

TEST_CASE("matching integrand matches the raw formula away from the pole") {
  for (double gamma : {0.7, 1.0, 2.0}) {
    for (double t : {0.3, 0.8, 1.7, 5.0}) {
      if (std::abs(t - gamma) < 0.05) continue;
      const double th = (std::pow(t, -3) - std::pow(gamma, -3)) / (2 * pi);
      const double num = 2 * std::pow(gamma, 3) - 2 * gamma * t * t * std::cos(th) +
                         3 / (2 * pi) * std::pow(gamma, -2) * t * t * std::sin(th);
      const double den = std::pow(gamma, 4) + std::pow(t, 4) - 2 * gamma * gamma * t * t * std::cos(th);
      CHECK(matching_integrand(gamma, t, t - gamma) == doctest::Approx(num / den).epsilon(1e-11));
    }
  }
}

TEST_CASE("matching at gamma = 1 against a brute-force oracle") {
  // Oracle for the eps = 0.1 partial, built only from the raw integrand:
  //  * (0, 0.01): the oscillating terms contribute O(t^6); the constant part is 2/gamma
  //  * (0.01, 0.9): Simpson on panels between consecutive full turns of the phase
  //  * (1.1, 1e4): Simpson in log t; beyond 1e4 the integrand is c/t^2
  const double gamma = 1.0;
  auto raw = [&](double t) { return matching_integrand(gamma, t, t - gamma); };
  auto simpson = [](auto f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
  };
  double oracle = 2.0 / gamma * 0.01;
  const double phase0 = std::pow(0.01, -3.0) / (2 * pi);
  double left = 0.01;
  for (long j = 1;; ++j) {
    const double ph = phase0 - 2 * pi * j;
    double right = ph > 0 ? std::pow(2 * pi * ph, -1.0 / 3.0) : 0.9;
    if (right >= 0.9 || ph <= 0) right = 0.9;
    oracle += simpson(raw, left, right, 128);
    left = right;
    if (right >= 0.9) break;
  }
  oracle += simpson([&](double x) { return raw(std::exp(x)) * std::exp(x); }, std::log(1.1), std::log(1e4), 400000);
  const double th_inf = -1.0 / (2 * pi);
  oracle += (-2 * gamma * std::cos(th_inf) + 3 / (2 * pi) * std::sin(th_inf)) / 1e4;
  oracle /= 2 * pi;

  quad::QuadConfig cfg;
  const auto m = matching_lhs(gamma, cfg);
  CHECK(m.converged);
  REQUIRE(m.excision_trace.size() == 9);
  CHECK(std::abs(m.excision_trace[0].partial - oracle) < 1e-8);
  CHECK(m.residual == m.lhs - 1.0 / pi);
  CHECK(m.rhs == 1.0 / pi);
  // the trace settles monotonically toward the limit
  for (std::size_t i = 1; i < m.excision_trace.size(); ++i) {
    CHECK(m.excision_trace[i].partial > m.excision_trace[i - 1].partial);
    CHECK(m.excision_trace[i].partial <= m.lhs + 1e-12);
  }
}

TEST_CASE("matching at gamma = 2 is stable across configurations") {
  quad::QuadConfig a;
  quad::QuadConfig b = a.tightened(10);
  b.period_panels = 4;
  const auto ma = matching_lhs(2.0, a);
  const auto mb = matching_lhs(2.0, b);
  CHECK(ma.converged);
  CHECK(std::isfinite(ma.lhs));
  CHECK(std::abs(ma.lhs - mb.lhs) < 1e-10);
  CHECK_THROWS_AS(matching_lhs(0.0, a), DomainError);
}
