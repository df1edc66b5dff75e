#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vsheet/errors.hpp"
#include "vsheet/measures.hpp"

using namespace vsheet;
using std::numbers::pi;
using Complex = std::complex<double>;

TEST_CASE("sheet parameters") {
  CHECK(SheetMu(2.0 / 3.0).alpha() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(SheetMu(0.8).alpha() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(SheetMu::from_alpha(0.3).alpha() == 0.3);
  CHECK_THROWS_AS(SheetMu(0.5), DomainError);
  CHECK_THROWS_AS(SheetMu(1.0), DomainError);
  CHECK_THROWS_AS(SheetMu(1.5), DomainError);
  CHECK_THROWS_AS(SheetMu::from_alpha(1.0), DomainError);
  CHECK_THROWS_AS(KadenSheet(SheetMu(0.8), 0.0), DomainError);
}

TEST_CASE("density") {
  CHECK(density(TimeZeroSheet{SheetMu::from_alpha(0.5)}, 1.0) == doctest::Approx(0.5));
  CHECK(density(KadenSheet(SheetMu(2.0 / 3.0), 1.0), 4.0) == doctest::Approx(0.25));
  CHECK(density(TimeZeroSheet{SheetMu::from_alpha(0.75)}, 1.0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(density(TimeZeroSheet{SheetMu(0.8)}, 0.0), DomainError);
  CHECK_THROWS_AS(density(TimeZeroSheet{SheetMu(0.8)}, -1.0), DomainError);
}

TEST_CASE("spiral geometry") {
  const KadenSheet k(SheetMu(2.0 / 3.0), 1.0);
  const Complex z = spiral_point(k, 1.0);
  CHECK(std::arg(z) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-14));
  CHECK(std::abs(z) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(spiral_point(k, 0.0), DomainError);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mu_dist(0.51, 0.99), t_dist(0.1, 5), s_dist(0.01, 10);
  for (int i = 0; i < 50; ++i) {
    const KadenSheet sheet(SheetMu(mu_dist(rng)), t_dist(rng));
    const double s1 = s_dist(rng), s2 = s_dist(rng);
    CHECK(std::abs(spiral_point(sheet, s1)) == doctest::Approx(s1).epsilon(1e-14));
    if (s1 != s2) CHECK((spiral_angle(sheet, std::min(s1, s2)) > spiral_angle(sheet, std::max(s1, s2))));
    // cumulative vorticity at the point of modulus s is s^alpha
    CHECK(ball_mass(sheet, std::abs(spiral_point(sheet, s1))) ==
          doctest::Approx(std::pow(s1, sheet.params().alpha())).epsilon(1e-13));
  }
}

TEST_CASE("ball mass") {
  CHECK(ball_mass(TimeZeroSheet{SheetMu::from_alpha(0.5)}, 1.0) == 1.0);
  CHECK(ball_mass(KadenSheet(SheetMu(2.0 / 3.0), 1.0), 4.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(ball_mass(TimeZeroSheet{SheetMu(0.8)}, 0.01) == doctest::Approx(0.0316227766).epsilon(1e-9));
  CHECK_THROWS_AS(ball_mass(TimeZeroSheet{SheetMu(0.8)}, 0.0), DomainError);

  // property: the density integrates to the ball mass
  quad::QuadConfig cfg;
  for (double mu : {0.55, 2.0 / 3.0, 0.8, 0.95}) {
    for (double r : {0.01, 1.0, 30.0}) {
      const Sheet sheet = TimeZeroSheet{SheetMu(mu)};
      const double a = SheetMu(mu).alpha();
      auto q = quad::integrate_finite(quad::RealFunction([&](double s) { return density(sheet, s); }), 0.0, r, cfg,
                                      {.lower = a - 1.0});
      CHECK(q.value == doctest::Approx(ball_mass(sheet, r)).epsilon(1e-11));
    }
  }
}

TEST_CASE("pushforward integrals") {
  quad::QuadConfig cfg;
  const Sheet half = TimeZeroSheet{SheetMu::from_alpha(0.5)};
  auto one = pushforward_integral(half, [](Complex) { return Complex(1.0); }, {.lower = 0.0, .upper = 2.0}, cfg);
  CHECK(std::abs(one.value - ball_mass(half, 2.0)) < 1e-11);
  auto ident = pushforward_integral(half, [](Complex u) { return u; }, {.lower = 0.0, .upper = 1.0, .power_at_zero = 1.0},
                                    cfg);
  CHECK(std::abs(ident.value - 1.0 / 3.0) < 1e-12);
  auto inv = pushforward_integral(half, [](Complex u) { return 1.0 / u; },
                                  {.lower = 1.0, .upper = INFINITY, .power_at_infinity = -1.0}, cfg);
  CHECK(std::abs(inv.value - 1.0) < 1e-10);

  // the spiral's ball mass through the pushforward
  const Sheet kaden = KadenSheet(SheetMu(0.8), 2.0);
  auto km = pushforward_integral(kaden, [](Complex) { return Complex(1.0); }, {.lower = 0.0, .upper = 1.5}, cfg);
  CHECK(std::abs(km.value - ball_mass(kaden, 1.5)) < 1e-11);
}

TEST_CASE("sheet power integrals") {
  quad::QuadConfig cfg;
  const Sheet tz = TimeZeroSheet{SheetMu::from_alpha(0.5)};
  CHECK(std::abs(sheet_power_integral(tz, 1, 0.0, 1.0, cfg).value - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(sheet_power_integral(tz, -1, 1.0, INFINITY, cfg).value - 1.0) < 1e-15);
  CHECK_THROWS_AS(sheet_power_integral(tz, -1, 0.0, 1.0, cfg), DomainError);
  CHECK_THROWS_AS(sheet_power_integral(tz, 0, 1.0, INFINITY, cfg), DomainError);

  // two independent strategies for the spiral's first inner moment
  const KadenSheet k(SheetMu(2.0 / 3.0), 1.0);
  auto linearised = sheet_power_integral(k, 1, 0.0, 1.0, cfg);
  auto graded = sheet_power_integral_graded(k, 1, 1.0, cfg);
  CHECK(linearised.converged);
  CHECK(std::abs(linearised.value - graded.value) < 1e-8);
  CHECK(std::abs(linearised.value) <= 2.0 / 3.0);

  // against a plain pushforward of u on a window where nothing oscillates fast
  auto window = sheet_power_integral(k, 2, 0.5, 3.0, cfg);
  auto plain = pushforward_integral(k, [](Complex u) { return u * u; }, {.lower = 0.5, .upper = 3.0}, cfg);
  CHECK(std::abs(window.value - plain.value) < 1e-11);

  auto outer = sheet_power_integral(k, -1, 1.0, INFINITY, cfg);
  auto outer_plain = pushforward_integral(k, [](Complex u) { return 1.0 / u; },
                                          {.lower = 1.0, .upper = INFINITY, .power_at_infinity = -1.0}, cfg);
  CHECK(std::abs(outer.value - outer_plain.value) < 1e-10);
  CHECK(std::abs(outer.value) <= 2.0);
}
