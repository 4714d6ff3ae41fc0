#include <doctest.h>

#include <cmath>

#include "eternal/dopri5.hpp"
#include "eternal/errors.hpp"
#include "eternal/profile_ode.hpp"

using namespace eternal;

namespace {
const Params P1 = derive_params(2, 1.5, 3, 1);
}

TEST_CASE("rhs_profile by substitution") {
  auto [df, dw] = rhs_profile({1, 1, 0}, P1);
  CHECK(df == doctest::Approx(0));
  CHECK(dw == doctest::Approx(0));
  std::tie(df, dw) = rhs_profile({1, 1, -2}, P1);
  CHECK(df == doctest::Approx(-1));
  CHECK(dw == doctest::Approx(4.5));
  CHECK_THROWS_AS(rhs_profile({0.5, 0, 0}, P1), DegenerateState);
  CHECK_THROWS_AS(rhs_profile({0, 1, 0}, P1), DegenerateState);
}

TEST_CASE("origin series") {
  CHECK(origin_series_coefficient(P1) == doctest::Approx(0.125));
  CHECK(series_origin(P1, 1, 0.1).f == doctest::Approx(0.97515625).epsilon(1e-14));
  CHECK(series_origin(P1, 1, 1e-12).f == doctest::Approx(1.0));
  CHECK_THROWS_AS(series_origin(P1, 1, 10), SeriesOutOfRange);
  const double xi = series_handoff_radius(P1, 1, 1e-8);
  CHECK(origin_series_coefficient(P1) * std::pow(xi, P1.origin_exponent()) ==
        doctest::Approx(1e-8));
}

TEST_CASE("origin series residual vanishes faster than the retained term") {
  for (const auto& P : {P1, derive_params(3, 2, 2, 0.3), derive_params(2, 1.2, 1, 0.9)}) {
    double prev = INFINITY, first = 0;
    for (double xi : {1e-2, 1e-3, 1e-4}) {
      const double h = 1e-3 * xi;
      const auto a = series_origin(P, 1, xi - h), b = series_origin(P, 1, xi),
                 c = series_origin(P, 1, xi + h);
      const double dw = (c.w - a.w) / (2 * h);
      const double df = (c.f - a.f) / (2 * h);
      const double reaction = std::pow(xi, P.sigma()) * std::pow(b.f, P.p());
      const double res = dw + (P.N() - 1) / xi * b.w - P.alpha() * b.f + P.beta() * xi * df + reaction;
      const double rel = std::abs(res) / reaction;
      CHECK(rel < prev);
      if (first == 0) first = rel;
      prev = rel;
    }
    // relative to the leading balance the residual decays like a positive power of ξ
    CHECK(prev < 0.2 * first);
  }
}

TEST_CASE("interface law") {
  const auto P = derive_params(2, 1.5, 3, 1);
  CHECK(series_interface(P, 2, 2).f == 0.0);
  CHECK(series_interface(P, 2, 0).f == doctest::Approx(0.5));
  CHECK(series_interface(P, 2, 1.9).f == doctest::Approx(0.04875));
  CHECK(series_interface(P, 2, 3).f == 0.0);
  const auto q = series_interface(P, 2, 1.9);
  CHECK(q.w == doctest::Approx(-P.beta() * 1.9 * q.f));
}

TEST_CASE("far-field constants") {
  CHECK(farfield_constant(derive_params(2, 1.5, 3, 1)) == doctest::Approx(0.125));
  CHECK(farfield_constant(derive_params(2, 1.5, 3, 2)) == doctest::Approx(0.5));
  CHECK(farfield_constant(derive_params(3, 2, 3, 1)) == doctest::Approx(0.19245).epsilon(1e-4));
  // βA/(p-1) = A^p
  const auto P = derive_params(2, 1.5, 3, 0.3);
  const double A = farfield_balance_constant(P);
  CHECK(P.beta() * A / (P.p() - 1) == doctest::Approx(std::pow(A, P.p())));
}

TEST_CASE("classification at extreme alpha") {
  CHECK(integrate_profile(P1.with_alpha(0.01), 1, 1e3).classification == OrbitClass::CrossesZero);
  CHECK(integrate_profile(P1.with_alpha(100), 1, 1e3).classification == OrbitClass::TurnsUp);
  CHECK_THROWS_AS(integrate_profile(P1, 1, 1e-12), std::invalid_argument);
  CHECK_THROWS_AS(integrate_profile(P1, 0, 1e3), std::invalid_argument);
}

TEST_CASE("grid is ordered and starts at the handoff radius") {
  const auto g = integrate_profile(P1.with_alpha(0.05), 1, 1e3);
  REQUIRE(g.points.size() > 10);
  CHECK(g.points.front().xi == g.xi_init);
  for (std::size_t i = 1; i < g.points.size(); ++i) CHECK(g.points[i].xi > g.points[i - 1].xi);
  CHECK(g.f_origin() == 1.0);
  // crossing orbits end with a flux bounded away from zero, and it is negative
  CHECK(g.classification == OrbitClass::CrossesZero);
  CHECK(g.event_w < 0);
}

TEST_CASE("samples agree with an independent tight re-integration") {
  const auto P = P1.with_alpha(0.5);
  const auto g = integrate_profile(P, 1, 1e3);
  REQUIRE(g.classification == OrbitClass::TurnsUp);
  const double tol = g.tolerances.rtol;
  ode::StepControl ctl;
  ctl.rtol = 1e-13;
  ctl.atol = 1e-15;
  auto rhs = [&](double xi, const ode::State<2>& y) {
    const auto [a, b] = rhs_profile({xi, y[0], y[1]}, P);
    return ode::State<2>{a, b};
  };
  int checked = 0;
  for (std::size_t i = 1; i + 1 < g.points.size(); i += 7) {
    const auto& a = g.points[i];
    const auto& b = g.points[i + 1];
    if (b.xi > g.switch_xi) break;
    ode::State<2> end{};
    ode::integrate<2>(rhs, a.xi, {a.f, a.w}, b.xi, ctl, [&](const ode::DenseStep<2>& s) {
      end = s.y1;
      return true;
    });
    const double scale = std::max(std::abs(a.f), std::abs(a.w));
    CHECK(std::abs(end[0] - b.f) <= 10 * tol * scale);
    ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("rescaling covariance of the turning point") {
  const auto P = P1.with_alpha(0.5);
  const auto g1 = integrate_profile(P, 1, 1e3, {}, ShootMode::FarField);
  REQUIRE(g1.minimum);
  for (double lambda : {0.5, 2.0}) {
    const auto g = integrate_profile(P, std::pow(lambda, P.m() - P.p()), 1e3, {}, ShootMode::FarField);
    REQUIRE(g.minimum);
    CHECK(g.minimum->f == doctest::Approx(lambda * g1.minimum->f).epsilon(1e-7));
    CHECK(g.minimum->xi ==
          doctest::Approx(std::pow(lambda, 0.5 * (P.m() - 1)) * g1.minimum->xi).epsilon(1e-5));
  }
}

TEST_CASE("orbit class strings and tolerance json") {
  for (auto c : {OrbitClass::CrossesZero, OrbitClass::TurnsUp, OrbitClass::Interface,
                 OrbitClass::Inconclusive})
    CHECK(orbit_class_from_string(to_string(c)) == c);
  ProfileTolerances t;
  t.rtol = 3e-11;
  t.sample_spacing = 1e-3;
  nlohmann::json j = t;
  const auto back = j.get<ProfileTolerances>();
  CHECK(back.rtol == t.rtol);
  CHECK(back.sample_spacing == t.sample_spacing);
  CHECK(back.w_floor_rel == t.w_floor_rel);
}
