#include <doctest.h>

#include <cmath>

#include "eternal/errors.hpp"
#include "eternal/shooter.hpp"

using namespace eternal;

namespace {
const AlphaStarResult& base() {
  static const AlphaStarResult r = find_alpha_star(2, 1.5, 3, 1e-8);
  return r;
}
}  // namespace

TEST_CASE("classify at extreme alpha") {
  CHECK(classify(0.01, 2, 1.5, 3) == OrbitClass::CrossesZero);
  CHECK(classify(100, 2, 1.5, 3) == OrbitClass::TurnsUp);
  CHECK_THROWS_AS(classify(-1, 2, 1.5, 3), std::invalid_argument);
}

TEST_CASE("alpha star contract") {
  for (auto [m, p, N] : {std::tuple{2.0, 1.5, 3}, {3.0, 2.0, 2}}) {
    const auto r = (m == 2.0) ? base() : find_alpha_star(m, p, N, 1e-8);
    CHECK(r.alpha_lo < r.alpha_star);
    CHECK(r.alpha_star <= r.alpha_hi);
    CHECK(r.alpha_hi - r.alpha_lo <= 1e-8 * r.alpha_star);
    CHECK(r.beta_star == 0.5 * (m - 1) * r.alpha_star);
    CHECK(classify(r.alpha_lo, m, p, N) == OrbitClass::CrossesZero);
    CHECK(classify(r.alpha_hi, m, p, N) == OrbitClass::TurnsUp);
    CHECK(r.profile.classification == OrbitClass::Interface);
    CHECK(r.xi0 > 0);
    CHECK_NOTHROW(check_monotone(r.log));
    const auto w = interface_ratio(r.profile, r.xi0, 1e-3, 1e-2);
    CHECK(w.samples > 0);
    CHECK(std::abs(w.min_ratio - 1) < 0.02);
    CHECK(std::abs(w.max_ratio - 1) < 0.02);
  }
  CHECK_THROWS_AS(find_alpha_star(2, 1.8, 1), RangeViolation);
}

TEST_CASE("monotone dichotomy witness") {
  std::vector<BisectionEntry> log{{"expand", 1.0, OrbitClass::TurnsUp},
                                  {"expand", 2.0, OrbitClass::CrossesZero}};
  CHECK_THROWS_AS(check_monotone(log), NonMonotoneWitness);
  log[1].cls = OrbitClass::TurnsUp;
  CHECK_NOTHROW(check_monotone(log));
}

TEST_CASE("bisection is deterministic") {
  const auto again = find_alpha_star(2, 1.5, 3, 1e-8);
  CHECK(again.alpha_star == base().alpha_star);
  CHECK(again.log.size() == base().log.size());
  CHECK(nlohmann::json(again).dump() == nlohmann::json(base()).dump());
}

TEST_CASE("halving integrator tolerances barely moves alpha star") {
  ShooterOptions opt;
  opt.tolerances.rtol /= 2;
  opt.tolerances.atol /= 2;
  const auto r = find_alpha_star(2, 1.5, 3, 1e-8, opt);
  CHECK(std::abs(r.alpha_star - base().alpha_star) < 10 * 1e-8 * base().alpha_star);
}

TEST_CASE("alpha star does not depend on the normalisation") {
  ShooterOptions opt;
  opt.K = 4;
  const auto r = find_alpha_star(2, 1.5, 3, 1e-8, opt);
  CHECK(r.alpha_star == doctest::Approx(base().alpha_star).epsilon(1e-7));
}

TEST_CASE("support edge follows the scaling family") {
  const auto& r = base();
  const auto P = r.params();
  ProfileTolerances tol = r.options.tolerances;
  for (double lambda : {0.25, 4.0}) {
    const auto g = integrate_profile(P, std::pow(lambda, P.m() - P.p()), 1e3 * lambda, tol,
                                     ShootMode::Interface);
    REQUIRE(g.classification == OrbitClass::Interface);
    REQUIRE(g.xi0);
    CHECK(*g.xi0 == doctest::Approx(std::pow(lambda, 0.5 * (P.m() - 1)) * r.xi0).epsilon(1e-3));
  }
}

TEST_CASE("global profiles") {
  const double a = base().alpha_star;
  const auto g = global_profile(2 * a, 2, 1.5, 3, 1e4);
  CHECK(g.classification == OrbitClass::TurnsUp);
  REQUIRE(g.minimum);
  CHECK(g.minimum->f > 0);
  CHECK(g.minimum->f < g.f_origin());
  CHECK(g.points.back().f > g.minimum->f);
  CHECK(g.points.back().xi >= 0.999 * 1e4);
  CHECK_THROWS_AS(global_profile(a / 2, 2, 1.5, 3, 1e4), WrongRegime);
}

TEST_CASE("far-field trend toward the balance constant") {
  const double a = base().alpha_star;
  const auto g = global_profile(2 * a, 2, 1.5, 3, 1e6);
  const double A = farfield_balance_constant(g.params);
  const auto ratios = farfield_ratio(g);
  REQUIRE(ratios.size() > 10);
  auto at = [&](double xi) {
    double best = 0, dist = INFINITY;
    for (auto [x, q] : ratios)
      if (std::abs(std::log(x / xi)) < dist) dist = std::abs(std::log(x / xi)), best = q;
    return best / A;
  };
  const double r4 = at(1e4), r5 = at(1e5), r6 = at(1e6);
  CHECK(r4 < r5);
  CHECK(r5 < r6);
  CHECK(r6 < 1.0);
}

TEST_CASE("result json") {
  const nlohmann::json j = base();
  for (const char* k : {"alpha_star", "bracket", "xi0", "tolerances", "log", "params"})
    CHECK(j.contains(k));
  CHECK(j["log"].size() == base().log.size());
}
