#include "eternal/shooter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eternal/errors.hpp"

namespace eternal {

namespace {

constexpr double kAlphaMin = 1e-6;
constexpr double kAlphaMax = 1e6;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

OrbitClass classify(const Params& params, const ShooterOptions& opt) {
  if (!(params.alpha() > 0.0)) throw std::invalid_argument("classify: alpha must be positive");
  double xi_max = opt.xi_max;
  for (int attempt = 0; attempt < 2; ++attempt, xi_max *= 10.0) {
    const auto g = integrate_profile(params, opt.K, xi_max, opt.tolerances, ShootMode::Classify);
    if (g.classification != OrbitClass::Inconclusive) return g.classification;
  }
  return OrbitClass::Inconclusive;
}

OrbitClass classify(double alpha, double m, double p, int N, double K) {
  if (!(alpha > 0.0)) throw std::invalid_argument("classify: alpha must be positive");
  ShooterOptions opt;
  opt.K = K;
  return classify(derive_params(m, p, N, alpha), opt);
}

void check_monotone(const std::vector<BisectionEntry>& log) {
  double max_cross = -std::numeric_limits<double>::infinity();
  double min_turn = std::numeric_limits<double>::infinity();
  for (const auto& e : log) {
    if (e.cls == OrbitClass::CrossesZero) max_cross = std::max(max_cross, e.alpha);
    if (e.cls == OrbitClass::TurnsUp) min_turn = std::min(min_turn, e.alpha);
  }
  if (min_turn < max_cross)
    throw NonMonotoneWitness("TurnsUp at alpha=" + fmt(min_turn) + " below CrossesZero at alpha=" + fmt(max_cross));
}

AlphaStarResult find_alpha_star(double m, double p, int N, double tol_alpha, const ShooterOptions& opt) {
  const Params base = derive_params(m, p, N, 1.0);
  if (!(tol_alpha > 0.0)) throw std::invalid_argument("tol_alpha must be positive");

  AlphaStarResult res;
  res.tol_alpha = tol_alpha;
  res.options = opt;

  auto eval = [&](const char* stage, double a) {
    const OrbitClass c = classify(base.with_alpha(a), opt);
    res.log.push_back({stage, a, c});
    if (c == OrbitClass::Inconclusive) throw StepFailure("orbit undecided at alpha=" + fmt(a));
    check_monotone(res.log);
    return c;
  };

  // Bracket: CrossesZero at lo, TurnsUp at hi.
  double lo = 0, hi = 0;
  const double seed = 2.0 / (m - 1.0);
  if (eval("expand", seed) == OrbitClass::TurnsUp) {
    hi = seed;
    for (double a = 0.5 * seed;; a *= 0.5) {
      if (a < kAlphaMin) throw BracketFailure("no CrossesZero orbit down to alpha=" + fmt(kAlphaMin));
      if (eval("expand", a) == OrbitClass::CrossesZero) { lo = a; break; }
      hi = a;
    }
  } else {
    lo = seed;
    for (double a = 2.0 * seed;; a *= 2.0) {
      if (a > kAlphaMax) throw BracketFailure("no TurnsUp orbit up to alpha=" + fmt(kAlphaMax));
      if (eval("expand", a) == OrbitClass::TurnsUp) { hi = a; break; }
      lo = a;
    }
  }

  for (;;) {
    const double mid = 0.5 * (lo + hi);
    const bool converged = hi - lo <= tol_alpha * mid;
    if (converged && !opt.refine_to_resolution) break;
    if (!(mid > lo && mid < hi)) break;
    (eval("bisect", mid) == OrbitClass::CrossesZero ? lo : hi) = mid;
  }

  res.alpha_lo = lo;
  res.alpha_hi = hi;
  res.alpha_star = 0.5 * (lo + hi);
  if (!(res.alpha_star > lo)) res.alpha_star = hi;  // adjacent doubles
  res.beta_star = 0.5 * (m - 1.0) * res.alpha_star;

  const double a_minus = res.alpha_star * (1.0 - 10.0 * tol_alpha);
  const double a_plus = res.alpha_star * (1.0 + 10.0 * tol_alpha);
  if (eval("verify", a_minus) != OrbitClass::CrossesZero || eval("verify", a_plus) != OrbitClass::TurnsUp)
    throw NonMonotoneWitness("classification at alpha*(1 +- 10 tol) disagrees with the bracket");

  res.profile = integrate_profile(base.with_alpha(res.alpha_star), opt.K, opt.xi_max, opt.tolerances,
                                  ShootMode::Interface);
  res.xi0 = res.profile.xi0.value_or(std::numeric_limits<double>::quiet_NaN());
  return res;
}

ProfileGrid global_profile(double alpha, double m, double p, int N, double xi_max, const ShooterOptions& opt) {
  const Params P = derive_params(m, p, N, alpha);
  const OrbitClass c = classify(P, opt);
  if (c != OrbitClass::TurnsUp)
    throw WrongRegime("alpha=" + fmt(alpha) + " gives " + to_string(c) + ", global profiles need alpha > alpha*");
  auto g = integrate_profile(P, opt.K, xi_max, opt.tolerances, ShootMode::FarField);
  if (g.classification != OrbitClass::TurnsUp)
    throw WrongRegime("far-field integration did not reach xi_max as a TurnsUp orbit");
  return g;
}

void to_json(nlohmann::json& j, const BisectionEntry& e) {
  j = nlohmann::json{{"stage", e.stage}, {"alpha", e.alpha}, {"class", to_string(e.cls)}};
}

void to_json(nlohmann::json& j, const AlphaStarResult& r) {
  j = nlohmann::json{{"params", r.profile.params},
                     {"alpha_star", r.alpha_star},
                     {"beta_star", r.beta_star},
                     {"bracket", {r.alpha_lo, r.alpha_hi}},
                     {"xi0", r.xi0},
                     {"K", r.options.K},
                     {"xi_max", r.options.xi_max},
                     {"tol_alpha", r.tol_alpha},
                     {"tolerances", r.options.tolerances},
                     {"profile_class", to_string(r.profile.classification)},
                     {"evaluations", r.log.size()},
                     {"log", r.log}};
}

}  // namespace eternal
