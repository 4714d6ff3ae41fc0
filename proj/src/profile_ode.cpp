#include "eternal/profile_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eternal/dopri5.hpp"
#include "eternal/errors.hpp"

namespace eternal {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Margin κ of the trapping regions around P1 in scaled variables: the orbit is
// certified to enter Q3 once 𝒴 ≤ -1-κ with 𝒳 small, and to enter P0 once
// 𝒴 ≥ -1+κ with 𝒳 small.
constexpr double kTrapMargin = 0.5;
// Deepest ln X the classifier follows before declaring the orbit undecided.
constexpr double kDeepestLogX = -5000.0;
// Chart switch from ξ to η: X ≤ kSwitchScaledX·β or ξ f'/f ≤ -1.
constexpr double kSwitchScaledX = 10.0;

struct Shooter {
  const Params& P;
  double K;
  double xi_max;
  ProfileTolerances tol;
  ShootMode mode;

  double m = P.m(), p = P.p(), alpha = P.alpha(), beta = P.beta(), sigma = P.sigma();
  int N = P.N();
  double r = P.reaction_power();
  double c_react = P.reaction_coefficient();
  double f0 = std::pow(K, 1.0 / (m - p));
  double xi_scale = std::pow(f0, 0.5 * (m - 1.0));
  double f_floor = tol.f_floor_rel * f0;
  double log_m = std::log(m);

  // Trap thresholds in scaled variables.
  double scaled_c = c_react / std::pow(beta, (m - p) / (m - 1.0));
  double q3_trap_x =
      0.9 * kTrapMargin * (1 + kTrapMargin) / (2.0 / (m - 1.0) + N * (1 + kTrapMargin));
  double p0_trap_x = 0.9 * std::pow(kTrapMargin * (1 - kTrapMargin) / scaled_c, 1.0 / r);

  ProfileGrid grid{};

  ode::State<2> rhs_xi(double xi, const ode::State<2>& y) const {
    const double f = y[0], w = y[1];
    if (!(f > 0.0) || !(xi > 0.0)) return {kNaN, kNaN};
    const double df = w / (m * std::pow(f, m - 1.0));
    const double dw = -(N - 1) * w / xi + alpha * f - beta * xi * df - std::pow(xi, sigma) * std::pow(f, p);
    return {df, dw};
  }

  // (s, Y, ℓ) = (ln X, Y, ln ξ) against η.
  ode::State<3> rhs_eta(double, const ode::State<3>& y) const {
    const double X = std::exp(y[0]);
    const double Y = y[1];
    const double ds = (m - 1.0) * Y - 2.0 * X;
    const double dY = -Y * Y - beta * Y + alpha * X - N * X * Y - c_react * std::exp(r * y[0]);
    return {ds, dY, X};
  }

  ProfilePoint from_chart(const ode::State<3>& y) const {
    const double xi = std::exp(y[2]);
    const double f = std::exp((y[0] + 2.0 * y[2] - log_m) / (m - 1.0));
    return {xi, f, y[1] * xi * f};
  }

  double log_f(const ode::State<3>& y) const { return (y[0] + 2.0 * y[2] - log_m) / (m - 1.0); }

  void push_point(const ProfilePoint& pt) {
    if (grid.points.empty() || pt.xi > grid.points.back().xi) grid.points.push_back(pt);
  }

  double spacing_at(double xi) const { return tol.sample_spacing * std::max(xi, xi_scale); }

  void finish(OrbitClass c, double xi, double w) {
    grid.classification = c;
    grid.event_xi = xi;
    grid.event_w = w;
  }

  ProfileGrid run() {
    grid.K = K;
    grid.params = P;
    grid.tolerances = tol;
    grid.xi_max = xi_max;
    grid.xi_init = series_handoff_radius(P, K, tol.series_delta);
    if (!(xi_max > grid.xi_init))
      throw std::invalid_argument("integrate_profile: xi_max must exceed the series handoff radius");

    const ProfilePoint start = series_origin(P, K, grid.xi_init);
    grid.points.push_back(start);

    ode::StepControl ctl;
    ctl.rtol = tol.rtol;
    ctl.atol = tol.atol;
    ctl.h_init = 0.1 * grid.xi_init;

    bool decided = false;
    bool switch_chart = false;
    ode::State<2> switch_state{};
    double switch_xi = 0;

    auto observe_xi = [&](const ode::DenseStep<2>& st) {
      ++grid.steps;
      const double xa = st.t0, xb = st.t1;
      // Turning point: w changes sign from negative to non-negative.
      if (st.y0[1] < 0.0 && st.y1[1] >= 0.0) {
        const double xt = ode::locate_root([&](double x) { return st(x)[1]; }, xa, xb,
                                           tol.event_tol * std::max(1.0, xa));
        sample_xi(st, xa, xt);
        const auto yt = st(xt);
        push_point({xt, yt[0], 0.0});
        if (mode == ShootMode::FarField) {
          grid.minimum = ProfilePoint{xt, yt[0], 0.0};
          grid.event_xi = xt;
          grid.event_w = 0.0;
        } else {
          finish(OrbitClass::TurnsUp, xt, 0.0);
          decided = true;
          return false;
        }
        sample_xi(st, xt, xb);
      } else {
        sample_xi(st, xa, xb);
      }
      const double f = st.y1[0], w = st.y1[1];
      const double X = m * std::pow(f, m - 1.0) / (xb * xb);
      const double dlog = xb * w / (m * std::pow(f, m)) ;  // ξ f'/f
      if (grid.minimum) return true;  // past the minimum the ξ chart is well conditioned
      if (X <= kSwitchScaledX * beta || dlog <= -1.0) {
        switch_chart = true;
        switch_state = st.y1;
        switch_xi = xb;
        return false;
      }
      return true;
    };

    const ode::Outcome out1 = ode::integrate<2>(
        [this](double x, const ode::State<2>& y) { return rhs_xi(x, y); }, grid.xi_init,
        ode::State<2>{start.f, start.w}, xi_max, ctl, observe_xi);

    if (decided) return std::move(grid);
    if (out1 == ode::Outcome::StepUnderflow)
      throw StepFailure("step size underflow in the ξ chart at xi=" +
                        std::to_string(grid.points.back().xi));
    if (!switch_chart) {
      if (mode == ShootMode::FarField && grid.minimum) {
        grid.classification = OrbitClass::TurnsUp;
      } else {
        finish(OrbitClass::Inconclusive, grid.points.back().xi, grid.points.back().w);
      }
      return std::move(grid);
    }
    run_eta_chart(switch_xi, switch_state);
    return std::move(grid);
  }

  void sample_xi(const ode::DenseStep<2>& st, double xa, double xb) {
    const int n = std::clamp(static_cast<int>(std::ceil((xb - xa) / spacing_at(xa))), 1, 256);
    for (int k = 1; k <= n; ++k) {
      const double x = (k == n) ? xb : xa + (xb - xa) * k / n;
      const auto y = (x == st.t1) ? st.y1 : st(x);
      push_point({x, y[0], y[1]});
    }
  }

  void run_eta_chart(double xi_sw, const ode::State<2>& y_sw) {
    grid.switch_xi = xi_sw;
    const double f = y_sw[0], w = y_sw[1];
    ode::State<3> y{log_m - 2.0 * std::log(xi_sw) + (m - 1.0) * std::log(f), w / (xi_sw * f),
                    std::log(xi_sw)};

    // η at the switch point, by the trapezoidal rule over the ξ samples.
    double eta_offset = 0.0;
    for (std::size_t i = 1; i < grid.points.size(); ++i) {
      const auto& a = grid.points[i - 1];
      const auto& b = grid.points[i];
      eta_offset += 0.5 * (b.xi - a.xi) *
                    (a.xi / std::pow(a.f, m - 1.0) + b.xi / std::pow(b.f, m - 1.0)) / m;
    }
    grid.phase.push_back({eta_offset, std::exp(y[0]), y[1], xi_sw});

    const double log_xi_max = std::log(xi_max);
    const double log_f_floor = std::log(f_floor);
    bool decided = false;
    bool turned = grid.minimum.has_value();

    ode::StepControl ctl;
    ctl.rtol = tol.rtol;
    ctl.atol = tol.atol;
    ctl.h_max = 1.0 / beta;

    auto emit = [&](const ode::DenseStep<3>& st, double ea, double eb) {
      const auto ya = st(ea);
      const auto yb = (eb == st.t1) ? st.y1 : st(eb);
      const ProfilePoint pa = from_chart(ya), pb = from_chart(yb);
      const double need = std::max({std::abs(yb[0] - ya[0]) / 0.05, std::abs(yb[1] - ya[1]) / (0.02 * beta),
                                    std::abs(pb.xi - pa.xi) / spacing_at(pa.xi)});
      const int n = std::clamp(static_cast<int>(std::ceil(need)), 1, 256);
      for (int k = 1; k <= n; ++k) {
        const double e = (k == n) ? eb : ea + (eb - ea) * k / n;
        const auto yk = (e == st.t1) ? st.y1 : st(e);
        push_point(from_chart(yk));
        grid.phase.push_back({eta_offset + e, std::exp(yk[0]), yk[1], std::exp(yk[2])});
      }
    };

    auto observe = [&](const ode::DenseStep<3>& st) {
      ++grid.steps;
      const double ea = st.t0;
      double eb = st.t1;
      const double etol = tol.event_tol * std::max(1.0, std::abs(ea));

      // Earliest located event inside the step.
      enum class Ev { None, Turn, Floor, XiMax } ev = Ev::None;
      double e_ev = eb;
      if (st.y0[1] < 0.0 && st.y1[1] >= 0.0) {
        const double e = ode::locate_root([&](double t) { return st(t)[1]; }, ea, eb, etol);
        if (e < e_ev) { e_ev = e; ev = Ev::Turn; }
      }
      if (log_f(st.y0) > log_f_floor && log_f(st.y1) <= log_f_floor) {
        const double e = ode::locate_root([&](double t) { return log_f(st(t)) - log_f_floor; }, ea, eb, etol);
        if (e < e_ev) { e_ev = e; ev = Ev::Floor; }
      }
      if (st.y0[2] < log_xi_max && st.y1[2] >= log_xi_max) {
        const double e = ode::locate_root([&](double t) { return st(t)[2] - log_xi_max; }, ea, eb, etol);
        if (e < e_ev) { e_ev = e; ev = Ev::XiMax; }
      }

      if (ev != Ev::None) {
        emit(st, ea, e_ev);
        const auto ye = st(e_ev);
        const ProfilePoint pe = from_chart(ye);
        switch (ev) {
          case Ev::Turn:
            if (mode == ShootMode::FarField) {
              grid.minimum = ProfilePoint{pe.xi, pe.f, 0.0};
              grid.event_xi = pe.xi;
              grid.event_w = 0.0;
              turned = true;
              break;
            }
            finish(OrbitClass::TurnsUp, pe.xi, pe.w);
            decided = true;
            return false;
          case Ev::Floor: {
            const double w_floor = tol.w_floor_rel * beta * pe.xi;
            if (std::abs(pe.w) > w_floor && pe.w < 0.0) {
              finish(OrbitClass::CrossesZero, pe.xi, pe.w);
              decided = true;
              return false;
            }
            if (mode == ShootMode::Interface && std::abs(pe.w) <= w_floor) {
              finish(OrbitClass::Interface, pe.xi, pe.w);
              decided = true;
              return false;
            }
            break;
          }
          case Ev::XiMax:
            if (mode == ShootMode::FarField && turned) {
              grid.classification = OrbitClass::TurnsUp;
              grid.event_xi = grid.minimum->xi;
            } else {
              finish(OrbitClass::Inconclusive, pe.xi, pe.w);
            }
            decided = true;
            return false;
          case Ev::None:
            break;
        }
        emit(st, e_ev, eb);
      } else {
        emit(st, ea, eb);
      }

      // Trapping regions, checked at the step end.
      const double sx = std::exp(st.y1[0]) / beta;
      const double sy = st.y1[1] / beta;
      if (sy <= -1.0 - kTrapMargin && sx <= q3_trap_x) {
        const ProfilePoint pe = from_chart(st.y1);
        finish(OrbitClass::CrossesZero, pe.xi, pe.w);
        decided = true;
        return false;
      }
      if (mode != ShootMode::FarField && sy >= -1.0 + kTrapMargin && sy < 0.0 && sx <= p0_trap_x) {
        const ProfilePoint pe = from_chart(st.y1);
        finish(OrbitClass::TurnsUp, pe.xi, pe.w);
        decided = true;
        return false;
      }
      if (st.y1[0] < kDeepestLogX) {
        const ProfilePoint pe = from_chart(st.y1);
        finish(OrbitClass::Inconclusive, pe.xi, pe.w);
        decided = true;
        return false;
      }
      return true;
    };

    const ode::Outcome out = ode::integrate<3>(
        [this](double e, const ode::State<3>& s) { return rhs_eta(e, s); }, 0.0, y, 1e15, ctl, observe);
    if (decided) return;
    if (out == ode::Outcome::StepUnderflow)
      throw StepFailure("step size underflow in the η chart near xi=" + std::to_string(grid.points.back().xi));
    finish(OrbitClass::Inconclusive, grid.points.back().xi, grid.points.back().w);
  }
};

}  // namespace

std::string to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::CrossesZero: return "CrossesZero";
    case OrbitClass::TurnsUp: return "TurnsUp";
    case OrbitClass::Interface: return "Interface";
    case OrbitClass::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

OrbitClass orbit_class_from_string(const std::string& s) {
  for (auto c : {OrbitClass::CrossesZero, OrbitClass::TurnsUp, OrbitClass::Interface, OrbitClass::Inconclusive})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown orbit class '" + s + "'");
}

double ProfileGrid::f_origin() const { return std::pow(K, 1.0 / (params.m() - params.p())); }

std::pair<double, double> rhs_profile(const ProfilePoint& s, const Params& P) {
  if (!(s.f > 0.0) || !(s.xi > 0.0))
    throw DegenerateState("rhs_profile needs xi > 0 and f > 0");
  const double m = P.m();
  const double df = s.w / (m * std::pow(s.f, m - 1.0));
  const double dw = -(P.N() - 1) * s.w / s.xi + P.alpha() * s.f - P.beta() * s.xi * df -
                    std::pow(s.xi, P.sigma()) * std::pow(s.f, P.p());
  return {df, dw};
}

double origin_series_coefficient(const Params& P) {
  const double m = P.m(), p = P.p();
  return (m - 1.0) * (m - 1.0) / (2.0 * m * (P.N() * (m - 1.0) - 2.0 * (p - 1.0)));
}

ProfilePoint series_origin(const Params& P, double K, double xi) {
  if (!(K > 0.0)) throw std::invalid_argument("series_origin: K must be positive");
  if (!(xi >= 0.0)) throw std::invalid_argument("series_origin: xi must be non-negative");
  const double m = P.m(), p = P.p();
  const double e = P.origin_exponent();
  const double c = origin_series_coefficient(P);
  const double bracket = K - c * std::pow(xi, e);
  if (!(bracket > 0.0)) throw SeriesOutOfRange("origin bracket non-positive at xi=" + std::to_string(xi));
  const double f = std::pow(bracket, 1.0 / (m - p));
  if (xi == 0.0) return {0.0, f, 0.0};
  // f' = (1/(m-p)) bracket^{1/(m-p)-1} · (-c e ξ^{e-1}),  w = m f^{m-1} f'
  const double df = -c * e * std::pow(xi, e - 1.0) * f / ((m - p) * bracket);
  return {xi, f, m * std::pow(f, m - 1.0) * df};
}

double series_handoff_radius(const Params& P, double K, double delta) {
  return std::pow(delta * K / origin_series_coefficient(P), 1.0 / P.origin_exponent());
}

ProfilePoint series_interface(const Params& P, double xi0, double xi) {
  if (!(xi0 > 0.0) || !(xi >= 0.0)) throw std::invalid_argument("series_interface: need xi0 > 0, xi >= 0");
  const double m = P.m();
  const double g = P.beta() * (m - 1.0) * (xi0 * xi0 - xi * xi) / (2.0 * m);
  if (g <= 0.0) return {xi, 0.0, 0.0};
  const double f = std::pow(g, 1.0 / (m - 1.0));
  return {xi, f, -P.beta() * xi * f};
}

double farfield_constant(const Params& P) {
  const double m = P.m(), p = P.p();
  return std::pow(P.alpha() * (m - 1.0) / (2.0 * (p - 1.0)), 1.0 / (p - 1.0)) *
         std::pow(m, -(m + p - 2.0) / ((m - 1.0) * (p - 1.0)));
}

double farfield_balance_constant(const Params& P) {
  return std::pow(P.beta() / (P.p() - 1.0), 1.0 / (P.p() - 1.0));
}

ProfileGrid integrate_profile(const Params& params, double K, double xi_max, const ProfileTolerances& tol,
                              ShootMode mode) {
  if (!(K > 0.0)) throw std::invalid_argument("integrate_profile: K must be positive");
  Shooter s{params, K, xi_max, tol, mode};
  ProfileGrid g = s.run();
  if (g.classification == OrbitClass::Interface) g.xi0 = fit_interface(g);
  return g;
}

std::optional<double> fit_interface(const ProfileGrid& grid) {
  const Params& P = grid.params;
  const double m = P.m();
  const double A = P.beta() * (m - 1.0) / (2.0 * m);
  const double g0 = std::pow(grid.f_origin(), m - 1.0);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& pt : grid.points) {
    const double g = std::pow(pt.f, m - 1.0);
    const double rel = g / g0;
    if (rel >= 1e-7 && rel <= 1e-5) {
      sum += std::sqrt(pt.xi * pt.xi + g / A);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

RatioWindow interface_ratio(const ProfileGrid& grid, double xi0, double lo, double hi) {
  const Params& P = grid.params;
  const double m = P.m();
  const double A = P.beta() * (m - 1.0) / (2.0 * m);
  RatioWindow out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0};
  for (const auto& pt : grid.points) {
    const double d = (xi0 - pt.xi) / xi0;
    if (d < lo || d > hi) continue;
    const double ratio = std::pow(pt.f, m - 1.0) / (A * (xi0 * xi0 - pt.xi * pt.xi));
    out.min_ratio = std::min(out.min_ratio, ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
    ++out.samples;
  }
  return out;
}

std::vector<std::pair<double, double>> farfield_ratio(const ProfileGrid& grid) {
  const Params& P = grid.params;
  std::vector<std::pair<double, double>> out;
  for (const auto& pt : grid.points) {
    if (pt.xi <= std::exp(1.0)) continue;
    out.emplace_back(pt.xi, pt.f * std::pow(pt.xi, -P.growth_exponent()) *
                                std::pow(std::log(pt.xi), P.log_exponent()));
  }
  return out;
}

void to_json(nlohmann::json& j, const ProfileTolerances& t) {
  j = nlohmann::json{{"rtol", t.rtol},
                     {"atol", t.atol},
                     {"event_tol", t.event_tol},
                     {"series_delta", t.series_delta},
                     {"f_floor_rel", t.f_floor_rel},
                     {"w_floor_rel", t.w_floor_rel},
                     {"sample_spacing", t.sample_spacing}};
}

void from_json(const nlohmann::json& j, ProfileTolerances& t) {
  t.rtol = j.value("rtol", t.rtol);
  t.atol = j.value("atol", t.atol);
  t.event_tol = j.value("event_tol", t.event_tol);
  t.series_delta = j.value("series_delta", t.series_delta);
  t.f_floor_rel = j.value("f_floor_rel", t.f_floor_rel);
  t.w_floor_rel = j.value("w_floor_rel", t.w_floor_rel);
  t.sample_spacing = j.value("sample_spacing", t.sample_spacing);
}

}  // namespace eternal
