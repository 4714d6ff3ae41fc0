#pragma once

// Dormand–Prince 5(4) with the standard fourth-order continuous extension.
// Header-only: the state dimension is a template parameter and the right-hand
// side is any callable State(double, const State&).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace eternal::ode {

template <std::size_t Dim>
using State = std::array<double, Dim>;

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  // 0: pick from the first derivative
  double h_min = 0.0;   // absolute floor; 0 means 64 ulp of t
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
};

enum class Outcome { Reached, Stopped, StepUnderflow, StepLimit };

/// One accepted step with its interpolant.
template <std::size_t Dim>
struct DenseStep {
  double t0 = 0, t1 = 0;
  State<Dim> y0{}, y1{}, f0{}, f1{};
  std::array<State<Dim>, 5> rc{};

  double h() const { return t1 - t0; }

  State<Dim> operator()(double t) const {
    const double th = (t - t0) / h();
    const double th1 = 1.0 - th;
    State<Dim> y;
    for (std::size_t i = 0; i < Dim; ++i)
      y[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
    return y;
  }

  /// d/dt of the interpolant.
  State<Dim> derivative(double t) const {
    const double th = (t - t0) / h();
    const double th1 = 1.0 - th;
    State<Dim> d;
    for (std::size_t i = 0; i < Dim; ++i) {
      // y = a + θ(b + θ1(c + θ(e + θ1 g)))
      const double inner = rc[3][i] + th1 * rc[4][i];           // e + θ1 g
      const double d_inner = -rc[4][i];
      const double mid = rc[2][i] + th * inner;                  // c + θ inner
      const double d_mid = inner + th * d_inner;
      const double outer = rc[1][i] + th1 * mid;                 // b + θ1 mid
      const double d_outer = -mid + th1 * d_mid;
      d[i] = (outer + th * d_outer) / h();
    }
    return d;
  }
};

namespace detail {

template <std::size_t Dim>
bool finite(const State<Dim>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t Dim>
State<Dim> axpy(const State<Dim>& y, double h, std::initializer_list<std::pair<double, const State<Dim>*>> terms) {
  State<Dim> out = y;
  for (const auto& [c, k] : terms)
    if (c != 0.0)
      for (std::size_t i = 0; i < Dim; ++i) out[i] += h * c * (*k)[i];
  return out;
}

}  // namespace detail

/// Integrates from (t0, y0) towards t_end (t_end > t0). `observer(step)` is
/// called after every accepted step and returns false to stop. A right-hand
/// side returning non-finite values rejects the trial step and halves h.
template <std::size_t Dim, class Rhs, class Observer>
Outcome integrate(Rhs&& rhs, double t0, State<Dim> y0, double t_end, const StepControl& ctl,
                  Observer&& observer) {
  using detail::axpy;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  double t = t0;
  State<Dim> y = y0;
  State<Dim> k1 = rhs(t, y);
  if (!detail::finite<Dim>(k1)) return Outcome::StepUnderflow;

  double h = ctl.h_init;
  if (h <= 0.0) {
    double n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < Dim; ++i) {
      const double sc = ctl.atol + ctl.rtol * std::abs(y[i]);
      n0 += (y[i] / sc) * (y[i] / sc);
      n1 += (k1[i] / sc) * (k1[i] / sc);
    }
    h = (n0 < 1e-10 || n1 < 1e-10) ? 1e-6 : 0.01 * std::sqrt(n0 / n1);
  }
  h = std::min({h, ctl.h_max, t_end - t});

  for (long step = 0; step < ctl.max_steps; ++step) {
    const double h_floor =
        ctl.h_min > 0 ? ctl.h_min : 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (t_end - t <= h_floor) return Outcome::Reached;
    bool accepted = false;
    while (!accepted) {
      if (h < h_floor) return Outcome::StepUnderflow;
      const State<Dim> k2 = rhs(t + c2 * h, axpy<Dim>(y, h, {{a21, &k1}}));
      const State<Dim> k3 = rhs(t + c3 * h, axpy<Dim>(y, h, {{a31, &k1}, {a32, &k2}}));
      const State<Dim> k4 = rhs(t + c4 * h, axpy<Dim>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const State<Dim> k5 =
          rhs(t + c5 * h, axpy<Dim>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const State<Dim> k6 = rhs(
          t + h, axpy<Dim>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const State<Dim> y1 =
          axpy<Dim>(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
      const State<Dim> k7 = rhs(t + h, y1);

      double err = 0.0;
      bool ok = detail::finite<Dim>(y1) && detail::finite<Dim>(k7);
      if (ok) {
        for (std::size_t i = 0; i < Dim; ++i) {
          const double e =
              h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
          const double sc = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
          err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / Dim);
        ok = std::isfinite(err);
      }
      if (!ok) {
        h *= 0.5;
        continue;
      }
      if (err > 1.0) {
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        continue;
      }

      DenseStep<Dim> ds;
      ds.t0 = t;
      ds.t1 = t + h;
      ds.y0 = y;
      ds.y1 = y1;
      ds.f0 = k1;
      ds.f1 = k7;
      for (std::size_t i = 0; i < Dim; ++i) {
        const double dy = y1[i] - y[i];
        const double bspl = h * k1[i] - dy;
        ds.rc[0][i] = y[i];
        ds.rc[1][i] = dy;
        ds.rc[2][i] = bspl;
        ds.rc[3][i] = dy - h * k7[i] - bspl;
        ds.rc[4][i] =
            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      accepted = true;
      t = ds.t1;
      y = y1;
      k1 = k7;
      const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      h = std::min(h * grow, ctl.h_max);
      if (!observer(static_cast<const DenseStep<Dim>&>(ds))) return Outcome::Stopped;
      if (t_end - t < h) h = t_end - t;
    }
  }
  return Outcome::StepLimit;
}

/// Bisection for a sign change of g on [a, b]; g(a) and g(b) must differ in sign.
template <class G>
double locate_root(G&& g, double a, double b, double tol) {
  double ga = g(a);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double gm = g(mid);
    if ((gm > 0) == (ga > 0)) {
      a = mid;
      ga = gm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace eternal::ode
