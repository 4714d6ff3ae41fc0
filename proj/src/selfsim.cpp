#include "eternal/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "eternal/errors.hpp"

namespace eternal {

ProfileTolerances solution_tolerances() {
  ProfileTolerances t;
  t.rtol = 1e-13;
  t.atol = 1e-16;
  t.sample_spacing = 2e-3;
  return t;
}

std::string to_string(SolutionKind k) { return k == SolutionKind::CompactSupport ? "CompactSupport" : "Global"; }

double sphere_measure(int N) {
  if (N == 1) return 2.0;
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

ProfileInterpolant::ProfileInterpolant(ProfileGrid grid) : grid_(std::move(grid)) {
  const auto& P = grid_.params;
  const double m = P.m(), p = P.p();
  if (grid_.points.size() < 2) throw std::invalid_argument("profile grid needs at least two samples");
  switch (grid_.classification) {
    case OrbitClass::Interface:
      if (!grid_.xi0) throw std::invalid_argument("Interface profile without a fitted xi0");
      kind_ = SolutionKind::CompactSupport;
      xi0_ = *grid_.xi0;
      break;
    case OrbitClass::TurnsUp:
      kind_ = SolutionKind::Global;
      xi0_ = std::numeric_limits<double>::infinity();
      break;
    default:
      throw WrongRegime("no self-similar solution from a " + to_string(grid_.classification) + " orbit");
  }

  xs_.reserve(grid_.points.size());
  for (const auto& q : grid_.points) {
    xs_.push_back(q.xi);
    g_.push_back(std::pow(q.f, m - 1.0));
    dg_.push_back((m - 1.0) * q.w / (m * q.f));
  }
  // Overshoot guard on monotone stretches (Fritsch-Carlson); extrema keep the exact slopes.
  for (std::size_t k = 0; k + 1 < xs_.size(); ++k) {
    const double delta = (g_[k + 1] - g_[k]) / (xs_[k + 1] - xs_[k]);
    if (delta == 0.0) continue;
    const double a = dg_[k] / delta, b = dg_[k + 1] / delta;
    if (a > 0.0 && b > 0.0 && a * a + b * b > 9.0) {
      const double tau = 3.0 / std::hypot(a, b);
      dg_[k] = tau * a * delta;
      dg_[k + 1] = tau * b * delta;
    }
  }

  if (kind_ == SolutionKind::Global) {
    const auto& last = grid_.points.back();
    far_slope_ = std::pow(farfield_balance_constant(P), -(p - 1.0));
    far_K_ = std::pow(last.f * std::pow(last.xi, -2.0 / (m - 1.0)), -(p - 1.0)) - far_slope_ * std::log(last.xi);
  }
}

double ProfileInterpolant::operator()(double xi) const {
  const auto& P = grid_.params;
  const double m = P.m(), p = P.p();
  if (xi < 0.0) throw std::invalid_argument("profile evaluated at negative xi");
  if (xi < xs_.front()) return series_origin(P, grid_.K, xi).f;
  if (xi >= xi0_) return 0.0;
  if (xi > xs_.back()) {
    if (kind_ == SolutionKind::CompactSupport) return series_interface(P, xi0_, xi).f;
    if (!far_field_extension) throw ExtrapolationError("xi=" + std::to_string(xi) + " beyond the integrated profile");
    return std::pow(far_K_ + far_slope_ * std::log(xi), -1.0 / (p - 1.0)) * std::pow(xi, 2.0 / (m - 1.0));
  }
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), xi);
  std::size_t k = static_cast<std::size_t>(it - xs_.begin());
  k = k == 0 ? 0 : std::min(k - 1, xs_.size() - 2);
  const double h = xs_[k + 1] - xs_[k];
  const double s = (xi - xs_[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double g = (2 * s3 - 3 * s2 + 1) * g_[k] + (s3 - 2 * s2 + s) * h * dg_[k] + (-2 * s3 + 3 * s2) * g_[k + 1] +
                   (s3 - s2) * h * dg_[k + 1];
  return g > 0.0 ? std::pow(g, 1.0 / (m - 1.0)) : 0.0;
}

SelfSimilarSolution::SelfSimilarSolution(ProfileGrid grid)
    : interp_(std::make_shared<const ProfileInterpolant>(std::move(grid))) {}

double SelfSimilarSolution::profile(double xi) const {
  if (lambda_ == 1.0) return (*interp_)(xi);
  const double m = params().m();
  return lambda_ * (*interp_)(std::pow(lambda_, -0.5 * (m - 1.0)) * xi);
}

double SelfSimilarSolution::xi0() const {
  return std::pow(lambda_, 0.5 * (params().m() - 1.0)) * interp_->xi0();
}

double SelfSimilarSolution::support_radius(double t) const { return xi0() * std::exp(params().beta() * t); }

double SelfSimilarSolution::eval(double r, double t) const {
  if (r < 0.0) throw std::invalid_argument("eval needs r >= 0");
  const auto& P = params();
  return std::exp(P.alpha() * t) * profile(r * std::exp(-P.beta() * t));
}

SelfSimilarSolution SelfSimilarSolution::rescale(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("rescale needs lambda > 0");
  return SelfSimilarSolution(interp_, lambda_ * lambda);
}

void SelfSimilarSolution::set_far_field_extension(bool on) {
  auto copy = std::make_shared<ProfileInterpolant>(*interp_);
  copy->far_field_extension = on;
  interp_ = std::move(copy);
}

double SelfSimilarSolution::barrier_floor() const {
  const auto& grid = interp_->grid();
  if (kind() == SolutionKind::Global) {
    if (grid.minimum) return lambda_ * grid.minimum->f;
    double q = std::numeric_limits<double>::infinity();
    for (const auto& pt : grid.points) q = std::min(q, pt.f);
    return lambda_ * q;
  }
  const double half = 0.5 * interp_->xi0();
  double q = (*interp_)(half);
  for (const auto& pt : grid.points) {
    if (pt.xi > half) break;
    q = std::min(q, pt.f);
  }
  return lambda_ * q;
}

double SelfSimilarSolution::mass(double t, double rel_tol, double radius) const {
  if (radius < 0.0) {
    if (kind() != SolutionKind::CompactSupport) throw std::invalid_argument("mass of a global solution needs a radius");
    radius = support_radius(t);
  }
  const int N = params().N();
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto integrand = [&](double r) { return eval(r, t) * std::pow(r, N - 1); };
  return sphere_measure(N) * integrator.integrate(integrand, 0.0, radius, rel_tol);
}

ResidualField pde_residual(const SelfSimilarSolution& U, const ResidualGrid& G) {
  if (!(G.r_min - G.h > 0.0)) throw std::invalid_argument("residual stencil reaches r <= 0");
  if (G.nr < 1 || G.nt < 1) throw std::invalid_argument("residual grid needs points");
  const auto& P = U.params();
  const double m = P.m(), p = P.p(), sigma = P.sigma();
  const int N = P.N();
  const double h = G.h;
  ResidualField out;
  auto axis = [](double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
  };
  out.r = axis(G.r_min, G.r_max, G.nr);
  out.t = axis(G.t_min, G.t_max, G.nt);
  out.values.reserve(static_cast<std::size_t>(G.nr) * G.nt);
  for (double t : out.t) {
    for (double r : out.r) {
      const double u = U.eval(r, t);
      const double um = std::pow(u, m);
      const double up = std::pow(U.eval(r + h, t), m);
      const double dn = std::pow(U.eval(r - h, t), m);
      const double ut = (U.eval(r, t + h) - U.eval(r, t - h)) / (2 * h);
      const double diffusion = (up - 2 * um + dn) / (h * h) + (N - 1) / r * (up - dn) / (2 * h);
      const double res = ut - diffusion - std::pow(r, sigma) * std::pow(u, p);
      out.values.push_back(res);
      out.max_norm = std::max(out.max_norm, std::abs(res));
    }
  }
  return out;
}

}  // namespace eternal
