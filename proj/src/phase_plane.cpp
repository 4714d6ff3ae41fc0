#include "eternal/phase_plane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eternal/dopri5.hpp"
#include "eternal/errors.hpp"

namespace eternal {

PhaseState to_phase(const ProfilePoint& pt, const Params& P) {
  if (!(pt.f > 0.0) || !(pt.xi > 0.0)) throw DegenerateState("to_phase needs xi > 0 and f > 0");
  const double m = P.m();
  return {m * std::pow(pt.f, m - 1.0) / (pt.xi * pt.xi), pt.w / (pt.xi * pt.f), 0.0};
}

std::vector<double> eta_by_quadrature(const std::vector<ProfilePoint>& points, const Params& P) {
  std::vector<double> eta(points.size(), 0.0);
  const double m = P.m();
  auto integrand = [m](const ProfilePoint& q) { return q.xi / (m * std::pow(q.f, m - 1.0)); };
  for (std::size_t i = 1; i < points.size(); ++i)
    eta[i] = eta[i - 1] + 0.5 * (points[i].xi - points[i - 1].xi) * (integrand(points[i]) + integrand(points[i - 1]));
  return eta;
}

Vec2 rhs_phase(const PhaseState& s, const Params& P) {
  const double m = P.m();
  const double X = s.X, Y = s.Y;
  const double react = X > 0.0 ? P.reaction_coefficient() * std::pow(X, P.reaction_power()) : 0.0;
  return {X * ((m - 1.0) * Y - 2.0 * X),
          -Y * Y - P.beta() * Y + P.alpha() * X - P.N() * X * Y - react};
}

Vec2 rhs_phase_scaled(const PhaseState& s, const Params& P) {
  const double m = P.m(), p = P.p();
  const double X = s.X, Y = s.Y;
  const double coeff = P.reaction_coefficient() / std::pow(P.beta(), (m - p) / (m - 1.0));
  const double react = X > 0.0 ? coeff * std::pow(X, P.reaction_power()) : 0.0;
  return {X * ((m - 1.0) * Y - 2.0 * X), -Y * Y - Y + 2.0 / (m - 1.0) * X - P.N() * X * Y - react};
}

Vec2 rhs_infinity_chart(double y, double w, const Params& P) {
  const double m = P.m(), p = P.p();
  const double wz = w > 0.0 ? std::pow(w, (m - 1.0) / (m - p)) : 0.0;  // = z
  const double dy = -(P.N() - 2) * y - m * y * y - P.beta() * y * wz + P.alpha() * wz -
                    P.reaction_coefficient() * w;
  const double dw = (m - p) / (m - 1.0) * (2.0 * w - (m - 1.0) * y * w);
  return {dy, dw};
}

namespace {

// Central differences, or second-order forward differences in a coordinate
// that is constrained to be non-negative and sits at zero.
template <class F>
Mat2 jacobian_fd(F&& rhs, Vec2 at, std::array<bool, 2> nonneg, double h) {
  Mat2 J{};
  for (int j = 0; j < 2; ++j) {
    Vec2 col{};
    if (nonneg[j] && at[j] < h) {
      Vec2 a = at, b = at;
      a[j] += h;
      b[j] += 2 * h;
      const Vec2 f0 = rhs(at), f1 = rhs(a), f2 = rhs(b);
      for (int i = 0; i < 2; ++i) col[i] = (-3 * f0[i] + 4 * f1[i] - f2[i]) / (2 * h);
    } else {
      Vec2 a = at, b = at;
      a[j] += h;
      b[j] -= h;
      const Vec2 fa = rhs(a), fb = rhs(b);
      for (int i = 0; i < 2; ++i) col[i] = (fa[i] - fb[i]) / (2 * h);
    }
    for (int i = 0; i < 2; ++i) J[i][j] = col[i];
  }
  return J;
}

Vec2 normalized(Vec2 v) {
  const double n = std::hypot(v[0], v[1]);
  return {v[0] / n, v[1] / n};
}

}  // namespace

Mat2 numerical_jacobian_phase(const PhaseState& at, const Params& P, double h) {
  return jacobian_fd([&](Vec2 v) { return rhs_phase({v[0], v[1], 0.0}, P); }, {at.X, at.Y}, {true, false}, h);
}

Mat2 numerical_jacobian_infinity(double y, double w, const Params& P, double h) {
  return jacobian_fd([&](Vec2 v) { return rhs_infinity_chart(v[0], v[1], P); }, {y, w}, {false, true}, h);
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Saddle: return "saddle";
    case Stability::StableNode: return "stable node";
    case Stability::UnstableNode: return "unstable node";
    case Stability::SaddleNode: return "saddle-node";
    case Stability::NonHyperbolicCenter: return "non-hyperbolic-center-direction";
  }
  return "saddle";
}

Eigen2 eigen_decompose(const Mat2& A) {
  const double a = A[0][0], b = A[0][1], c = A[1][0], d = A[1][1];
  const double half_tr = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double disc = half_diff * half_diff + b * c;
  if (disc < 0.0) throw std::domain_error("eigen_decompose: complex spectrum");
  const double root = std::sqrt(disc);
  // Larger-magnitude root first, the other through the determinant.
  const double l1 = half_tr + (half_tr >= 0.0 ? root : -root);
  const double det = a * d - b * c;
  const double l2 = l1 != 0.0 ? det / l1 : half_tr - (half_tr >= 0.0 ? root : -root);

  auto vector_for = [&](double lambda) -> Vec2 {
    const Vec2 r1{b, lambda - a};  // from row 1: (a-λ)x + b y = 0
    const Vec2 r2{lambda - d, c};  // from row 2: c x + (d-λ) y = 0
    const double n1 = std::hypot(r1[0], r1[1]), n2 = std::hypot(r2[0], r2[1]);
    if (n1 == 0.0 && n2 == 0.0) return {1.0, 0.0};
    return normalized(n1 >= n2 ? r1 : r2);
  };

  Eigen2 e;
  e.values = {std::min(l1, l2), std::max(l1, l2)};
  e.vectors = {vector_for(e.values[0]), vector_for(e.values[1])};
  if (e.values[0] == e.values[1]) {
    // Repeated eigenvalue: pick an independent second direction when the matrix is scalar.
    if (b == 0.0 && c == 0.0) e.vectors = {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
  }
  return e;
}

std::vector<CriticalPointReport> critical_points(const Params& P) {
  const double m = P.m(), p = P.p(), a = P.alpha(), b = P.beta();
  const int N = P.N();
  const double c = P.reaction_coefficient();
  std::vector<CriticalPointReport> out;

  auto add = [&](std::string name, std::string chart, Vec2 loc, Mat2 J, Stability st) {
    CriticalPointReport r;
    r.name = std::move(name);
    r.chart = std::move(chart);
    r.location = loc;
    r.jacobian = J;
    const Eigen2 e = eigen_decompose(J);
    r.eigenvalues = e.values;
    r.eigenvectors = e.vectors;
    r.stability = st;
    out.push_back(std::move(r));
  };

  add("P0", "finite (X,Y)", {0.0, 0.0}, Mat2{{{0.0, 0.0}, {a, -b}}}, Stability::NonHyperbolicCenter);
  add("P1", "finite (X,Y)", {0.0, -b}, Mat2{{{-(m - 1.0) * b, 0.0}, {a + N * b, b}}}, Stability::Saddle);

  const Mat2 mq1{{{-(N - 2.0), -c}, {0.0, 2.0 * (m - p) / (m - 1.0)}}};
  const Mat2 mq4{{{N - 2.0, -c}, {0.0, (m - p) * (m * N - N + 2.0) / (m * (m - 1.0))}}};
  if (N >= 3) {
    add("Q1", "infinity (y,w)", {0.0, 0.0}, mq1, Stability::Saddle);
  } else if (N == 2) {
    add("Q1", "infinity (y,w)", {0.0, 0.0}, mq1, Stability::SaddleNode);
  } else {
    add("Q1", "infinity (y,w)", {0.0, 0.0}, mq1, Stability::UnstableNode);
  }
  // Q2/Q3 live in the chart projected on Y; the matrices carry the flow orientation.
  add("Q2", "infinity (x,z)", {0.0, 0.0}, Mat2{{{m, 0.0}, {0.0, 1.0}}}, Stability::UnstableNode);
  add("Q3", "infinity (x,z)", {0.0, 0.0}, Mat2{{{-m, 0.0}, {0.0, -1.0}}}, Stability::StableNode);
  if (N >= 3) {
    add("Q4", "infinity (y,w)", {-(N - 2.0) / m, 0.0}, mq4, Stability::UnstableNode);
  } else if (N == 1) {
    add("Q4", "infinity (y,w)", {-(N - 2.0) / m, 0.0}, mq4, Stability::Saddle);
  }
  return out;
}

double center_manifold_check(const std::vector<PhaseState>& traj, const Params& P, double x_threshold) {
  const double r = P.reaction_power();
  double szz = 0.0, svz = 0.0;
  std::size_t n = 0;
  for (const auto& s : traj) {
    if (!(s.X > 0.0) || s.X >= x_threshold) continue;
    const double z = std::pow(s.X, r);
    const double v = P.beta() * s.Y - P.alpha() * s.X;
    szz += z * z;
    svz += v * z;
    ++n;
  }
  if (n < 20) throw InsufficientTail(std::to_string(n) + " samples below X=" + std::to_string(x_threshold));
  return svz / szz;
}

Vec2 center_manifold_fit2(const std::vector<PhaseState>& traj, const Params& P, double x_threshold) {
  const double r = P.reaction_power();
  double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0;
  std::size_t n = 0;
  for (const auto& s : traj) {
    if (!(s.X > 0.0) || s.X >= x_threshold) continue;
    const double z1 = std::pow(s.X, r), z2 = s.X * s.X;
    const double v = P.beta() * s.Y - P.alpha() * s.X;
    s11 += z1 * z1;
    s12 += z1 * z2;
    s22 += z2 * z2;
    t1 += v * z1;
    t2 += v * z2;
    ++n;
  }
  if (n < 20) throw InsufficientTail(std::to_string(n) + " samples below X=" + std::to_string(x_threshold));
  const double det = s11 * s22 - s12 * s12;
  return {(t1 * s22 - t2 * s12) / det, (s11 * t2 - s12 * t1) / det};
}

double isocline_flux(double scaled_X, const Params& P) {
  const double m = P.m();
  const PhaseState on_line{scaled_X, 2.0 * scaled_X / (m - 1.0), 0.0};
  const Vec2 F = rhs_phase_scaled(on_line, P);
  return -2.0 * F[0] + (m - 1.0) * F[1];
}

std::vector<PhaseState> integrate_phase(const PhaseState& start, const Params& P, double eta_end, double bound,
                                        double rtol, double atol) {
  std::vector<PhaseState> out{start};
  ode::StepControl ctl;
  ctl.rtol = rtol;
  ctl.atol = atol;
  ctl.h_max = std::max(eta_end / 200.0, 1e-6);
  auto rhs = [&](double, const ode::State<2>& y) -> ode::State<2> {
    if (y[0] < 0.0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    const Vec2 f = rhs_phase({y[0], y[1], 0.0}, P);
    return {f[0], f[1]};
  };
  ode::integrate<2>(rhs, start.eta, ode::State<2>{start.X, start.Y}, start.eta + eta_end, ctl,
                    [&](const ode::DenseStep<2>& st) {
                      out.push_back({st.y1[0], st.y1[1], st.t1});
                      return std::abs(st.y1[0]) <= bound && std::abs(st.y1[1]) <= bound;
                    });
  return out;
}

void to_json(nlohmann::json& j, const CriticalPointReport& r) {
  j = nlohmann::json{{"name", r.name},
                     {"chart", r.chart},
                     {"location", r.location},
                     {"jacobian", r.jacobian},
                     {"eigenvalues", r.eigenvalues},
                     {"eigenvectors", r.eigenvectors},
                     {"stability", to_string(r.stability)}};
}

}  // namespace eternal
