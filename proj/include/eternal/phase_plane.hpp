#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "eternal/params.hpp"
#include "eternal/profile_ode.hpp"

namespace eternal {

/// Point of the autonomous system in X = m ξ^{-2} f^{m-1}, Y = m ξ^{-1} f^{m-2} f'.
struct PhaseState {
  double X = 0;
  double Y = 0;
  double eta = 0;
};

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// Y = w/(ξ f) since w = (f^m)'. eta is left at 0 (see eta_by_quadrature).
PhaseState to_phase(const ProfilePoint& point, const Params& params);

/// Trapezoidal η(ξ) = (1/m) ∫ ζ / f^{m-1}(ζ) dζ along the samples (first sample at η = 0).
std::vector<double> eta_by_quadrature(const std::vector<ProfilePoint>& points, const Params& params);

/// Finite chart (X, Y) in the variable η.
Vec2 rhs_phase(const PhaseState& state, const Params& params);

/// Same system in 𝒳 = X/β, 𝒴 = Y/β, η̄ = βη (so rhs_phase = β² rhs_phase_scaled).
Vec2 rhs_phase_scaled(const PhaseState& state, const Params& params);

/// Chart at infinity around Q1/Q4: y = Y/X, w = X^{-(m-p)/(m-1)}.
Vec2 rhs_infinity_chart(double y, double w, const Params& params);

/// Jacobians by central differences; used to cross-check the closed forms.
Mat2 numerical_jacobian_phase(const PhaseState& at, const Params& params, double h = 1e-6);
Mat2 numerical_jacobian_infinity(double y, double w, const Params& params, double h = 1e-6);

enum class Stability { Saddle, StableNode, UnstableNode, SaddleNode, NonHyperbolicCenter };
std::string to_string(Stability s);

struct CriticalPointReport {
  std::string name;   // P0, P1, Q1..Q4
  std::string chart;  // "finite (X,Y)", "infinity (y,w)", "infinity (x,z)"
  Vec2 location{};
  Mat2 jacobian{};
  Vec2 eigenvalues{};
  std::array<Vec2, 2> eigenvectors{};  // unit vectors
  Stability stability = Stability::Saddle;
};

struct Eigen2 {
  Vec2 values{};
  std::array<Vec2, 2> vectors{};
};

/// Real eigen-decomposition of a 2×2 matrix with real spectrum (values ascending).
Eigen2 eigen_decompose(const Mat2& a);

/// P0, P1, Q1..Q4 (Q1 and Q4 merge for N = 2, giving five reports).
std::vector<CriticalPointReport> critical_points(const Params& params);

/// Least-squares coefficient a in V = βY - αX ≈ a X^{(m+p-2)/(m-1)} over the
/// samples with 0 < X < x_threshold. Throws InsufficientTail below 20 samples.
double center_manifold_check(const std::vector<PhaseState>& trajectory, const Params& params,
                             double x_threshold = 1e-4);

/// Two-term least squares V ≈ a X^r + b X² on the same tail; returns (a, b).
Vec2 center_manifold_fit2(const std::vector<PhaseState>& trajectory, const Params& params,
                          double x_threshold = 1e-4);

/// Flow across the isocline (m-1)𝒴 = 2𝒳 of the scaled system (negative: the
/// half-plane (m-1)𝒴 - 2𝒳 < 0 is positively invariant).
double isocline_flux(double scaled_X, const Params& params);

/// Integrates the finite chart from `start` for η ∈ [0, eta_end]; stops early
/// if the orbit leaves the box |X|,|Y| ≤ bound.
std::vector<PhaseState> integrate_phase(const PhaseState& start, const Params& params,
                                        double eta_end, double bound = 1e3,
                                        double rtol = 1e-10, double atol = 1e-12);

void to_json(nlohmann::json& j, const CriticalPointReport& r);

}  // namespace eternal
