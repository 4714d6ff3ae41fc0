#pragma once

#include <memory>
#include <string>
#include <vector>

#include "eternal/params.hpp"
#include "eternal/profile_ode.hpp"

namespace eternal {

/// Integration tolerances for profiles that feed evaluation and residual checks:
/// second differences amplify per-step integration error by 1/h².
ProfileTolerances solution_tolerances();

enum class SolutionKind { CompactSupport, Global };
std::string to_string(SolutionKind k);

/// Piecewise cubic Hermite interpolant of g = f^{m-1} with closed-form ends:
/// the origin series below the first sample, the interface law up to ξ0, and
/// (Global) the matched logarithmic far field beyond the last sample.
class ProfileInterpolant {
 public:
  explicit ProfileInterpolant(ProfileGrid grid);

  double operator()(double xi) const;
  const ProfileGrid& grid() const { return grid_; }
  SolutionKind kind() const { return kind_; }
  double xi0() const { return xi0_; }  // +inf for Global
  double xi_last() const { return grid_.points.back().xi; }

  bool far_field_extension = true;

 private:
  ProfileGrid grid_;
  SolutionKind kind_;
  double xi0_;
  std::vector<double> xs_, g_, dg_;
  double far_K_ = 0, far_slope_ = 0;
};

class SelfSimilarSolution {
 public:
  /// CompactSupport for Interface profiles, Global for TurnsUp ones.
  /// Throws WrongRegime for CrossesZero/Inconclusive grids.
  explicit SelfSimilarSolution(ProfileGrid grid);

  const Params& params() const { return interp_->grid().params; }
  SolutionKind kind() const { return interp_->kind(); }
  double lambda() const { return lambda_; }

  /// f_λ(ξ) = λ f(λ^{-(m-1)/2} ξ).
  double profile(double xi) const;
  double f_origin() const { return profile(0.0); }
  /// ξ0 of f_λ (CompactSupport), +inf otherwise.
  double xi0() const;
  double support_radius(double t) const;

  /// e^{αt} f_λ(r e^{-βt}); throws ExtrapolationError beyond the grid when the
  /// far-field extension is disabled.
  double eval(double r, double t) const;

  SelfSimilarSolution rescale(double lambda) const;
  void set_far_field_extension(bool on);

  /// Smallest value of f_λ over [0, ξ0/2] (CompactSupport) or the positive
  /// minimum of the profile (Global).
  double barrier_floor() const;

  /// ∫ U(x,t) dx over the ball of radius `radius` (default: the support).
  double mass(double t, double rel_tol = 1e-12, double radius = -1.0) const;

  const ProfileInterpolant& interpolant() const { return *interp_; }

 private:
  SelfSimilarSolution(std::shared_ptr<const ProfileInterpolant> interp, double lambda)
      : interp_(std::move(interp)), lambda_(lambda) {}
  std::shared_ptr<const ProfileInterpolant> interp_;
  double lambda_ = 1.0;
};

/// ω_{N-1} = 2π^{N/2}/Γ(N/2) (2 for N = 1).
double sphere_measure(int N);

struct ResidualGrid {
  double r_min = 0, r_max = 0;
  double t_min = 0, t_max = 0;
  int nr = 16, nt = 16;  // sample points per direction
  double h = 1e-2;       // finite-difference step in r and t
};

struct ResidualField {
  std::vector<double> r, t;
  std::vector<double> values;  // row-major, values[i*nr + j] at (t[i], r[j])
  double max_norm = 0;
};

/// ∂_t U - [r^{1-N}(r^{N-1}(U^m)_r)_r + r^σ U^p] by centred differences of
/// step h at the sample points. Throws std::invalid_argument if r_min - h ≤ 0.
ResidualField pde_residual(const SelfSimilarSolution& U, const ResidualGrid& grid);

}  // namespace eternal
