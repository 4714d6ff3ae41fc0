#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eternal/params.hpp"
#include "eternal/selfsim.hpp"

namespace eternal {

/// Radial finite-volume state for u_t = Δu^m + (r+ε)^σ u^p.
struct PdeState {
  std::vector<double> r_faces;  // 0 = r_0 < ... < r_n = R_max
  std::vector<double> u;        // cell averages, size n
  double t = 0;
  double eps = 1;
  Params params = derive_params(2.0, 1.5, 3, 1.0);

  std::vector<double> centers() const;
  std::vector<double> volumes() const;
  double mass() const;  // Σ u_i |cell_i| (without the sphere constant)
};

std::vector<double> uniform_faces(double R_max, int cells);

enum class InitialKind { Bounded, CompactSupport };

struct InitialData {
  std::function<double(double)> u0;
  InitialKind kind = InitialKind::CompactSupport;
  double sup_norm = 0;  // ‖u0‖∞
  double R = 0;         // supp u0 ⊂ B(0,R) when CompactSupport
  nlohmann::json spec;  // {"kind": ..., parameters}
};

/// min(a, a(2 - |4r/R - 2|))_+ : plateau of height a on [R/4, 3R/4].
InitialData bump_data(double amplitude = 1.0, double R = 1.0);
InitialData zero_data();
/// a·exp(-r²/w²), treated as Bounded.
InitialData gaussian_data(double amplitude, double width);
/// ε-rescaled data ε^{-2/(m-1)} u0(ε r).
InitialData rescaled_data(const InitialData& u0, double eps, double m);
/// Builds bump/zero/gaussian from {"kind": ..., ...}. Throws std::invalid_argument.
InitialData initial_data_from_json(const nlohmann::json& j);

/// max{ ln(sup/Q)/α, ln(2R/ξ0)/β, 0 } (R and ξ0 ignored when R ≤ 0).
double tau0_formula(double sup_norm, double Q, double alpha, double beta, double R, double xi0);

/// Delay τ0 with u0 ≤ U(·, τ0), certified on a grid of `checks` points.
/// Throws BarrierTooLow if certification still fails after two doublings,
/// WrongRegime if Bounded data are paired with a compactly supported U.
double tau0_for(const InitialData& u0, const SelfSimilarSolution& U, int checks = 4001);

enum class OuterBoundary { ZeroFlux, Clamped };

struct StepOptions {
  double cfl = 0.45;
  double u_floor = 1e-12;  // floor in the degenerate diffusion CFL denominator
  double reaction_bound = 0.1;
  double dt_min = 1e-14;
};

/// Largest stable Δt for the state (diffusion and reaction limits).
double stable_dt(const PdeState& s, const StepOptions& opt = {}, double ghost = 0.0);

/// One explicit step of size dt. The outer face is closed unless `ghost` ≥ 0,
/// in which case it is the value beyond R_max.
PdeState step(const PdeState& s, double dt, double ghost = -1.0);
/// Same with the stable Δt. Throws CflFailure if Δt < dt_min.
PdeState step(const PdeState& s, const StepOptions& opt = {});

struct Snapshot {
  double t = 0;
  std::vector<double> u;
  double support = 0;  // outer face of the last cell above threshold
  double max_u = 0;
  double mass = 0;
};

struct Trajectory {
  std::vector<double> r_faces;
  std::vector<double> centers;
  std::vector<double> volumes;
  double eps = 1;
  double threshold = 0;
  std::vector<Snapshot> snapshots;
  long steps = 0;
  long limiter_hits = 0;
  double min_u = 0;         // smallest value seen over all steps
  bool mass_monotone = true;  // zero-flux mass never decreased beyond rounding
};

struct Member {
  InitialData u0;
  double eps = 1;
  std::vector<double> r_faces;
  OuterBoundary outer = OuterBoundary::ZeroFlux;
  std::function<double(double t)> outer_value;  // Clamped only
};

struct RunOptions {
  double T = 1;
  std::vector<double> snapshot_times;  // 0 and T are always included
  StepOptions step;
  double support_threshold_rel = 1e-9;  // of max u0 over the ensemble
};

/// Advances all members with a common Δt (the smallest stable one), so the
/// discrete comparison principle applies between members on the same grid.
/// Throws CflFailure, DomainTooSmall (support at R_max on a zero-flux run).
std::vector<Trajectory> run_lockstep(const std::vector<Member>& members, const Params& params,
                                     const RunOptions& opt);

Trajectory run(const InitialData& u0, const Params& params, double eps, double T, int cells, double R_max,
               const RunOptions& opt = {});

/// R_max = 1.5 ξ0 e^{β(T+τ0)}.
double default_R_max(const SelfSimilarSolution& U, double T, double tau0);

/// max over snapshots and cells of u - U(r_c, t+τ0).
double compare_barrier(const Trajectory& traj, const SelfSimilarSolution& U, double tau0);

struct EpsPair {
  double eps_coarse = 0, eps_fine = 0;
  double min_margin = 0;       // min (u_fine - u_coarse)
  double cauchy_increment = 0; // max |u_fine - u_coarse|
};

struct EpsReport {
  std::vector<double> eps;
  std::vector<EpsPair> pairs;
  double min_margin = 0;
};

/// Pairwise checks over trajectories ordered by strictly decreasing ε.
EpsReport eps_monotonicity(const std::vector<Trajectory>& trajs);
/// Runs the sweep in lockstep on one grid and reports.
EpsReport eps_monotonicity(const InitialData& u0, const Params& params, const std::vector<double>& eps_list,
                           double T, int cells, double R_max, const RunOptions& opt = {});

/// Max |a - b| over common snapshots after averaging `fine` onto the grid of `coarse`
/// (fine must refine coarse by an integer factor).
double grid_difference(const Trajectory& coarse, const Trajectory& fine);

void to_json(nlohmann::json& j, const EpsReport& r);
void to_json(nlohmann::json& j, const StepOptions& s);

}  // namespace eternal
