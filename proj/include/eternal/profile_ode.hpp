#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "eternal/params.hpp"

namespace eternal {

/// A sample of the self-similar profile: ξ, f(ξ) and the flux w = (f^m)'(ξ).
struct ProfilePoint {
  double xi = 0;
  double f = 0;
  double w = 0;
};

/// Fate of the orbit leaving the origin with f(0) > 0.
///   CrossesZero  f vanishes with nonzero flux (orbit enters Q3)
///   TurnsUp      f reaches a positive minimum and grows (orbit enters P0)
///   Interface    f and (f^m)' vanish together (orbit enters P1)
enum class OrbitClass { CrossesZero, TurnsUp, Interface, Inconclusive };

std::string to_string(OrbitClass c);
OrbitClass orbit_class_from_string(const std::string& s);

struct ProfileTolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  double event_tol = 1e-12;     // event location accuracy in the independent variable
  double series_delta = 1e-8;   // correction term at ξ_init relative to K
  double f_floor_rel = 1e-10;   // f_floor = f_floor_rel · f(0)
  double w_floor_rel = 1e-8;    // w_floor = w_floor_rel · β ξ
  double sample_spacing = 5e-3; // stored samples: Δξ ≤ spacing · max(ξ, ξ_scale)
};

/// How integrate_profile treats the terminating events.
enum class ShootMode {
  Classify,   // never stops at the interface floor; runs until the orbit is certified
  Interface,  // stops at f = f_floor with vanishing flux and labels it Interface
  FarField,   // continues past the minimum of a TurnsUp orbit up to xi_max
};

/// Point of the η-parametrised phase trajectory recorded after the chart switch.
struct PhaseSample {
  double eta = 0;
  double X = 0;
  double Y = 0;
  double xi = 0;
};

struct ProfileGrid {
  std::vector<ProfilePoint> points;  // strictly increasing xi, points[0].xi == xi_init
  OrbitClass classification = OrbitClass::Inconclusive;
  std::optional<double> xi0;  // interface location (Interface only)
  double K = 1.0;
  Params params = derive_params(2.0, 1.5, 3, 1.0);
  ProfileTolerances tolerances;
  double xi_init = 0;
  double xi_max = 0;
  double event_xi = 0;  // ξ at the terminating (or, for FarField, the turning) event
  double event_w = 0;   // flux at that event
  std::optional<ProfilePoint> minimum;  // positive minimum of a TurnsUp orbit
  std::vector<PhaseSample> phase;       // trajectory in (η, X, Y) after the chart switch
  double switch_xi = 0;                 // where the ξ-integration handed over to the η chart
  long steps = 0;

  double f_origin() const;
};

/// f' and w' of the first-order form of the profile equation.
/// Throws DegenerateState for f ≤ 0 or ξ ≤ 0.
std::pair<double, double> rhs_profile(const ProfilePoint& state, const Params& params);

/// Coefficient c of the origin law f = [K - c ξ^{2(m-p)/(m-1)}]^{1/(m-p)}.
double origin_series_coefficient(const Params& params);

/// Leading-order expansion at the origin. Throws SeriesOutOfRange when the bracket is ≤ 0.
ProfilePoint series_origin(const Params& params, double K, double xi);

/// Radius where the origin correction reaches delta·K.
double series_handoff_radius(const Params& params, double K, double delta);

/// Interface law f = [β(m-1)(ξ0² - ξ²)/(2m)]_+^{1/(m-1)}, with w = -β ξ f.
ProfilePoint series_interface(const Params& params, double xi0, double xi);

/// Constant of the far-field law f ~ C ξ^{2/(m-1)} (log ξ)^{-1/(p-1)}.
double farfield_constant(const Params& params);

/// Constant A of f ~ A ξ^{2/(m-1)} (log ξ)^{-1/(p-1)} from the dominant balance
/// βA/(p-1) = A^p of the profile equation: A = (β/(p-1))^{1/(p-1)}.
double farfield_balance_constant(const Params& params);

/// Shoots the orbit leaving the origin with f(0)^{m-p} = K and integrates it
/// until one of the classification events fires (see ShootMode).
/// Throws std::invalid_argument if xi_max ≤ ξ_init or K ≤ 0, StepFailure if the
/// step size underflows before any event.
ProfileGrid integrate_profile(const Params& params, double K, double xi_max,
                              const ProfileTolerances& tol = {},
                              ShootMode mode = ShootMode::Classify);

/// Interface fit: ξ0 from the deepest samples, using f^{m-1} = β(m-1)(ξ0²-ξ²)/(2m).
std::optional<double> fit_interface(const ProfileGrid& grid);

struct RatioWindow {
  double min_ratio = 0;
  double max_ratio = 0;
  std::size_t samples = 0;
};

/// f^{m-1}(ξ) / [β(m-1)(ξ0²-ξ²)/(2m)] over samples with (ξ0-ξ)/ξ0 in [lo, hi].
RatioWindow interface_ratio(const ProfileGrid& grid, double xi0, double lo, double hi);

/// f(ξ) ξ^{-2/(m-1)} (log ξ)^{1/(p-1)} along the samples with ξ > e.
std::vector<std::pair<double, double>> farfield_ratio(const ProfileGrid& grid);

void to_json(nlohmann::json& j, const ProfileTolerances& t);
void from_json(const nlohmann::json& j, ProfileTolerances& t);

}  // namespace eternal
