#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eternal/params.hpp"
#include "eternal/profile_ode.hpp"

namespace eternal {

struct ShooterOptions {
  double K = 1.0;
  double xi_max = 1e3;
  ProfileTolerances tolerances;
  // Keep bisecting past tol_alpha until the bracket is one ulp wide.
  bool refine_to_resolution = true;
};

struct BisectionEntry {
  std::string stage;  // "expand", "bisect", "verify"
  double alpha = 0;
  OrbitClass cls = OrbitClass::Inconclusive;
};

struct AlphaStarResult {
  double alpha_star = 0;
  double beta_star = 0;
  double alpha_lo = 0;
  double alpha_hi = 0;
  double xi0 = 0;
  double tol_alpha = 0;
  ShooterOptions options;
  ProfileGrid profile;
  std::vector<BisectionEntry> log;

  Params params() const { return profile.params; }
};

/// CrossesZero, TurnsUp or Inconclusive (one retry with 10·xi_max first).
OrbitClass classify(const Params& params, const ShooterOptions& opt = {});
OrbitClass classify(double alpha, double m, double p, int N, double K = 1.0);

/// Throws BracketFailure, NonMonotoneWitness, StepFailure (inconclusive orbit).
AlphaStarResult find_alpha_star(double m, double p, int N, double tol_alpha = 1e-8,
                                const ShooterOptions& opt = {});

/// Throws NonMonotoneWitness if the log contains a TurnsUp below a CrossesZero.
void check_monotone(const std::vector<BisectionEntry>& log);

/// TurnsUp profile integrated to xi_max. WrongRegime unless classify gives TurnsUp.
ProfileGrid global_profile(double alpha, double m, double p, int N, double xi_max,
                           const ShooterOptions& opt = {});

void to_json(nlohmann::json& j, const BisectionEntry& e);
void to_json(nlohmann::json& j, const AlphaStarResult& r);

}  // namespace eternal
