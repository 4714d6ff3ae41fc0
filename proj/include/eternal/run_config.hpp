#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace eternal {

struct ExponentsConfig {
  double m = 2.0;
  double p = 1.5;
  int N = 3;
  bool operator==(const ExponentsConfig&) const = default;
};

struct AlphaStarConfig {
  ExponentsConfig exponents;
  double tol = 1e-8;
  double K = 1.0;
  double xi_max = 1e3;
  bool operator==(const AlphaStarConfig&) const = default;
};

struct ProfileConfig {
  ExponentsConfig exponents;
  std::string alpha_star_file;  // alpha* (and exponents) from a find-alpha-star run
  double alpha = 0;             // explicit alpha when > 0
  double alpha_factor = 0;      // alpha = factor * alpha* when > 0
  double xi_max = 1e6;          // far field only
  bool operator==(const ProfileConfig&) const = default;
};

struct PortraitConfig {
  ExponentsConfig exponents;
  std::string alpha_star_file;
  double alpha = 0;
  int trajectories = 3;
  double eta_end = 200;
  bool operator==(const PortraitConfig&) const = default;
};

struct SimulateConfig {
  ExponentsConfig exponents;
  std::string alpha_star_file;
  std::vector<double> eps{1.0, 0.5, 0.25};
  double T = 1.0;
  int cells = 512;
  double R_max = 0;  // 0: 1.5 ξ0 e^{β(T+τ0)}
  double cfl = 0.45;
  std::vector<double> snapshots{0.25, 0.5, 0.75};
  nlohmann::json u0 = {{"kind", "bump"}, {"amplitude", 1.0}, {"R", 1.0}};
  double barrier_factor = 2.0;  // bounded data: barrier at factor * alpha*
  bool operator==(const SimulateConfig&) const = default;
};

struct VerifyConfig {
  ExponentsConfig exponents;
  std::string alpha_star_file;
  std::string profile_file;
  std::vector<std::string> checks{"eigenvalues", "rescaling", "mass", "residual"};
  bool operator==(const VerifyConfig&) const = default;
};

void to_json(nlohmann::json& j, const ExponentsConfig& c);
void from_json(const nlohmann::json& j, ExponentsConfig& c);
void to_json(nlohmann::json& j, const AlphaStarConfig& c);
void from_json(const nlohmann::json& j, AlphaStarConfig& c);
void to_json(nlohmann::json& j, const ProfileConfig& c);
void from_json(const nlohmann::json& j, ProfileConfig& c);
void to_json(nlohmann::json& j, const PortraitConfig& c);
void from_json(const nlohmann::json& j, PortraitConfig& c);
void to_json(nlohmann::json& j, const SimulateConfig& c);
void from_json(const nlohmann::json& j, SimulateConfig& c);
void to_json(nlohmann::json& j, const VerifyConfig& c);
void from_json(const nlohmann::json& j, VerifyConfig& c);

}  // namespace eternal
