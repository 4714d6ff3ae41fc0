#include "eternal/run_config.hpp"

namespace eternal {

namespace {

// Missing keys keep the current (default) value.
template <class T>
void take(const nlohmann::json& j, const char* key, T& field) {
  if (auto it = j.find(key); it != j.end()) it->get_to(field);
}

}  // namespace

void to_json(nlohmann::json& j, const ExponentsConfig& c) { j = {{"m", c.m}, {"p", c.p}, {"N", c.N}}; }
void from_json(const nlohmann::json& j, ExponentsConfig& c) {
  take(j, "m", c.m);
  take(j, "p", c.p);
  take(j, "N", c.N);
}

void to_json(nlohmann::json& j, const AlphaStarConfig& c) {
  j = c.exponents;
  j["tol"] = c.tol;
  j["K"] = c.K;
  j["xi_max"] = c.xi_max;
}
void from_json(const nlohmann::json& j, AlphaStarConfig& c) {
  from_json(j, c.exponents);
  take(j, "tol", c.tol);
  take(j, "K", c.K);
  take(j, "xi_max", c.xi_max);
}

void to_json(nlohmann::json& j, const ProfileConfig& c) {
  j = c.exponents;
  j["alpha_star_file"] = c.alpha_star_file;
  j["alpha"] = c.alpha;
  j["alpha_factor"] = c.alpha_factor;
  j["xi_max"] = c.xi_max;
}
void from_json(const nlohmann::json& j, ProfileConfig& c) {
  from_json(j, c.exponents);
  take(j, "alpha_star_file", c.alpha_star_file);
  take(j, "alpha", c.alpha);
  take(j, "alpha_factor", c.alpha_factor);
  take(j, "xi_max", c.xi_max);
}

void to_json(nlohmann::json& j, const PortraitConfig& c) {
  j = c.exponents;
  j["alpha_star_file"] = c.alpha_star_file;
  j["alpha"] = c.alpha;
  j["trajectories"] = c.trajectories;
  j["eta_end"] = c.eta_end;
}
void from_json(const nlohmann::json& j, PortraitConfig& c) {
  from_json(j, c.exponents);
  take(j, "alpha_star_file", c.alpha_star_file);
  take(j, "alpha", c.alpha);
  take(j, "trajectories", c.trajectories);
  take(j, "eta_end", c.eta_end);
}

void to_json(nlohmann::json& j, const SimulateConfig& c) {
  j = c.exponents;
  j["alpha_star_file"] = c.alpha_star_file;
  j["eps"] = c.eps;
  j["T"] = c.T;
  j["cells"] = c.cells;
  j["R_max"] = c.R_max;
  j["cfl"] = c.cfl;
  j["snapshots"] = c.snapshots;
  j["u0"] = c.u0;
  j["barrier_factor"] = c.barrier_factor;
}
void from_json(const nlohmann::json& j, SimulateConfig& c) {
  from_json(j, c.exponents);
  take(j, "alpha_star_file", c.alpha_star_file);
  take(j, "eps", c.eps);
  take(j, "T", c.T);
  take(j, "cells", c.cells);
  take(j, "R_max", c.R_max);
  take(j, "cfl", c.cfl);
  take(j, "snapshots", c.snapshots);
  take(j, "u0", c.u0);
  take(j, "barrier_factor", c.barrier_factor);
}

void to_json(nlohmann::json& j, const VerifyConfig& c) {
  j = c.exponents;
  j["alpha_star_file"] = c.alpha_star_file;
  j["profile_file"] = c.profile_file;
  j["checks"] = c.checks;
}
void from_json(const nlohmann::json& j, VerifyConfig& c) {
  from_json(j, c.exponents);
  take(j, "alpha_star_file", c.alpha_star_file);
  take(j, "profile_file", c.profile_file);
  take(j, "checks", c.checks);
}

}  // namespace eternal
