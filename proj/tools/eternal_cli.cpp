// eternal: command-line front end.
//
// Exit codes: 0 ok, 1 other failure (including failed verify checks),
// 2 BracketFailure, 3 RangeViolation, 4 WrongRegime, 5 CflFailure,
// 6 DomainTooSmall. CLI11 usage errors keep CLI11's own codes.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eternal/errors.hpp"
#include "eternal/io.hpp"
#include "eternal/pde_sim.hpp"
#include "eternal/phase_plane.hpp"
#include "eternal/run_config.hpp"
#include "eternal/selfsim.hpp"
#include "eternal/shooter.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace eternal;

namespace {

// What a find-alpha-star run leaves behind, or the same computed on the fly.
struct AlphaStar {
  Params params = derive_params(2.0, 1.5, 3, 1.0);
  double xi0 = 0;
  double K = 1;
  double xi_max = 1e3;
  ProfileTolerances tolerances;
};

ShooterOptions cli_shooter_options(double K, double xi_max) {
  ShooterOptions o;
  o.K = K;
  o.xi_max = xi_max;
  o.tolerances = solution_tolerances();
  return o;
}

AlphaStar obtain_alpha_star(const std::string& file, const ExponentsConfig& e) {
  AlphaStar a;
  if (!file.empty()) {
    const json j = io::read_json(file);
    a.params = params_from_json(j.at("params"));
    a.xi0 = j.at("xi0").get<double>();
    a.K = j.value("K", 1.0);
    a.xi_max = j.value("xi_max", 1e3);
    if (j.contains("tolerances")) j.at("tolerances").get_to(a.tolerances);
    return a;
  }
  const auto r = find_alpha_star(e.m, e.p, e.N, 1e-8, cli_shooter_options(1.0, 1e3));
  a.params = r.profile.params;
  a.xi0 = r.xi0;
  a.K = r.options.K;
  a.xi_max = r.options.xi_max;
  a.tolerances = r.options.tolerances;
  return a;
}

ProfileGrid interface_profile(const AlphaStar& a) {
  auto g = integrate_profile(a.params, a.K, a.xi_max, a.tolerances, ShootMode::Interface);
  if (g.classification != OrbitClass::Interface)
    throw WrongRegime("alpha* profile re-integrated as " + to_string(g.classification));
  return g;
}

std::vector<double> farfield_column(const ProfileGrid& g) {
  const auto& P = g.params;
  const double C = farfield_constant(P);
  std::vector<double> col;
  col.reserve(g.points.size());
  for (const auto& q : g.points) {
    if (q.xi <= 1.0) {
      col.push_back(0.0);
      continue;
    }
    col.push_back(q.f * std::pow(q.xi, -2.0 / (P.m() - 1.0)) * std::pow(std::log(q.xi), 1.0 / (P.p() - 1.0)) / C);
  }
  return col;
}

json window_json(const RatioWindow& w, double lo, double hi) {
  return {{"lo", lo}, {"hi", hi}, {"samples", w.samples}, {"min_ratio", w.min_ratio}, {"max_ratio", w.max_ratio}};
}

// ---------------------------------------------------------------- commands

int cmd_find_alpha_star(const AlphaStarConfig& c, const fs::path& out) {
  const auto r = find_alpha_star(c.exponents.m, c.exponents.p, c.exponents.N, c.tol, cli_shooter_options(c.K, c.xi_max));
  json j = r;
  j["config"] = c;
  io::write_atomic(out / "profile.csv", io::profile_csv(r.profile));
  io::write_json(out / "alpha_star.json", j);
  std::printf("alpha* = %.17g  beta* = %.17g  xi0 = %.17g  (%zu evaluations)\n", r.alpha_star, r.beta_star, r.xi0,
              r.log.size());
  return 0;
}

int cmd_profile(const ProfileConfig& c, const fs::path& out) {
  const bool explicit_alpha = c.alpha > 0.0 || c.alpha_factor > 0.0;
  json diag;
  diag["config"] = c;
  if (!explicit_alpha) {
    const AlphaStar a = obtain_alpha_star(c.alpha_star_file, c.exponents);
    const auto g = interface_profile(a);
    json windows = json::array();
    for (auto [lo, hi] : {std::pair{1e-4, 1e-3}, {1e-3, 1e-2}, {1e-2, 1e-1}})
      windows.push_back(window_json(interface_ratio(g, *g.xi0, lo, hi), lo, hi));
    diag["params"] = g.params;
    diag["class"] = to_string(g.classification);
  diag["K"] = g.K;
  diag["tolerances"] = g.tolerances;
    diag["K"] = g.K;
    diag["tolerances"] = g.tolerances;
    diag["xi0"] = *g.xi0;
    diag["interface_ratio"] = windows;
    io::write_atomic(out / "profile.csv", io::profile_csv(g));
    io::write_json(out / "diagnostics.json", diag);
    std::printf("Interface profile, xi0 = %.17g\n", *g.xi0);
    return 0;
  }
  double alpha = c.alpha;
  const ExponentsConfig* e = &c.exponents;
  AlphaStar a;
  if (c.alpha_factor > 0.0) {
    a = obtain_alpha_star(c.alpha_star_file, c.exponents);
    alpha = c.alpha_factor * a.params.alpha();
  } else if (!c.alpha_star_file.empty()) {
    a = obtain_alpha_star(c.alpha_star_file, c.exponents);
  }
  ExponentsConfig ex = *e;
  if (!c.alpha_star_file.empty()) ex = {a.params.m(), a.params.p(), a.params.N()};
  ShooterOptions opt = cli_shooter_options(1.0, 1e3);
  const auto g = global_profile(alpha, ex.m, ex.p, ex.N, c.xi_max, opt);
  const auto col = farfield_column(g);
  diag["params"] = g.params;
  diag["class"] = to_string(g.classification);
  diag["minimum"] = {{"xi", g.minimum ? g.minimum->xi : 0.0}, {"f", g.minimum ? g.minimum->f : 0.0}};
  diag["farfield_constant"] = farfield_constant(g.params);
  diag["farfield_balance_constant"] = farfield_balance_constant(g.params);
  diag["farfield_ratio_last"] = col.empty() ? 0.0 : col.back();
  io::write_atomic(out / "profile.csv", io::profile_csv(g, "farfield_ratio", col));
  io::write_json(out / "diagnostics.json", diag);
  std::printf("TurnsUp profile to xi = %.6g, minimum f = %.17g\n", g.points.back().xi, g.minimum ? g.minimum->f : 0.0);
  return 0;
}

int cmd_phase_portrait(const PortraitConfig& c, const fs::path& out) {
  Params P = derive_params(c.exponents.m, c.exponents.p, c.exponents.N, c.alpha > 0 ? c.alpha : 1.0);
  if (c.alpha <= 0.0) P = obtain_alpha_star(c.alpha_star_file, c.exponents).params;
  std::vector<std::vector<double>> rows;
  // Orbit of the profile leaving the origin.
  const auto g = integrate_profile(P, 1.0, 1e3, solution_tolerances(), ShootMode::Classify);
  const auto eta = eta_by_quadrature(g.points, P);
  for (std::size_t i = 0; i < g.points.size(); ++i) {
    if (!(g.points[i].f > 0.0)) continue;
    const auto s = to_phase(g.points[i], P);
    rows.push_back({0.0, eta[i], s.X, s.Y});
  }
  for (int k = 1; k < c.trajectories; ++k) {
    const PhaseState start{2.0 * P.beta() * k / c.trajectories, 0.0, 0.0};
    for (const auto& s : integrate_phase(start, P, c.eta_end)) rows.push_back({double(k), s.eta, s.X, s.Y});
  }
  json cp;
  cp["params"] = P;
  cp["points"] = critical_points(P);
  io::write_atomic(out / "portrait.csv", io::csv({"traj_id", "eta", "X", "Y"}, rows));
  io::write_json(out / "critical_points.json", cp);
  std::printf("%d trajectories, %zu critical points\n", c.trajectories, cp["points"].size());
  return 0;
}

int cmd_simulate(const SimulateConfig& c, const fs::path& out) {
  const AlphaStar a = obtain_alpha_star(c.alpha_star_file, c.exponents);
  const Params& P = a.params;
  const InitialData u0 = initial_data_from_json(c.u0);
  const bool bounded = u0.kind == InitialKind::Bounded;

  SelfSimilarSolution U = [&] {
    if (!bounded) return SelfSimilarSolution(interface_profile(a));
    return SelfSimilarSolution(
        global_profile(c.barrier_factor * P.alpha(), P.m(), P.p(), P.N(), 1e6, cli_shooter_options(a.K, a.xi_max)));
  }();
  const double tau0 = tau0_for(u0, U);
  const double R_max = c.R_max > 0.0 ? c.R_max : bounded ? 2.0 * u0.R : default_R_max(U, c.T, tau0);

  RunOptions ro;
  ro.T = c.T;
  ro.snapshot_times = c.snapshots;
  ro.step.cfl = c.cfl;
  std::vector<Member> members;
  const auto faces = uniform_faces(R_max, c.cells);
  for (double e : c.eps) {
    Member mb{u0, e, faces, OuterBoundary::ZeroFlux, {}};
    if (bounded) {
      mb.outer = OuterBoundary::Clamped;
      const double r_ghost = R_max + 0.5 * (faces[1] - faces[0]);
      mb.outer_value = [&U, r_ghost, tau0](double t) { return U.eval(r_ghost, t + tau0); };
    }
    members.push_back(std::move(mb));
  }
  const auto trajs = run_lockstep(members, U.params(), ro);

  json report;
  report["config"] = c;
  report["barrier"] = {{"params", U.params()}, {"kind", to_string(U.kind())}, {"xi0", U.xi0()}};
  report["tau0"] = tau0;
  report["R_max"] = R_max;
  report["h"] = R_max / c.cells;
  json runs = json::array();
  for (const auto& tr : trajs) {
    json snaps = json::array();
    for (const auto& s : tr.snapshots)
      snaps.push_back({{"t", s.t},
                       {"support", s.support},
                       {"barrier_support", U.support_radius(s.t + tau0)},
                       {"max_u", s.max_u},
                       {"mass", s.mass}});
    runs.push_back({{"eps", tr.eps},
                    {"steps", tr.steps},
                    {"barrier_violation", compare_barrier(tr, U, tau0)},
                    {"min_u", tr.min_u},
                    {"limiter_hits", tr.limiter_hits},
                    {"mass_monotone", tr.mass_monotone},
                    {"snapshots", snaps}});
  }
  report["runs"] = runs;
  if (trajs.size() > 1) report["eps_monotonicity"] = eps_monotonicity(trajs);

  for (const auto& tr : trajs)
    for (const auto& s : tr.snapshots) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < s.u.size(); ++i) rows.push_back({tr.centers[i], s.u[i]});
      io::write_atomic(out / "snapshots" / ("eps_" + io::format_double(tr.eps) + "_t_" + io::format_double(s.t) + ".csv"),
                       io::csv({"r", "u"}, rows));
    }
  io::write_json(out / "report.json", report);
  std::printf("tau0 = %.6g, R_max = %.6g, %zu runs\n", tau0, R_max, trajs.size());
  return 0;
}

json check_eigenvalues(const Params& P) {
  const double m = P.m(), p = P.p(), b = P.beta();
  const int N = P.N();
  std::vector<std::pair<std::string, Vec2>> expect{{"P0", {-b, 0.0}},
                                                   {"P1", {-(m - 1.0) * b, b}},
                                                   {"Q1", {-(N - 2.0), 2.0 * (m - p) / (m - 1.0)}}};
  if (N != 2) expect.push_back({"Q4", {N - 2.0, (m - p) * (m * N - N + 2.0) / (m * (m - 1.0))}});
  double worst = 0.0, worst_pair = 0.0;
  const auto pts = critical_points(P);
  for (const auto& [name, ev] : expect) {
    for (const auto& r : pts) {
      if (r.name != name) continue;
      Vec2 want = ev;
      if (want[0] > want[1]) std::swap(want[0], want[1]);
      for (int i = 0; i < 2; ++i)
        worst = std::max(worst, std::abs(r.eigenvalues[i] - want[i]) / std::max(1.0, std::abs(want[i])));
    }
  }
  for (const auto& r : pts) {
    double norm = 0;
    for (auto& row : r.jacobian) for (double x : row) norm = std::max(norm, std::abs(x));
    for (int k = 0; k < 2; ++k) {
      const auto& v = r.eigenvectors[k];
      for (int i = 0; i < 2; ++i) {
        const double jv = r.jacobian[i][0] * v[0] + r.jacobian[i][1] * v[1];
        worst_pair = std::max(worst_pair, std::abs(jv - r.eigenvalues[k] * v[i]) / std::max(norm, 1e-300));
      }
    }
  }
  return {{"pass", worst <= 1e-12 && worst_pair <= 1e-12}, {"max_rel_error", worst}, {"max_pair_residual", worst_pair}};
}

json check_rescaling(const SelfSimilarSolution& U) {
  const double alpha = U.params().alpha();
  double worst = 0.0, scale = 0.0;
  const double rmax = std::isfinite(U.xi0()) ? 2.0 * U.xi0() : 10.0;
  for (double t0 : {-1.0, 1.0}) {
    const auto V = U.rescale(std::exp(alpha * t0));
    for (int i = 0; i < 100; ++i)
      for (int k = 0; k < 100; ++k) {
        const double r = rmax * i / 99.0, t = -2.0 + 4.0 * k / 99.0;
        const double u = U.eval(r, t + t0);
        scale = std::max(scale, std::abs(u));
        worst = std::max(worst, std::abs(V.eval(r, t) - u));
      }
  }
  return {{"pass", worst <= 1e-8 * scale}, {"max_abs_difference", worst}, {"scale", scale}};
}

json check_mass(const SelfSimilarSolution& U) {
  const auto& P = U.params();
  const double M0 = U.mass(0.0);
  double worst = 0.0;
  for (double t : {-1.0, 0.5, 2.0})
    worst = std::max(worst, std::abs(U.mass(t) / M0 / std::exp((P.alpha() + P.N() * P.beta()) * t) - 1.0));
  return {{"pass", M0 > 0.0 && worst <= 1e-6}, {"mass0", M0}, {"max_rel_error", worst}};
}

json check_residual(const SelfSimilarSolution& U) {
  const double xi0 = U.xi0();
  std::vector<double> norms;
  for (double h : {0.04, 0.02, 0.01, 0.005})
    norms.push_back(pde_residual(U, {0.25 * xi0, 0.75 * xi0, 0.0, 0.5, 21, 11, h}).max_norm);
  bool pass = true;
  std::vector<double> ratios;
  for (std::size_t i = 1; i < norms.size(); ++i) {
    ratios.push_back(norms[i - 1] / norms[i]);
    pass = pass && ratios.back() >= 3.5;
  }
  return {{"pass", pass}, {"h", {0.04, 0.02, 0.01, 0.005}}, {"max_norm", norms}, {"ratios", ratios}};
}

int cmd_verify(const VerifyConfig& c, const fs::path& out) {
  json report;
  report["config"] = c;
  json checks = json::array();
  bool all = true;
  if (!c.checks.empty()) {
    const AlphaStar a = obtain_alpha_star(c.alpha_star_file, c.exponents);
    ProfileGrid g;
    if (!c.profile_file.empty()) {
      g.params = a.params;
      g.K = a.K;
      g.tolerances = a.tolerances;
      g.points = io::read_profile_csv(c.profile_file);
      if (g.points.size() < 2) throw std::runtime_error("profile file has fewer than two samples");
      g.classification = OrbitClass::Interface;
      g.xi0 = a.xi0;
      g.xi_init = g.points.front().xi;
      g.xi_max = a.xi_max;
    } else {
      g = interface_profile(a);
    }
    const SelfSimilarSolution U(std::move(g));
    for (const auto& name : c.checks) {
      json r;
      if (name == "eigenvalues") r = check_eigenvalues(a.params);
      else if (name == "rescaling") r = check_rescaling(U);
      else if (name == "mass") r = check_mass(U);
      else if (name == "residual") r = check_residual(U);
      else r = {{"pass", false}, {"error", "unknown check"}};
      r["name"] = name;
      all = all && r["pass"].get<bool>();
      std::printf("%-12s %s\n", name.c_str(), r["pass"].get<bool>() ? "pass" : "FAIL");
      checks.push_back(r);
    }
  }
  report["checks"] = checks;
  report["pass"] = all;
  io::write_json(out / "verify.json", report);
  return all ? 0 : 1;
}

// ---------------------------------------------------------------- plumbing

std::string config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

void add_exponents(CLI::App* sub, ExponentsConfig& e) {
  sub->add_option("--m", e.m, "diffusion exponent m > 1");
  sub->add_option("--p", e.p, "reaction exponent 1 < p < m");
  sub->add_option("--N", e.N, "space dimension");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const BracketFailure*>(&e)) return 2;
  if (dynamic_cast<const RangeViolation*>(&e)) return 3;
  if (dynamic_cast<const WrongRegime*>(&e)) return 4;
  if (dynamic_cast<const CflFailure*>(&e)) return 5;
  if (dynamic_cast<const DomainTooSmall*>(&e)) return 6;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential self-similar solutions of u_t = Δu^m + |x|^σ u^p at the critical σ"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  std::string config_file, out_flag;
  app.add_option("--config", config_file, "JSON file with option values (flags override it)");
  app.add_option("--out", out_flag, "output directory (default: ETERNAL_OUT, then config 'out', then ./eternal_out)");

  json cfg = json::object();
  const std::string cpath = config_path(argc, argv);
  try {
    if (!cpath.empty()) cfg = io::read_json(cpath);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  AlphaStarConfig c_alpha;
  ProfileConfig c_profile;
  PortraitConfig c_portrait;
  SimulateConfig c_sim;
  VerifyConfig c_verify;
  try {
    from_json(cfg, c_alpha);
    from_json(cfg, c_profile);
    from_json(cfg, c_portrait);
    from_json(cfg, c_sim);
    from_json(cfg, c_verify);
  } catch (const std::exception& e) {
    std::cerr << "error: bad config " << cpath << ": " << e.what() << "\n";
    return 1;
  }

  auto* s_alpha = app.add_subcommand("find-alpha-star", "bisect for the critical exponent alpha*");
  add_exponents(s_alpha, c_alpha.exponents);
  s_alpha->add_option("--tol", c_alpha.tol, "relative bracket width");
  s_alpha->add_option("--K", c_alpha.K, "f(0)^{m-p}");
  s_alpha->add_option("--xi-max", c_alpha.xi_max, "integration limit in xi");

  auto* s_profile = app.add_subcommand("profile", "integrate a profile at alpha* or at a given alpha > alpha*");
  add_exponents(s_profile, c_profile.exponents);
  s_profile->add_option("--alpha-star-file", c_profile.alpha_star_file, "alpha_star.json from find-alpha-star");
  s_profile->add_option("--alpha", c_profile.alpha, "explicit alpha");
  s_profile->add_option("--alpha-factor", c_profile.alpha_factor, "alpha = factor * alpha*");
  s_profile->add_option("--xi-max", c_profile.xi_max, "far-field integration limit");

  auto* s_portrait = app.add_subcommand("phase-portrait", "phase-plane trajectories and critical points");
  add_exponents(s_portrait, c_portrait.exponents);
  s_portrait->add_option("--alpha-star-file", c_portrait.alpha_star_file);
  s_portrait->add_option("--alpha", c_portrait.alpha, "alpha (default: alpha*)");
  s_portrait->add_option("--trajectories", c_portrait.trajectories);
  s_portrait->add_option("--eta-end", c_portrait.eta_end);

  auto* s_sim = app.add_subcommand("simulate", "regularized radial PDE runs against the self-similar barrier");
  add_exponents(s_sim, c_sim.exponents);
  s_sim->add_option("--alpha-star-file", c_sim.alpha_star_file);
  s_sim->add_option("--eps", c_sim.eps, "regularizations, strictly decreasing")->delimiter(',');
  s_sim->add_option("--T", c_sim.T);
  s_sim->add_option("--cells", c_sim.cells);
  s_sim->add_option("--R-max", c_sim.R_max, "outer radius (0: automatic)");
  s_sim->add_option("--cfl", c_sim.cfl);
  s_sim->add_option("--snapshots", c_sim.snapshots, "extra snapshot times")->delimiter(',');
  std::string u0_json;
  s_sim->add_option("--u0", u0_json, "initial data as JSON, e.g. '{\"kind\":\"zero\"}'");
  s_sim->add_option("--barrier-factor", c_sim.barrier_factor, "bounded data: barrier alpha = factor * alpha*");

  auto* s_verify = app.add_subcommand("verify", "cross-module property checks");
  add_exponents(s_verify, c_verify.exponents);
  s_verify->add_option("--alpha-star-file", c_verify.alpha_star_file);
  s_verify->add_option("--profile", c_verify.profile_file, "profile.csv to check instead of a fresh integration");
  std::string checks;
  auto* checks_opt = s_verify->add_option("--checks", checks, "comma-separated: eigenvalues,rescaling,mass,residual");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  fs::path out = "eternal_out";
  if (cfg.contains("out")) out = cfg["out"].get<std::string>();
  if (const char* env = std::getenv("ETERNAL_OUT"); env && *env) out = env;
  if (!out_flag.empty()) out = out_flag;

  try {
    if (*s_alpha) return cmd_find_alpha_star(c_alpha, out);
    if (*s_profile) return cmd_profile(c_profile, out);
    if (*s_portrait) return cmd_phase_portrait(c_portrait, out);
    if (*s_sim) {
      if (!u0_json.empty()) c_sim.u0 = json::parse(u0_json);
      return cmd_simulate(c_sim, out);
    }
    if (*s_verify) {
      if (checks_opt->count() > 0) {
        c_verify.checks.clear();
        std::stringstream ss(checks);
        for (std::string item; std::getline(ss, item, ',');)
          if (!item.empty()) c_verify.checks.push_back(item);
      }
      return cmd_verify(c_verify, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 1;
}
