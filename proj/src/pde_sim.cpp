#include "eternal/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "eternal/errors.hpp"

namespace eternal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> cell_averages(const std::function<double(double)>& f, const std::vector<double>& faces, int N) {
  std::vector<double> out(faces.size() - 1);
  for (std::size_t i = 0; i + 1 < faces.size(); ++i) {
    const double a = faces[i], b = faces[i + 1];
    const double vol = (std::pow(b, N) - std::pow(a, N)) / N;
    const double integral = boost::math::quadrature::gauss<double, 8>::integrate(
        [&](double r) { return f(r) * std::pow(r, N - 1); }, a, b);
    out[i] = std::max(0.0, integral / vol);
  }
  return out;
}

double support_of(const std::vector<double>& u, const std::vector<double>& faces, double threshold) {
  for (std::size_t i = u.size(); i-- > 0;)
    if (u[i] > threshold) return faces[i + 1];
  return 0.0;
}

}  // namespace

std::vector<double> PdeState::centers() const {
  std::vector<double> c(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) c[i] = 0.5 * (r_faces[i] + r_faces[i + 1]);
  return c;
}

std::vector<double> PdeState::volumes() const {
  const int N = params.N();
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = (std::pow(r_faces[i + 1], N) - std::pow(r_faces[i], N)) / N;
  return v;
}

double PdeState::mass() const {
  const auto v = volumes();
  double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

std::vector<double> uniform_faces(double R_max, int cells) {
  if (!(R_max > 0.0) || cells < 1) throw std::invalid_argument("grid needs R_max > 0 and at least one cell");
  std::vector<double> f(cells + 1);
  for (int i = 0; i <= cells; ++i) f[i] = R_max * i / cells;
  return f;
}

InitialData bump_data(double a, double R) {
  InitialData d;
  d.u0 = [a, R](double r) { return std::max(0.0, std::min(a, a * (2.0 - std::abs(4.0 * r / R - 2.0)))); };
  d.kind = InitialKind::CompactSupport;
  d.sup_norm = std::max(a, 0.0);
  d.R = R;
  d.spec = {{"kind", "bump"}, {"amplitude", a}, {"R", R}};
  return d;
}

InitialData zero_data() {
  InitialData d;
  d.u0 = [](double) { return 0.0; };
  d.kind = InitialKind::CompactSupport;
  d.spec = {{"kind", "zero"}};
  return d;
}

InitialData gaussian_data(double a, double w) {
  InitialData d;
  d.u0 = [a, w](double r) { return a * std::exp(-r * r / (w * w)); };
  d.kind = InitialKind::Bounded;
  d.sup_norm = a;
  d.R = 6.0 * w;  // verification radius only
  d.spec = {{"kind", "gaussian"}, {"amplitude", a}, {"width", w}};
  return d;
}

InitialData rescaled_data(const InitialData& base, double eps, double m) {
  const double s = std::pow(eps, -2.0 / (m - 1.0));
  InitialData d;
  d.u0 = [f = base.u0, s, eps](double r) { return s * f(eps * r); };
  d.kind = base.kind;
  d.sup_norm = s * base.sup_norm;
  d.R = base.R / eps;
  d.spec = {{"kind", "rescaled"}, {"eps", eps}, {"base", base.spec}};
  return d;
}

InitialData initial_data_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "bump") return bump_data(j.value("amplitude", 1.0), j.value("R", 1.0));
  if (kind == "zero") return zero_data();
  if (kind == "gaussian") return gaussian_data(j.value("amplitude", 1.0), j.value("width", 1.0));
  throw std::invalid_argument("unknown initial data kind '" + kind + "'");
}

double tau0_formula(double sup_norm, double Q, double alpha, double beta, double R, double xi0) {
  double tau = 0.0;
  if (sup_norm > 0.0) tau = std::max(tau, std::log(sup_norm / Q) / alpha);
  if (R > 0.0 && std::isfinite(xi0)) tau = std::max(tau, std::log(2.0 * R / xi0) / beta);
  return tau;
}

double tau0_for(const InitialData& u0, const SelfSimilarSolution& U, int checks) {
  if (!(u0.sup_norm > 0.0)) return 0.0;
  const auto& P = U.params();
  double tau;
  if (u0.kind == InitialKind::Bounded) {
    if (U.kind() != SolutionKind::Global) throw WrongRegime("bounded data need a global barrier (alpha > alpha*)");
    tau = tau0_formula(u0.sup_norm, U.barrier_floor(), P.alpha(), P.beta(), 0.0, kInf);
  } else {
    tau = tau0_formula(u0.sup_norm, U.barrier_floor(), P.alpha(), P.beta(), u0.R, U.xi0());
  }
  const double R = u0.R > 0.0 ? u0.R : U.support_radius(0.0);
  for (int attempt = 0; attempt < 3; ++attempt) {
    bool ok = true;
    for (int k = 0; k < checks && ok; ++k) {
      const double r = R * k / (checks - 1);
      ok = u0.u0(r) <= U.eval(r, tau);
    }
    if (ok) return tau;
    tau = std::max(2.0 * tau, std::log(2.0) / P.alpha());
  }
  throw BarrierTooLow("initial data exceed the barrier even after doubling tau0 twice");
}

namespace {

// Per-grid constants of the scheme.
struct Geometry {
  std::vector<double> vol, rc, area, dist, weight;  // area/dist per face, weight (r_c+ε)^σ per cell
  double dr_min = kInf;

  Geometry(const PdeState& s) {
    const auto& P = s.params;
    const int N = P.N();
    const std::size_t n = s.u.size();
    const auto& rf = s.r_faces;
    vol.resize(n);
    rc.resize(n);
    weight.resize(n);
    area.assign(n + 1, 0.0);
    dist.assign(n + 1, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      vol[i] = (std::pow(rf[i + 1], N) - std::pow(rf[i], N)) / N;
      rc[i] = 0.5 * (rf[i] + rf[i + 1]);
      weight[i] = std::pow(rc[i] + s.eps, P.sigma());
      dr_min = std::min(dr_min, rf[i + 1] - rf[i]);
    }
    for (std::size_t i = 1; i <= n; ++i) {
      area[i] = std::pow(rf[i], N - 1);
      dist[i] = i < n ? rc[i] - rc[i - 1] : rf[n] - rf[n - 1];
    }
  }
};

double stable_dt_impl(const PdeState& s, const Geometry& G, const StepOptions& opt, double ghost) {
  const auto& P = s.params;
  const double m = P.m(), p = P.p();
  double umax = std::max(opt.u_floor, ghost);
  double react = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    umax = std::max(umax, s.u[i]);
    if (s.u[i] > 0.0) react = std::max(react, G.weight[i] * std::pow(s.u[i], p - 1.0));
  }
  const double dt_diff = opt.cfl * G.dr_min * G.dr_min / (2.0 * P.N() * m * std::pow(umax, m - 1.0));
  const double dt_react = react > 0.0 ? opt.reaction_bound / react : kInf;
  return std::min(dt_diff, dt_react);
}

void step_impl(PdeState& s, const Geometry& G, double dt, double ghost, long* limiter_hits) {
  const auto& P = s.params;
  const double m = P.m(), p = P.p();
  const std::size_t n = s.u.size();

  thread_local std::vector<double> um, F, theta;
  um.resize(n);
  for (std::size_t i = 0; i < n; ++i) um[i] = std::pow(s.u[i], m);
  // F[i]: outward flux through face i (from cell i-1 into cell i), times the face area.
  F.assign(n + 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) F[i] = -G.area[i] * (um[i] - um[i - 1]) / G.dist[i];
  if (ghost >= 0.0) F[n] = -G.area[n] * (std::pow(ghost, m) - um[n - 1]) / G.dist[n];

  // Limit outflow to the content of the donor cell.
  theta.assign(n, 1.0);
  bool limited = false;
  for (std::size_t i = 0; i < n; ++i) {
    const double out = dt * (std::max(F[i + 1], 0.0) + std::max(-F[i], 0.0));
    const double content = s.u[i] * G.vol[i];
    if (out > content) {
      theta[i] = out > 0.0 ? content / out : 0.0;
      limited = true;
      if (limiter_hits) ++*limiter_hits;
    }
  }
  if (limited) {
    for (std::size_t i = 1; i < n; ++i) F[i] *= F[i] > 0.0 ? theta[i - 1] : theta[i];
    if (F[n] > 0.0) F[n] *= theta[n - 1];
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double u = s.u[i];
    const double react = u > 0.0 ? G.weight[i] * std::pow(u, p) : 0.0;
    s.u[i] = std::max(0.0, u + dt * ((F[i] - F[i + 1]) / G.vol[i] + react));
  }
  s.t += dt;
}

}  // namespace

double stable_dt(const PdeState& s, const StepOptions& opt, double ghost) {
  return stable_dt_impl(s, Geometry(s), opt, ghost);
}

PdeState step(const PdeState& s, double dt, double ghost) {
  PdeState next = s;
  step_impl(next, Geometry(s), dt, ghost, nullptr);
  return next;
}

PdeState step(const PdeState& s, const StepOptions& opt) {
  const Geometry G(s);
  const double dt = stable_dt_impl(s, G, opt, 0.0);
  if (dt < opt.dt_min) throw CflFailure("time step " + std::to_string(dt) + " below dt_min");
  PdeState next = s;
  step_impl(next, G, dt, -1.0, nullptr);
  return next;
}

std::vector<Trajectory> run_lockstep(const std::vector<Member>& members, const Params& params, const RunOptions& opt) {
  if (!(opt.T > 0.0)) throw std::invalid_argument("run needs T > 0");
  std::vector<double> times{0.0, opt.T};
  for (double t : opt.snapshot_times)
    if (t > 0.0 && t < opt.T) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const std::size_t K = members.size();
  std::vector<PdeState> states(K);
  std::vector<Geometry> geom;
  std::vector<Trajectory> out(K);
  double u0max = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& mb = members[k];
    if (!(mb.eps > 0.0 && mb.eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
    if (mb.r_faces.size() < 2) throw std::invalid_argument("member grid needs at least one cell");
    if (mb.outer == OuterBoundary::Clamped && !mb.outer_value)
      throw std::invalid_argument("clamped boundary needs outer values");
    states[k].r_faces = mb.r_faces;
    states[k].eps = mb.eps;
    states[k].params = params;
    states[k].u = cell_averages(mb.u0.u0, mb.r_faces, params.N());
    for (double v : states[k].u) u0max = std::max(u0max, v);
    geom.emplace_back(states[k]);
    out[k].r_faces = mb.r_faces;
    out[k].centers = states[k].centers();
    out[k].volumes = states[k].volumes();
    out[k].eps = mb.eps;
  }
  const double threshold = opt.support_threshold_rel * u0max;

  std::vector<double> last_mass(K);
  auto record = [&](std::size_t k) {
    const auto& s = states[k];
    Snapshot snap;
    snap.t = s.t;
    snap.u = s.u;
    snap.support = support_of(s.u, s.r_faces, threshold);
    snap.max_u = s.u.empty() ? 0.0 : *std::max_element(s.u.begin(), s.u.end());
    snap.mass = s.mass();
    out[k].snapshots.push_back(std::move(snap));
  };
  for (std::size_t k = 0; k < K; ++k) {
    out[k].threshold = threshold;
    out[k].min_u = *std::min_element(states[k].u.begin(), states[k].u.end());
    last_mass[k] = states[k].mass();
    record(k);
  }

  double t = 0.0;
  std::vector<double> ghost(K, -1.0);
  for (std::size_t target = 1; target < times.size(); ++target) {
    const double t_target = times[target];
    while (t < t_target) {
      double dt = t_target - t;
      for (std::size_t k = 0; k < K; ++k) {
        ghost[k] = members[k].outer == OuterBoundary::Clamped ? std::max(0.0, members[k].outer_value(t)) : -1.0;
        dt = std::min(dt, stable_dt_impl(states[k], geom[k], opt.step, std::max(ghost[k], 0.0)));
      }
      const bool last = dt >= t_target - t;
      if (!last && dt < opt.step.dt_min)
        throw CflFailure("time step " + std::to_string(dt) + " below dt_min at t=" + std::to_string(t));
      for (std::size_t k = 0; k < K; ++k) {
        step_impl(states[k], geom[k], dt, ghost[k], &out[k].limiter_hits);
        auto& s = states[k];
        ++out[k].steps;
        out[k].min_u = std::min(out[k].min_u, *std::min_element(s.u.begin(), s.u.end()));
        if (members[k].outer == OuterBoundary::ZeroFlux) {
          if (s.u.back() > threshold)
            throw DomainTooSmall("support reached R_max=" + std::to_string(s.r_faces.back()) +
                                 " at t=" + std::to_string(s.t));
          double mass = 0.0;
          for (std::size_t i = 0; i < s.u.size(); ++i) mass += s.u[i] * geom[k].vol[i];
          if (mass < last_mass[k] * (1.0 - 1e-13)) out[k].mass_monotone = false;
          last_mass[k] = mass;
        }
      }
      t = last ? t_target : t + dt;
      if (last)
        for (auto& s : states) s.t = t_target;
    }
    for (std::size_t k = 0; k < K; ++k) record(k);
  }
  return out;
}

Trajectory run(const InitialData& u0, const Params& params, double eps, double T, int cells, double R_max,
               const RunOptions& opt) {
  RunOptions o = opt;
  o.T = T;
  Member mb{u0, eps, uniform_faces(R_max, cells), OuterBoundary::ZeroFlux, {}};
  return std::move(run_lockstep({mb}, params, o).front());
}

double default_R_max(const SelfSimilarSolution& U, double T, double tau0) {
  return 1.5 * U.xi0() * std::exp(U.params().beta() * (T + tau0));
}

double compare_barrier(const Trajectory& traj, const SelfSimilarSolution& U, double tau0) {
  double worst = -kInf;
  for (const auto& snap : traj.snapshots)
    for (std::size_t i = 0; i < snap.u.size(); ++i)
      worst = std::max(worst, snap.u[i] - U.eval(traj.centers[i], snap.t + tau0));
  return worst;
}

EpsReport eps_monotonicity(const std::vector<Trajectory>& trajs) {
  EpsReport rep;
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    rep.eps.push_back(trajs[k].eps);
    if (k > 0 && !(trajs[k].eps < trajs[k - 1].eps)) throw std::invalid_argument("eps list must be strictly decreasing");
  }
  for (std::size_t k = 0; k + 1 < trajs.size(); ++k) {
    const auto& a = trajs[k];
    const auto& b = trajs[k + 1];
    if (a.snapshots.size() != b.snapshots.size() || a.centers.size() != b.centers.size())
      throw std::invalid_argument("eps runs need common snapshots and grid");
    EpsPair pr{a.eps, b.eps, kInf, 0.0};
    for (std::size_t s = 0; s < a.snapshots.size(); ++s)
      for (std::size_t i = 0; i < a.centers.size(); ++i) {
        const double d = b.snapshots[s].u[i] - a.snapshots[s].u[i];
        pr.min_margin = std::min(pr.min_margin, d);
        pr.cauchy_increment = std::max(pr.cauchy_increment, std::abs(d));
      }
    rep.pairs.push_back(pr);
  }
  rep.min_margin = 0.0;
  for (const auto& pr : rep.pairs) rep.min_margin = std::min(rep.min_margin, pr.min_margin);
  return rep;
}

EpsReport eps_monotonicity(const InitialData& u0, const Params& params, const std::vector<double>& eps_list,
                           double T, int cells, double R_max, const RunOptions& opt) {
  RunOptions o = opt;
  o.T = T;
  std::vector<Member> members;
  const auto faces = uniform_faces(R_max, cells);
  for (double e : eps_list) members.push_back({u0, e, faces, OuterBoundary::ZeroFlux, {}});
  return eps_monotonicity(run_lockstep(members, params, o));
}

double grid_difference(const Trajectory& coarse, const Trajectory& fine) {
  const std::size_t nc = coarse.centers.size(), nf = fine.centers.size();
  if (nc == 0 || nf % nc != 0) throw std::invalid_argument("fine grid must refine the coarse one");
  if (coarse.snapshots.size() != fine.snapshots.size()) throw std::invalid_argument("snapshot times differ");
  const std::size_t q = nf / nc;
  double worst = 0.0;
  for (std::size_t s = 0; s < coarse.snapshots.size(); ++s) {
    const auto& uc = coarse.snapshots[s].u;
    const auto& uf = fine.snapshots[s].u;
    for (std::size_t i = 0; i < nc; ++i) {
      double num = 0.0, den = 0.0;
      for (std::size_t j = i * q; j < (i + 1) * q; ++j) {
        const double w = fine.volumes[j];
        num += uf[j] * w;
        den += w;
      }
      worst = std::max(worst, std::abs(num / den - uc[i]));
    }
  }
  return worst;
}

void to_json(nlohmann::json& j, const EpsReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.pairs)
    pairs.push_back({{"eps_coarse", p.eps_coarse},
                     {"eps_fine", p.eps_fine},
                     {"min_margin", p.min_margin},
                     {"cauchy_increment", p.cauchy_increment}});
  j = nlohmann::json{{"eps", r.eps}, {"pairs", pairs}, {"min_margin", r.min_margin}};
}

void to_json(nlohmann::json& j, const StepOptions& s) {
  j = nlohmann::json{{"cfl", s.cfl}, {"u_floor", s.u_floor}, {"reaction_bound", s.reaction_bound}, {"dt_min", s.dt_min}};
}

}  // namespace eternal
