#include "eternal/params.hpp"

#include <cmath>
#include <sstream>

#include "eternal/errors.hpp"

namespace eternal {

namespace {

[[noreturn]] void violated(const std::string& inequality, double value) {
  std::ostringstream os;
  os.precision(17);
  os << "required " << inequality << " (got " << value << ")";
  throw RangeViolation(os.str());
}

}  // namespace

double Params::reaction_coefficient() const {
  return std::pow(m_, (1.0 - p_) / (m_ - 1.0));
}

Params Params::with_alpha(double alpha) const {
  return derive_params(m_, p_, N_, alpha);
}

Params derive_params(double m, double p, int N, double alpha) {
  if (!std::isfinite(m) || !std::isfinite(p) || !std::isfinite(alpha))
    throw RangeViolation("exponents must be finite");
  if (!(m > 1.0)) violated("m > 1", m);
  if (!(p > 1.0)) violated("p > 1", p);
  if (!(p < m)) violated("p < m", p);
  if (N < 1) violated("N >= 1", N);
  if (N == 1 && !(p < 0.5 * (m + 1.0))) violated("p < (m+1)/2 when N = 1", p);
  if (!(alpha > 0.0)) violated("alpha > 0", alpha);

  Params out;
  out.m_ = m;
  out.p_ = p;
  out.N_ = N;
  out.sigma_ = -2.0 * (p - 1.0) / (m - 1.0);
  // σ(m-1) + 2(p-1) vanishes by the choice of σ; stored exactly.
  out.L_ = 0.0;
  out.alpha_ = alpha;
  out.beta_ = 0.5 * (m - 1.0) * alpha;
  return out;
}

ExponentReport exponent_report(const Params& params) {
  return ExponentReport{params.m(),
                        params.p(),
                        params.N(),
                        params.sigma(),
                        params.alpha(),
                        params.beta(),
                        params.L(),
                        params.growth_exponent(),
                        params.reaction_power(),
                        params.origin_exponent(),
                        params.log_exponent()};
}

void to_json(nlohmann::json& j, const Params& params) {
  j = nlohmann::json{{"m", params.m()}, {"p", params.p()}, {"N", params.N()}, {"alpha", params.alpha()}};
}

Params params_from_json(const nlohmann::json& j) {
  return derive_params(j.at("m").get<double>(), j.at("p").get<double>(), j.at("N").get<int>(),
                       j.at("alpha").get<double>());
}

void to_json(nlohmann::json& j, const ExponentReport& r) {
  j = nlohmann::json{{"m", r.m},
                     {"p", r.p},
                     {"N", r.N},
                     {"sigma", r.sigma},
                     {"alpha", r.alpha},
                     {"beta", r.beta},
                     {"L", r.L},
                     {"two_over_m_minus_1", r.two_over_m_minus_1},
                     {"m_plus_p_minus_2_over_m_minus_1", r.reaction_power},
                     {"two_m_minus_p_over_m_minus_1", r.origin_exponent},
                     {"one_over_p_minus_1", r.one_over_p_minus_1}};
}

}  // namespace eternal
