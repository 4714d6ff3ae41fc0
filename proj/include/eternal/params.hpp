#pragma once

#include <nlohmann/json.hpp>

namespace eternal {

/// Exponent tuple of u_t = Δu^m + |x|^σ u^p at the critical potential exponent
/// σ = -2(p-1)/(m-1), together with the similarity exponents (α, β).
///
/// Only derive_params() builds one; σ, β and L are computed, never supplied,
/// so the algebraic identities hold exactly.
class Params {
 public:
  double m() const { return m_; }
  double p() const { return p_; }
  int N() const { return N_; }
  double sigma() const { return sigma_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double L() const { return L_; }

  /// 2/(m-1): growth exponent of the far-field law and of the ε-rescaling.
  double growth_exponent() const { return 2.0 / (m_ - 1.0); }
  /// (m+p-2)/(m-1), always in (1, 2).
  double reaction_power() const { return (m_ + p_ - 2.0) / (m_ - 1.0); }
  /// 2(m-p)/(m-1): exponent of the correction term at the origin.
  double origin_exponent() const { return 2.0 * (m_ - p_) / (m_ - 1.0); }
  /// 1/(p-1).
  double log_exponent() const { return 1.0 / (p_ - 1.0); }
  /// m^{(1-p)/(m-1)}, the reaction coefficient of the phase-plane systems.
  double reaction_coefficient() const;

  /// Same (m, p, N) with a different similarity exponent.
  Params with_alpha(double alpha) const;

  friend Params derive_params(double m, double p, int N, double alpha);
  friend bool operator==(const Params&, const Params&) = default;

 private:
  Params() = default;
  double m_ = 0, p_ = 0;
  int N_ = 0;
  double sigma_ = 0, alpha_ = 0, beta_ = 0, L_ = 0;
};

/// Throws RangeViolation naming the first violated inequality.
Params derive_params(double m, double p, int N, double alpha);

struct ExponentReport {
  double m, p;
  int N;
  double sigma, alpha, beta, L;
  double two_over_m_minus_1;
  double reaction_power;     // (m+p-2)/(m-1)
  double origin_exponent;    // 2(m-p)/(m-1)
  double one_over_p_minus_1;
};

ExponentReport exponent_report(const Params& params);

void to_json(nlohmann::json& j, const Params& params);
Params params_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ExponentReport& report);

}  // namespace eternal
