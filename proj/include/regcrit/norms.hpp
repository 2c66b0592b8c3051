#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "regcrit/spectral_field.hpp"

namespace regcrit {

/// Lebesgue exponent p in (1, inf]. Infinity is a distinct state rather than
/// a sentinel double.
class LebesgueExponent {
 public:
  explicit LebesgueExponent(double p);
  static LebesgueExponent infinity() noexcept { return LebesgueExponent(); }
  /// Accepts a decimal or "inf".
  static LebesgueExponent parse(const std::string& text);

  bool is_infinite() const noexcept { return infinite_; }
  /// The finite value; +inf for the infinite exponent.
  double value() const noexcept;
  /// 3/p with 3/inf = 0.
  double three_over_p() const noexcept { return infinite_ ? 0.0 : 3.0 / p_; }
  /// Exponent 2p/(p-2) of the second-derivative norm paired with L^p
  /// (2 for p = inf). Requires p > 2.
  LebesgueExponent holder_partner() const;
  /// "6", "4.5", "inf".
  std::string label() const;

  friend bool operator==(const LebesgueExponent&, const LebesgueExponent&) = default;
  friend auto operator<=>(const LebesgueExponent& a, const LebesgueExponent& b) {
    return a.value() <=> b.value();
  }

 private:
  LebesgueExponent() noexcept : p_(0.0), infinite_(true) {}
  double p_;
  bool infinite_;
};

/// Norms of one field. `lp` is keyed by exponent label, `sobolev[m]` holds
/// ||grad^m u||_2 for m = 0..3.
struct NormReport {
  std::map<std::string, double> lp;
  std::array<double, 4> sobolev{};
  double linf = 0.0;
};

/// (dx^3 * sum |v|^p)^(1/p) over pointwise magnitudes, or their max for
/// p = inf. Samples are scaled by the max before powering so large p does
/// not overflow.
double lp_norm_of_magnitude(std::span<const double> magnitude, double cell_volume,
                            LebesgueExponent p);

/// Euclidean magnitude of the 3-vector at each sample.
std::vector<double> pointwise_magnitude(const VelocityField& u);

/// L^p norm of |u(x)| by Riemann sum with weight dx^3.
double lp_norm(const VelocityField& u, LebesgueExponent p);

/// Grid max of |u| on a grid `factor` times finer, obtained by spectral
/// zero padding. factor = 1 is the plain grid max.
double linf_norm_oversampled(const SpectralVelocityField& u, int factor);

/// ||grad^m u||_{L^2} by Plancherel, using the full derivative tensor
/// (weight |k|^{2m}). For m >= 1 Nyquist planes carry no weight, matching
/// the derivative operators.
double sobolev_seminorm(const SpectralVelocityField& u, int m);

/// Frobenius magnitude of the 27-entry tensor d_i d_j u_l at every sample.
std::vector<double> hessian_magnitude(const SpectralVelocityField& u);

/// ||grad^2 u||_{L^{2p/(p-2)}} / (||grad^2 u||_2^{1-3/p} ||grad^3 u||_2^{3/p}).
/// Requires 3 < p; throws DegenerateField when ||grad^3 u||_2 = 0.
double gn_ratio(const SpectralVelocityField& u, LebesgueExponent p);

NormReport norm_report(const SpectralVelocityField& u, std::span<const LebesgueExponent> exponents);

}  // namespace regcrit
