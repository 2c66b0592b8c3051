#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "regcrit/norms.hpp"
#include "regcrit/solver.hpp"

namespace regcrit {

/// Serrin pair (p, s) with 3 < p <= inf and 3/p + 2/s <= 1.
class SerrinPair {
 public:
  SerrinPair(LebesgueExponent p, double s);
  /// The equality case s = 2p/(p-3), s = 2 for p = inf.
  static SerrinPair canonical(LebesgueExponent p);
  /// "p:s" with "inf" accepted for p; a bare "p" selects the canonical s.
  static SerrinPair parse(const std::string& text);

  LebesgueExponent p() const noexcept { return p_; }
  double s() const noexcept { return s_; }
  bool is_canonical() const noexcept;
  /// "6_4", "inf_2": used in column and file names.
  std::string label() const;

  friend bool operator==(const SerrinPair&, const SerrinPair&) = default;

 private:
  LebesgueExponent p_;
  double s_;
};

/// Which functionals a run evaluates, and with what constants. The first
/// pair's exponent drives the d2 check and the Gronwall bound, using the
/// canonical s for that exponent and `c_cal` as C(p, mu).
struct CriterionConfig {
  std::vector<SerrinPair> pairs;
  double mu = 0.0;
  double c_cal = 0.0;
  bool serrin = true;
  bool log_serrin = true;
  bool bkm = true;
  bool chan_vasseur = true;
  bool identity = true;
  bool gronwall = true;
  /// Oversampling factor for the L^inf evaluation (1 = grid max).
  int linf_oversample = 1;

  void validate() const;
  SerrinPair gronwall_pair() const;
};

struct PairSample {
  SerrinPair pair;
  double lp = 0.0;
  double serrin = 0.0;
  double log_serrin = 0.0;
};

/// Instantaneous quantities at one monitor time. Disabled monitors hold NaN.
struct MonitorSample {
  double t = 0.0;
  long step_index = 0;
  double energy = 0.0;  ///< ||u||_2^2
  std::vector<PairSample> pairs;
  double linf = 0.0;
  std::array<double, 4> sobolev{};  ///< ||grad^m u||_2, m = 0..3
  double bkm = 0.0;
  double chan_vasseur = 0.0;
  double identity_lhs = 0.0;
  double identity_rhs = 0.0;
  double identity_residual = 0.0;
  double h2_rate = 0.0;  ///< d/dt ||grad^2 u||_2^2
  /// (1 + ln(e + ||grad^2 u||^2)) / (1 + ln(e + ||u||_inf)): the factor the
  /// d2 constant absorbs.
  double embedding_ratio = 0.0;
  double d2_lhs = 0.0;
  double d2_rhs = 0.0;
  bool d2_satisfied = true;
  double gronwall_bound = 0.0;
  double gronwall_measured = 0.0;
  bool gronwall_dominated = true;
};

struct RunningIntegrals {
  std::vector<double> serrin;
  std::vector<double> log_serrin;
  double bkm = 0.0;
  double chan_vasseur = 0.0;
  double enstrophy = 0.0;  ///< integral of ||grad u||_2^2
  double gronwall_integrand = 0.0;  ///< integral driving the Gronwall bound
};

/// Time-ordered monitor record. `integrals[i]` holds the trapezoid integrals
/// from the first sample up to sample i.
struct MonitorSeries {
  std::vector<SerrinPair> pairs;
  std::vector<MonitorSample> samples;
  std::vector<RunningIntegrals> integrals;
};

/// 1 + ln(e + x).
double log_denominator(double x);

double serrin_integrand(const VelocityField& u, const SerrinPair& pair);
double log_serrin_integrand(const VelocityField& u, const SerrinPair& pair);
/// Both integrands from precomputed norms; +inf when the power overflows.
double serrin_integrand_from_norm(double lp, const SerrinPair& pair);
double log_serrin_integrand_from_norms(double lp, double linf, const SerrinPair& pair);

double bkm_integrand(const SpectralVelocityField& u_hat);
double chan_vasseur_integrand(const VelocityField& u);

/// Recomputes every running integral with the trapezoid rule.
/// Throws NonMonotoneTime unless sample times strictly increase.
MonitorSeries accumulate(MonitorSeries series);

/// Appends one sample and extends the running integrals by one trapezoid
/// step, with the same arithmetic as accumulate.
void append_sample(MonitorSeries& series, MonitorSample sample);

struct H2Identity {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

/// lhs = <grad^2 u, grad^2 du/dt> + mu ||grad^3 u||^2 evaluated spectrally;
/// rhs = -2 sum int (d_i d_j u_l)(d_i u_m)(d_m d_j u_l)
///       -  sum int (d_i d_j u_l)(d_i d_j u_m)(d_m u_l)   by quadrature.
H2Identity h2_identity_residual(const SolverState& state, const SolverConfig& config);
H2Identity h2_identity_residual(const SpectralVelocityField& u_hat, double mu);

/// Quadrature value of the two nonlinear integrals (the identity's rhs).
double h2_nonlinear_integrals(const SpectralVelocityField& u_hat);

/// <grad^2 a, grad^2 b> with the full tensor (weight |k|^4).
double hessian_inner_product(const SpectralVelocityField& a, const SpectralVelocityField& b);

struct HolderCheck {
  double bound = 0.0;
  double actual = 0.0;
  bool satisfied = true;
};

/// actual = |rhs of the H2 identity|,
/// bound = 5 ||u||_p ||grad^2 u||_{2p/(p-2)} ||grad^3 u||_2.
HolderCheck holder_check(const SolverState& state, LebesgueExponent p);
HolderCheck holder_check(const SpectralVelocityField& u_hat, LebesgueExponent p);

struct D2Check {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
};

/// lhs = d/dt||grad^2 u||^2 + mu ||grad^3 u||^2,
/// rhs = 2 C ||u||_p^s / (1 + ln(e + ||u||_inf)) (1 + ln(e + ||grad^2 u||^2)) ||grad^2 u||^2.
/// The sample must carry an L^p norm for pair.p(); the integrand uses pair.s().
D2Check d2_check(const MonitorSample& sample, const SerrinPair& pair, double c_cal, double mu);

struct GronwallPoint {
  double t = 0.0;
  double bound = 0.0;
  double measured = 0.0;  ///< 1 + ln(e + ||grad^2 u(t)||^2)
  bool dominated = true;
};

/// A priori bound [1 + ln(e + ||grad^2 u0||^2)] exp(2 C int_0^t X dtau) with
/// X the canonical log-improved integrand, by the trapezoid rule over the
/// samples. Requires a canonical pair.
std::vector<GronwallPoint> gronwall_bound(const MonitorSeries& series, const SerrinPair& pair,
                                          double c_cal);

/// Incremental form of gronwall_bound used while a run is in progress; the
/// arithmetic is identical, so both give the same bits.
class GronwallTracker {
 public:
  GronwallTracker(SerrinPair pair, double c_cal);
  GronwallPoint add(double t, double lp, double linf, double h2_seminorm);
  double integral() const noexcept { return integral_; }

 private:
  SerrinPair pair_;
  double c_cal_;
  bool started_ = false;
  double last_t_ = 0.0;
  double last_integrand_ = 0.0;
  double integral_ = 0.0;
  double initial_ = 0.0;
};

struct Calibration {
  LebesgueExponent p = LebesgueExponent::infinity();
  double mu = 0.0;
  double max_ratio = 0.0;
  double c_gn = 0.0;
  double c_cal = 0.0;
  std::size_t corpus_size = 0;
};

/// Smallest C with 5 c_gn X A^a B^(2-a) <= (mu/2) B^2 + C X^(2/a) A^2 for all
/// X, A, B >= 0, where a = 1 - 3/p (two-term Young inequality).
double young_constant(double c_gn, LebesgueExponent p, double mu);

/// C_GN = 2 * max gn_ratio over the corpus; C_cal = 2 * young_constant(C_GN).
/// Throws EmptyCorpus.
Calibration calibrate_constants(std::span<const SpectralVelocityField> corpus, LebesgueExponent p,
                                double mu);

/// Everything a monitor sample needs except the time integrals.
MonitorSample evaluate_sample(const SolverState& state, const CriterionConfig& config);

}  // namespace regcrit
