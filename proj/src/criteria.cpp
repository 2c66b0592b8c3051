#include "regcrit/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "regcrit/errors.hpp"

namespace regcrit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kHolderFactor = 5.0;
constexpr double kSafetyFactor = 2.0;

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(15);
  out << v;
  return out.str();
}

double trapezoid_step(double t0, double f0, double t1, double f1) {
  return 0.5 * (t1 - t0) * (f0 + f1);
}

// Physical first and second derivatives of a dealiased field. grad[i][m] is
// d_i u_m; hess[i][j][l] is d_i d_j u_l, with the (i, j) and (j, i) entries
// sharing storage.
struct DerivativeSamples {
  std::array<std::array<std::vector<double>, 3>, 3> grad;
  std::array<std::array<std::array<const std::vector<double>*, 3>, 3>, 3> hess{};
  std::vector<std::vector<double>> hess_storage;
};

DerivativeSamples sample_derivatives(const SpectralVelocityField& ud) {
  std::vector<SpectralScalarField> spectra;
  for (int i = 0; i < 3; ++i) {
    for (int m = 0; m < 3; ++m) spectra.push_back(partial(ud.component(m), i));
  }
  for (int l = 0; l < 3; ++l) {
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) spectra.push_back(second_partial(ud.component(l), i, j));
    }
  }
  const auto samples = fft_inverse_batch(spectra);

  DerivativeSamples d;
  std::size_t next = 0;
  for (int i = 0; i < 3; ++i) {
    for (int m = 0; m < 3; ++m, ++next) {
      d.grad[i][m].assign(samples[next].values().begin(), samples[next].values().end());
    }
  }
  d.hess_storage.reserve(18);
  for (int l = 0; l < 3; ++l) {
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j, ++next) {
        d.hess_storage.emplace_back(samples[next].values().begin(), samples[next].values().end());
        d.hess[i][j][l] = &d.hess_storage.back();
        d.hess[j][i][l] = &d.hess_storage.back();
      }
    }
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// SerrinPair / CriterionConfig

SerrinPair::SerrinPair(LebesgueExponent p, double s) : p_(p), s_(s) {
  if (!p.is_infinite() && !(p.value() > 3.0)) {
    throw InvalidArgument("SerrinPair: requires 3 < p <= inf");
  }
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("SerrinPair: s must be positive");
  if (p.three_over_p() + 2.0 / s > 1.0 + 1e-12) {
    throw InvalidArgument("SerrinPair: 3/p + 2/s must not exceed 1");
  }
}

SerrinPair SerrinPair::canonical(LebesgueExponent p) {
  if (p.is_infinite()) return SerrinPair(p, 2.0);
  if (!(p.value() > 3.0)) throw InvalidArgument("SerrinPair: requires 3 < p <= inf");
  return SerrinPair(p, 2.0 * p.value() / (p.value() - 3.0));
}

SerrinPair SerrinPair::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return canonical(LebesgueExponent::parse(text));
  const auto p = LebesgueExponent::parse(text.substr(0, colon));
  const std::string s_text = text.substr(colon + 1);
  std::size_t used = 0;
  double s = 0.0;
  try {
    s = std::stod(s_text, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("SerrinPair: cannot parse s in '" + text + "'");
  }
  if (used != s_text.size()) throw InvalidArgument("SerrinPair: cannot parse s in '" + text + "'");
  return SerrinPair(p, s);
}

bool SerrinPair::is_canonical() const noexcept {
  if (p_.is_infinite()) return s_ == 2.0;
  return std::abs(s_ - 2.0 * p_.value() / (p_.value() - 3.0)) <= 1e-12 * s_;
}

std::string SerrinPair::label() const { return p_.label() + "_" + format_number(s_); }

void CriterionConfig::validate() const {
  if (!(mu > 0.0)) throw ConfigError("monitor viscosity must be positive", "fluid.mu");
  if ((serrin || log_serrin || gronwall) && pairs.empty()) {
    throw ConfigError("at least one Serrin pair is required", "monitors.pairs");
  }
  if (gronwall && !(c_cal > 0.0)) {
    throw ConfigError("gronwall monitor needs a positive calibrated constant", "calibration");
  }
  if (linf_oversample < 1) throw ConfigError("oversampling factor must be >= 1", "monitors.linf_oversample");
}

SerrinPair CriterionConfig::gronwall_pair() const {
  if (pairs.empty()) throw ConfigError("no Serrin pair configured", "monitors.pairs");
  return SerrinPair::canonical(pairs.front().p());
}

// ---------------------------------------------------------------------------
// Integrands

double log_denominator(double x) { return 1.0 + std::log(std::numbers::e + x); }

double serrin_integrand_from_norm(double lp, const SerrinPair& pair) {
  // std::pow returns +inf on overflow, which is the sentinel the monitors
  // record.
  return std::pow(lp, pair.s());
}

double log_serrin_integrand_from_norms(double lp, double linf, const SerrinPair& pair) {
  return serrin_integrand_from_norm(lp, pair) / log_denominator(linf);
}

double serrin_integrand(const VelocityField& u, const SerrinPair& pair) {
  return serrin_integrand_from_norm(lp_norm(u, pair.p()), pair);
}

double log_serrin_integrand(const VelocityField& u, const SerrinPair& pair) {
  const auto mag = pointwise_magnitude(u);
  const double dv = u.grid().cell_volume();
  return log_serrin_integrand_from_norms(lp_norm_of_magnitude(mag, dv, pair.p()),
                                         lp_norm_of_magnitude(mag, dv, LebesgueExponent::infinity()),
                                         pair);
}

double bkm_integrand(const SpectralVelocityField& u_hat) {
  return lp_norm(fft_inverse(curl(u_hat)), LebesgueExponent::infinity());
}

double chan_vasseur_integrand(const VelocityField& u) {
  const auto mag = pointwise_magnitude(u);
  double sum = 0.0;
  for (double v : mag) {
    const double v2 = v * v;
    sum += v2 * v2 * v / std::log(std::numbers::e + v);
  }
  return sum * u.grid().cell_volume();
}

// ---------------------------------------------------------------------------
// Time integration

namespace {

RunningIntegrals advance(const MonitorSeries& series, const RunningIntegrals& prev,
                         const MonitorSample& a, const MonitorSample& b) {
  const std::size_t pair_count = series.pairs.size();
  RunningIntegrals cur;
  cur.serrin.resize(pair_count);
  cur.log_serrin.resize(pair_count);
  for (std::size_t k = 0; k < pair_count; ++k) {
    cur.serrin[k] = prev.serrin[k] + trapezoid_step(a.t, a.pairs[k].serrin, b.t, b.pairs[k].serrin);
    cur.log_serrin[k] =
        prev.log_serrin[k] + trapezoid_step(a.t, a.pairs[k].log_serrin, b.t, b.pairs[k].log_serrin);
  }
  cur.bkm = prev.bkm + trapezoid_step(a.t, a.bkm, b.t, b.bkm);
  cur.chan_vasseur = prev.chan_vasseur + trapezoid_step(a.t, a.chan_vasseur, b.t, b.chan_vasseur);
  cur.enstrophy = prev.enstrophy + trapezoid_step(a.t, a.sobolev[1] * a.sobolev[1], b.t,
                                                  b.sobolev[1] * b.sobolev[1]);
  if (pair_count > 0) {
    const auto pair = SerrinPair::canonical(series.pairs[0].p());
    cur.gronwall_integrand =
        prev.gronwall_integrand +
        trapezoid_step(a.t, log_serrin_integrand_from_norms(a.pairs[0].lp, a.linf, pair), b.t,
                       log_serrin_integrand_from_norms(b.pairs[0].lp, b.linf, pair));
  }
  return cur;
}

RunningIntegrals zero_integrals(std::size_t pair_count) {
  RunningIntegrals z;
  z.serrin.assign(pair_count, 0.0);
  z.log_serrin.assign(pair_count, 0.0);
  return z;
}

}  // namespace

void append_sample(MonitorSeries& series, MonitorSample sample) {
  if (sample.pairs.size() != series.pairs.size()) {
    throw InvalidArgument("append_sample: sample pairs do not match the series");
  }
  if (series.samples.empty()) {
    series.integrals.push_back(zero_integrals(series.pairs.size()));
  } else {
    if (!(sample.t > series.samples.back().t)) {
      throw NonMonotoneTime("append_sample: sample times must strictly increase");
    }
    series.integrals.push_back(
        advance(series, series.integrals.back(), series.samples.back(), sample));
  }
  series.samples.push_back(std::move(sample));
}

MonitorSeries accumulate(MonitorSeries series) {
  const std::size_t count = series.samples.size();
  for (std::size_t i = 1; i < count; ++i) {
    if (!(series.samples[i].t > series.samples[i - 1].t)) {
      throw NonMonotoneTime("accumulate: sample times must strictly increase (index " +
                            std::to_string(i) + ")");
    }
  }
  series.integrals.clear();
  if (count == 0) return series;
  series.integrals.push_back(zero_integrals(series.pairs.size()));
  for (std::size_t i = 1; i < count; ++i) {
    series.integrals.push_back(
        advance(series, series.integrals.back(), series.samples[i - 1], series.samples[i]));
  }
  return series;
}

// ---------------------------------------------------------------------------
// H2-level identity and the inequality chain

double hessian_inner_product(const SpectralVelocityField& a, const SpectralVelocityField& b) {
  const Grid& grid = a.grid();
  const int n = grid.n();
  const double scale = grid.wavenumber_scale();
  double sum = 0.0;
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz) {
    const double kz = scale * grid.wavenumber(iz);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = scale * grid.wavenumber(iy);
      for (int ix = 0; ix < n; ++ix, ++idx) {
        if (grid.is_nyquist(ix) || grid.is_nyquist(iy) || grid.is_nyquist(iz)) continue;
        const double kx = scale * grid.wavenumber(ix);
        const double k2 = kx * kx + ky * ky + kz * kz;
        double dot = 0.0;
        for (int c = 0; c < 3; ++c) {
          const Complex& x = a.component(c)[idx];
          const Complex& y = b.component(c)[idx];
          dot += x.real() * y.real() + x.imag() * y.imag();
        }
        sum += k2 * k2 * dot;
      }
    }
  }
  return sum * grid.volume();
}

double h2_nonlinear_integrals(const SpectralVelocityField& u_hat) {
  const auto ud = dealias(u_hat);
  const auto d = sample_derivatives(ud);
  const std::size_t points = u_hat.grid().size();
  double stretching = 0.0;  // sum (d_i d_j u_l)(d_i u_m)(d_m d_j u_l)
  double transport = 0.0;   // sum (d_i d_j u_l)(d_i d_j u_m)(d_m u_l)
  for (std::size_t x = 0; x < points; ++x) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        for (int l = 0; l < 3; ++l) {
          const double t_ijl = (*d.hess[i][j][l])[x];
          for (int m = 0; m < 3; ++m) {
            s1 += t_ijl * d.grad[i][m][x] * (*d.hess[m][j][l])[x];
            s2 += t_ijl * (*d.hess[i][j][m])[x] * d.grad[m][l][x];
          }
        }
      }
    }
    stretching += s1;
    transport += s2;
  }
  const double dv = u_hat.grid().cell_volume();
  return -2.0 * stretching * dv - transport * dv;
}

H2Identity h2_identity_residual(const SpectralVelocityField& u_hat, double mu) {
  const auto dudt = time_derivative(u_hat, mu);
  const double h3 = sobolev_seminorm(u_hat, 3);
  H2Identity out;
  out.lhs = hessian_inner_product(u_hat, dudt) + mu * h3 * h3;
  out.rhs = h2_nonlinear_integrals(u_hat);
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

H2Identity h2_identity_residual(const SolverState& state, const SolverConfig& config) {
  return h2_identity_residual(state.u_hat, config.mu());
}

HolderCheck holder_check(const SpectralVelocityField& u_hat, LebesgueExponent p) {
  if (!p.is_infinite() && !(p.value() > 3.0)) {
    throw InvalidArgument("holder_check: requires 3 < p <= inf");
  }
  const auto u = fft_inverse(u_hat);
  const LebesgueExponent q = p.holder_partner();
  const double h2_q = q.value() == 2.0 ? sobolev_seminorm(u_hat, 2)
                                       : lp_norm_of_magnitude(hessian_magnitude(u_hat),
                                                              u_hat.grid().cell_volume(), q);
  HolderCheck out;
  out.actual = std::abs(h2_nonlinear_integrals(u_hat));
  out.bound = kHolderFactor * lp_norm(u, p) * h2_q * sobolev_seminorm(u_hat, 3);
  out.satisfied = out.actual <= out.bound * (1.0 + 1e-10);
  return out;
}

HolderCheck holder_check(const SolverState& state, LebesgueExponent p) {
  return holder_check(state.u_hat, p);
}

D2Check d2_check(const MonitorSample& sample, const SerrinPair& pair, double c_cal, double mu) {
  const auto it = std::find_if(sample.pairs.begin(), sample.pairs.end(),
                               [&](const PairSample& ps) { return ps.pair.p() == pair.p(); });
  if (it == sample.pairs.end()) {
    throw InvalidArgument("d2_check: sample has no L^" + pair.p().label() + " norm");
  }
  const double h2 = sample.sobolev[2];
  const double h3 = sample.sobolev[3];
  const double h2_sq = h2 * h2;
  D2Check out;
  out.lhs = sample.h2_rate + mu * h3 * h3;
  out.rhs = 2.0 * c_cal * log_serrin_integrand_from_norms(it->lp, sample.linf, pair) *
            log_denominator(h2_sq) * h2_sq;
  out.satisfied = out.lhs <= out.rhs;
  return out;
}

// ---------------------------------------------------------------------------
// Gronwall bound

GronwallTracker::GronwallTracker(SerrinPair pair, double c_cal) : pair_(pair), c_cal_(c_cal) {
  if (!pair.is_canonical()) {
    throw InvalidArgument("gronwall_bound: the pair must satisfy s = 2p/(p-3)");
  }
}

GronwallPoint GronwallTracker::add(double t, double lp, double linf, double h2_seminorm) {
  const double integrand = log_serrin_integrand_from_norms(lp, linf, pair_);
  const double measured = log_denominator(h2_seminorm * h2_seminorm);
  if (!started_) {
    started_ = true;
    initial_ = measured;
  } else {
    if (!(t > last_t_)) throw NonMonotoneTime("gronwall_bound: times must strictly increase");
    integral_ += trapezoid_step(last_t_, last_integrand_, t, integrand);
  }
  last_t_ = t;
  last_integrand_ = integrand;
  GronwallPoint point;
  point.t = t;
  point.measured = measured;
  point.bound = initial_ * std::exp(2.0 * c_cal_ * integral_);
  point.dominated = point.bound >= point.measured;
  return point;
}

std::vector<GronwallPoint> gronwall_bound(const MonitorSeries& series, const SerrinPair& pair,
                                          double c_cal) {
  GronwallTracker tracker(pair, c_cal);
  std::vector<GronwallPoint> out;
  out.reserve(series.samples.size());
  for (const auto& sample : series.samples) {
    const auto it = std::find_if(sample.pairs.begin(), sample.pairs.end(),
                                 [&](const PairSample& ps) { return ps.pair.p() == pair.p(); });
    if (it == sample.pairs.end()) {
      throw InvalidArgument("gronwall_bound: series has no L^" + pair.p().label() + " norm");
    }
    out.push_back(tracker.add(sample.t, it->lp, sample.linf, sample.sobolev[2]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calibration

double young_constant(double c_gn, LebesgueExponent p, double mu) {
  if (!(mu > 0.0)) throw InvalidArgument("young_constant: mu must be positive");
  const double a = 1.0 - p.three_over_p();
  if (!(a > 0.0)) throw InvalidArgument("young_constant: requires p > 3");
  const double product = kHolderFactor * c_gn;
  return 0.5 * a * std::pow(product, 2.0 / a) * std::pow((2.0 - a) / mu, (2.0 - a) / a);
}

Calibration calibrate_constants(std::span<const SpectralVelocityField> corpus, LebesgueExponent p,
                                double mu) {
  if (corpus.empty()) throw EmptyCorpus("calibrate_constants: corpus is empty");
  Calibration out;
  out.p = p;
  out.mu = mu;
  out.corpus_size = corpus.size();
  for (const auto& field : corpus) out.max_ratio = std::max(out.max_ratio, gn_ratio(field, p));
  out.c_gn = kSafetyFactor * out.max_ratio;
  out.c_cal = kSafetyFactor * young_constant(out.c_gn, p, mu);
  return out;
}

// ---------------------------------------------------------------------------
// Monitor evaluation

MonitorSample evaluate_sample(const SolverState& state, const CriterionConfig& config) {
  const auto& u_hat = state.u_hat;
  const auto u = fft_inverse(u_hat);
  const auto mag = pointwise_magnitude(u);
  const double dv = u_hat.grid().cell_volume();

  MonitorSample s;
  s.t = state.t;
  s.step_index = state.step_index;
  for (int m = 0; m <= 3; ++m) s.sobolev[m] = sobolev_seminorm(u_hat, m);
  s.energy = s.sobolev[0] * s.sobolev[0];
  s.linf = config.linf_oversample > 1 ? linf_norm_oversampled(u_hat, config.linf_oversample)
                                      : lp_norm_of_magnitude(mag, dv, LebesgueExponent::infinity());
  for (const auto& pair : config.pairs) {
    PairSample ps{pair};
    ps.lp = lp_norm_of_magnitude(mag, dv, pair.p());
    ps.serrin = config.serrin ? serrin_integrand_from_norm(ps.lp, pair) : kNaN;
    ps.log_serrin = config.log_serrin ? log_serrin_integrand_from_norms(ps.lp, s.linf, pair) : kNaN;
    s.pairs.push_back(ps);
  }
  s.bkm = config.bkm ? bkm_integrand(u_hat) : kNaN;
  s.chan_vasseur = config.chan_vasseur ? chan_vasseur_integrand(u) : kNaN;

  const double h3_sq = s.sobolev[3] * s.sobolev[3];
  if (config.identity || config.gronwall) {
    const auto identity = h2_identity_residual(u_hat, config.mu);
    s.identity_lhs = identity.lhs;
    s.identity_rhs = identity.rhs;
    s.identity_residual = config.identity ? identity.residual : kNaN;
    // d/dt ||grad^2 u||^2 = 2 <grad^2 u, grad^2 du/dt> = 2 (lhs - mu ||grad^3 u||^2)
    s.h2_rate = 2.0 * (identity.lhs - config.mu * h3_sq);
  } else {
    s.identity_lhs = s.identity_rhs = s.identity_residual = s.h2_rate = kNaN;
  }
  s.embedding_ratio = log_denominator(s.sobolev[2] * s.sobolev[2]) / log_denominator(s.linf);

  if (config.gronwall) {
    const auto d2 = d2_check(s, config.gronwall_pair(), config.c_cal, config.mu);
    s.d2_lhs = d2.lhs;
    s.d2_rhs = d2.rhs;
    s.d2_satisfied = d2.satisfied;
  } else {
    s.d2_lhs = s.d2_rhs = kNaN;
  }
  s.gronwall_bound = s.gronwall_measured = kNaN;
  return s;
}

}  // namespace regcrit
