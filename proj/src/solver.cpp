#include "regcrit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "regcrit/errors.hpp"
#include "regcrit/norms.hpp"

namespace regcrit {
namespace {

using Buffers = std::array<std::vector<Complex>, 3>;

SpectralVelocityField wrap(const Grid& grid, Buffers b) {
  return SpectralVelocityField({SpectralScalarField(grid, std::move(b[0])),
                                SpectralScalarField(grid, std::move(b[1])),
                                SpectralScalarField(grid, std::move(b[2]))});
}

// Dealiased (u . grad) u in spectral form, k = 0 mode removed (it is the mean
// of a divergence). Reports the grid max of |u|.
SpectralVelocityField convective_term(const SpectralVelocityField& u_hat, double& u_max) {
  const Grid& grid = u_hat.grid();
  const auto ud = dealias(u_hat);
  // u_j in slots 0..2, d_j u_l in slot 3 + 3 l + j.
  std::vector<SpectralScalarField> spectra(ud.components().begin(), ud.components().end());
  for (int l = 0; l < 3; ++l) {
    for (int j = 0; j < 3; ++j) spectra.push_back(partial(ud.component(l), j));
  }
  const auto samples = fft_inverse_batch(spectra);
  u_max = 0.0;
  for (std::size_t x = 0; x < grid.size(); ++x) {
    const double a = samples[0][x], b = samples[1][x], c = samples[2][x];
    u_max = std::max(u_max, std::sqrt(a * a + b * b + c * c));
  }

  std::vector<RealScalarField> physical;
  for (int l = 0; l < 3; ++l) {
    std::vector<double> acc(grid.size(), 0.0);
    for (int j = 0; j < 3; ++j) {
      const auto uj = samples[j].values();
      const auto dv = samples[3 + 3 * l + j].values();
      for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += uj[x] * dv[x];
    }
    physical.emplace_back(grid, std::move(acc));
  }
  const auto spectral = fft_forward_batch(physical);
  Buffers product;
  for (int l = 0; l < 3; ++l) {
    product[l].assign(spectral[l].coefficients().begin(), spectral[l].coefficients().end());
    product[l][0] = Complex{};
  }
  return dealias(wrap(grid, std::move(product)));
}

// exp(-mu |k|^2 h) for every slot.
std::vector<double> viscous_factor(const Grid& grid, double mu, double h) {
  const int n = grid.n();
  const double scale = grid.wavenumber_scale();
  std::vector<double> f(grid.size());
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz) {
    const double kz = scale * grid.wavenumber(iz);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = scale * grid.wavenumber(iy);
      for (int ix = 0; ix < n; ++ix, ++idx) {
        const double kx = scale * grid.wavenumber(ix);
        f[idx] = std::exp(-mu * (kx * kx + ky * ky + kz * kz) * h);
      }
    }
  }
  return f;
}

// out = fa * a + h * fb * b, componentwise over slots; a factor vector may be
// empty to mean 1.
SpectralVelocityField combine(const SpectralVelocityField& a, const std::vector<double>& fa,
                              double h, const SpectralVelocityField& b,
                              const std::vector<double>& fb) {
  Buffers out;
  for (int c = 0; c < 3; ++c) {
    const auto av = a.component(c).coefficients();
    const auto bv = b.component(c).coefficients();
    out[c].resize(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) {
      const Complex lhs = fa.empty() ? av[i] : fa[i] * av[i];
      const Complex rhs = fb.empty() ? bv[i] : fb[i] * bv[i];
      out[c][i] = lhs + h * rhs;
    }
  }
  return wrap(a.grid(), std::move(out));
}

bool all_finite(const SpectralVelocityField& u) {
  for (const auto& comp : u.components()) {
    for (const auto& c : comp.coefficients()) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
  }
  return true;
}

// Sets the coefficient at integer wavevector k and its conjugate partner.
void set_mode(std::vector<Complex>& coeffs, const Grid& grid, int kx, int ky, int kz, Complex v) {
  const int n = grid.n();
  auto slot = [n](int k) { return ((k % n) + n) % n; };
  coeffs[grid.index(slot(kx), slot(ky), slot(kz))] = v;
  coeffs[grid.index(slot(-kx), slot(-ky), slot(-kz))] = std::conj(v);
}

// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::taylor_green: return "taylor_green";
    case InitKind::beltrami: return "beltrami";
    case InitKind::random_divfree: return "random_divfree";
  }
  return "unknown";
}

InitKind parse_init_kind(const std::string& text) {
  if (text == "taylor_green") return InitKind::taylor_green;
  if (text == "beltrami") return InitKind::beltrami;
  if (text == "random_divfree") return InitKind::random_divfree;
  throw InvalidArgument("unknown init kind '" + text + "'");
}

double cfl_limit(const Grid& grid, double u_max) {
  constexpr double kCap = 0.5;
  if (!(u_max > 0.0)) return kCap;
  return std::min(grid.spacing() / u_max, kCap);
}

SolverConfig::SolverConfig(Grid grid, double mu, double dt, double t_end, InitSpec init,
                           int monitor_stride, int snapshot_stride)
    : grid_(grid),
      mu_(mu),
      dt_(dt),
      t_end_(t_end),
      init_(init),
      monitor_stride_(monitor_stride),
      snapshot_stride_(snapshot_stride) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("mu must be positive", "fluid.mu");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive", "time.dt");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw ConfigError("t_end must be non-negative", "time.t_end");
  }
  if (monitor_stride < 1) throw ConfigError("monitor stride must be >= 1", "monitors.stride");
  if (snapshot_stride < 1) throw ConfigError("snapshot stride must be >= 1", "snapshots.stride");
  const double steps = t_end / dt;
  step_count_ = std::lround(steps);
  if (std::abs(steps - static_cast<double>(step_count_)) > 1e-9 * std::max(1.0, steps)) {
    throw ConfigError("t_end must be an integer multiple of dt", "time.t_end");
  }
  const auto u0 = fft_inverse(initial_field(grid_, init_));
  dt_max_ = cfl_limit(grid_, lp_norm(u0, LebesgueExponent::infinity()));
  if (dt > dt_max_) {
    throw ConfigError("dt = " + std::to_string(dt) + " exceeds the CFL bound " +
                          std::to_string(dt_max_),
                      "time.dt");
  }
}

SpectralVelocityField nonlinear_rhs(const SpectralVelocityField& u_hat, double& u_max) {
  return -1.0 * leray_project(convective_term(u_hat, u_max));
}

SpectralVelocityField nonlinear_rhs(const SpectralVelocityField& u_hat) {
  double ignored = 0.0;
  return nonlinear_rhs(u_hat, ignored);
}

SpectralVelocityField time_derivative(const SpectralVelocityField& u_hat, double mu) {
  const auto n = nonlinear_rhs(u_hat);
  return SpectralVelocityField({n.component(0) + mu * laplacian(u_hat.component(0)),
                                n.component(1) + mu * laplacian(u_hat.component(1)),
                                n.component(2) + mu * laplacian(u_hat.component(2))});
}

SolverState step(const SolverState& state, const SolverConfig& config) {
  const Grid& grid = state.u_hat.grid();
  const double dt = config.dt();
  // The factors depend only on (grid, mu, dt); keep the last set per thread.
  thread_local struct {
    int n = 0;
    double length = 0.0, mu = 0.0, dt = 0.0;
    std::vector<double> half, full;
  } factors;
  if (factors.n != grid.n() || factors.length != grid.length() || factors.mu != config.mu() ||
      factors.dt != dt) {
    factors.half = viscous_factor(grid, config.mu(), 0.5 * dt);
    factors.full = viscous_factor(grid, config.mu(), dt);
    factors.n = grid.n();
    factors.length = grid.length();
    factors.mu = config.mu();
    factors.dt = dt;
  }
  const auto& half = factors.half;
  const auto& full = factors.full;
  const std::vector<double> one;
  const auto& u = state.u_hat;

  // Integrating-factor RK4: v = exp(mu |k|^2 t) u removes the stiff linear
  // term, so viscosity is integrated exactly.
  double u_max = 0.0;
  const auto k1 = nonlinear_rhs(u, u_max);
  if (dt > cfl_limit(grid, u_max)) {
    throw NumericalBlowup("CFL bound violated at t = " + std::to_string(state.t) +
                              " (max|u| = " + std::to_string(u_max) + ")",
                          state.t);
  }
  const auto a = combine(u, half, 0.5 * dt, k1, half);
  const auto k2 = nonlinear_rhs(a);
  const auto b = combine(u, half, 0.5 * dt, k2, one);
  const auto k3 = nonlinear_rhs(b);
  const auto c = combine(u, full, dt, k3, half);
  const auto k4 = nonlinear_rhs(c);

  Buffers next;
  for (int comp = 0; comp < 3; ++comp) {
    const auto uv = u.component(comp).coefficients();
    const auto v1 = k1.component(comp).coefficients();
    const auto v2 = k2.component(comp).coefficients();
    const auto v3 = k3.component(comp).coefficients();
    const auto v4 = k4.component(comp).coefficients();
    next[comp].resize(uv.size());
    for (std::size_t i = 0; i < uv.size(); ++i) {
      next[comp][i] = full[i] * uv[i] +
                      (dt / 6.0) * (full[i] * v1[i] + 2.0 * half[i] * (v2[i] + v3[i]) + v4[i]);
    }
  }
  SolverState out{0.0, wrap(grid, std::move(next)), state.step_index + 1};
  out.t = static_cast<double>(out.step_index) * dt;
  if (!all_finite(out.u_hat)) {
    throw NumericalBlowup("non-finite coefficient after step " + std::to_string(out.step_index),
                          out.t);
  }
  return out;
}

SpectralVelocityField init_taylor_green(const Grid& grid, double amplitude) {
  Buffers b;
  for (auto& c : b) c.assign(grid.size(), Complex{});
  const Complex i{0.0, 1.0};
  // cos x sin y and sin x cos y on the fundamental modes (+-1, +-1, 0).
  // set_mode fills the conjugate partners at kx = -1.
  const int kx = 1;
  for (int ky : {-1, 1}) {
    set_mode(b[0], grid, kx, ky, 0, amplitude * (-i * static_cast<double>(ky)) / 4.0);
    set_mode(b[1], grid, kx, ky, 0, amplitude * (i * static_cast<double>(kx)) / 4.0);
  }
  return wrap(grid, std::move(b));
}

SpectralVelocityField init_beltrami(const Grid& grid, double amplitude) {
  Buffers b;
  for (auto& c : b) c.assign(grid.size(), Complex{});
  const Complex sin_coeff{0.0, -0.5 * amplitude};  // sin at +k
  const Complex cos_coeff{0.5 * amplitude, 0.0};   // cos at +k
  // u = (sin z + cos y, sin x + cos z, sin y + cos x), the A = B = C = 1 ABC flow.
  set_mode(b[0], grid, 0, 0, 1, sin_coeff);
  set_mode(b[0], grid, 0, 1, 0, cos_coeff);
  set_mode(b[1], grid, 1, 0, 0, sin_coeff);
  set_mode(b[1], grid, 0, 0, 1, cos_coeff);
  set_mode(b[2], grid, 0, 1, 0, sin_coeff);
  set_mode(b[2], grid, 1, 0, 0, cos_coeff);
  return wrap(grid, std::move(b));
}

SpectralVelocityField init_random_divfree(const Grid& grid, std::uint64_t seed,
                                          double spectrum_slope, double amplitude) {
  const int n = grid.n();
  std::mt19937_64 rng(seed);
  Buffers b;
  for (auto& c : b) c.assign(grid.size(), Complex{});
  for (int iz = 0; iz < n; ++iz) {
    const int kz = grid.wavenumber(iz);
    for (int iy = 0; iy < n; ++iy) {
      const int ky = grid.wavenumber(iy);
      for (int ix = 0; ix < n; ++ix) {
        const int kx = grid.wavenumber(ix);
        const bool upper_half = kz > 0 || (kz == 0 && (ky > 0 || (ky == 0 && kx > 0)));
        if (!upper_half) continue;
        const int k2 = kx * kx + ky * ky + kz * kz;
        if (9 * k2 > n * n) continue;
        const double magnitude = std::pow(std::sqrt(static_cast<double>(k2)), spectrum_slope);
        for (int c = 0; c < 3; ++c) {
          const double phase = 2.0 * std::numbers::pi * unit_uniform(rng);
          set_mode(b[c], grid, kx, ky, kz, std::polar(magnitude, phase));
        }
      }
    }
  }
  auto projected = leray_project(wrap(grid, std::move(b)));
  const double norm = sobolev_seminorm(projected, 0);
  if (norm == 0.0) return projected;
  return (amplitude / norm) * projected;
}

SpectralVelocityField initial_field(const Grid& grid, const InitSpec& init) {
  switch (init.kind) {
    case InitKind::taylor_green: return init_taylor_green(grid, init.amplitude);
    case InitKind::beltrami: return init_beltrami(grid, init.amplitude);
    case InitKind::random_divfree:
      return init_random_divfree(grid, init.seed, init.spectrum_slope, init.amplitude);
  }
  throw InvalidArgument("initial_field: unknown init kind");
}

SolverState initial_state(const SolverConfig& config) {
  return SolverState{0.0, initial_field(config.grid(), config.init()), 0};
}

SpectralScalarField reconstruct_pressure(const SpectralVelocityField& u_hat) {
  double ignored = 0.0;
  const auto conv = convective_term(u_hat, ignored);
  const Grid& grid = u_hat.grid();
  const auto div = divergence(conv);
  std::vector<Complex> q(div.coefficients().begin(), div.coefficients().end());
  const int n = grid.n();
  const double scale = grid.wavenumber_scale();
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz) {
    const double kz = scale * grid.wavenumber(iz);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = scale * grid.wavenumber(iy);
      for (int ix = 0; ix < n; ++ix, ++idx) {
        const double kx = scale * grid.wavenumber(ix);
        const double k2 = kx * kx + ky * ky + kz * kz;
        // -|k|^2 q_hat = -(i k . conv_hat) = -div_hat
        q[idx] = k2 == 0.0 ? Complex{} : q[idx] / k2;
      }
    }
  }
  return SpectralScalarField(grid, std::move(q));
}

}  // namespace regcrit
