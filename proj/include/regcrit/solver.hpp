#pragma once

#include <cstdint>
#include <string>

#include "regcrit/spectral_field.hpp"

namespace regcrit {

enum class InitKind { taylor_green, beltrami, random_divfree };

std::string to_string(InitKind kind);
InitKind parse_init_kind(const std::string& text);

struct InitSpec {
  InitKind kind = InitKind::taylor_green;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  double spectrum_slope = -2.0;
};

/// Validated time-integration settings. Construction evaluates the initial
/// field once and rejects dt above the CFL bound
/// dt_max = min(dx / max|u0|, 0.5).
class SolverConfig {
 public:
  SolverConfig(Grid grid, double mu, double dt, double t_end, InitSpec init,
               int monitor_stride = 1, int snapshot_stride = 100);

  const Grid& grid() const noexcept { return grid_; }
  double mu() const noexcept { return mu_; }
  double dt() const noexcept { return dt_; }
  double t_end() const noexcept { return t_end_; }
  const InitSpec& init() const noexcept { return init_; }
  int monitor_stride() const noexcept { return monitor_stride_; }
  int snapshot_stride() const noexcept { return snapshot_stride_; }
  double dt_max() const noexcept { return dt_max_; }
  /// t_end / dt, which construction requires to be an integer.
  long step_count() const noexcept { return step_count_; }

 private:
  Grid grid_;
  double mu_;
  double dt_;
  double t_end_;
  InitSpec init_;
  int monitor_stride_;
  int snapshot_stride_;
  double dt_max_ = 0.0;
  long step_count_ = 0;
};

double cfl_limit(const Grid& grid, double u_max);

struct SolverState {
  double t = 0.0;
  SpectralVelocityField u_hat;
  long step_index = 0;
};

/// -P(u . grad u) with 2/3 dealiasing of both factors and of the product.
/// The viscous term is not included.
SpectralVelocityField nonlinear_rhs(const SpectralVelocityField& u_hat);

/// Same as nonlinear_rhs and additionally reports max |u(x)| on the grid.
SpectralVelocityField nonlinear_rhs(const SpectralVelocityField& u_hat, double& u_max);

/// du/dt = nonlinear_rhs(u) + mu * laplacian(u), evaluated spectrally.
SpectralVelocityField time_derivative(const SpectralVelocityField& u_hat, double mu);

/// One integrating-factor RK4 step of size config.dt(). Throws
/// NumericalBlowup on a non-finite coefficient or a CFL violation.
SolverState step(const SolverState& state, const SolverConfig& config);

SpectralVelocityField init_taylor_green(const Grid& grid, double amplitude);
SpectralVelocityField init_beltrami(const Grid& grid, double amplitude);
SpectralVelocityField init_random_divfree(const Grid& grid, std::uint64_t seed,
                                          double spectrum_slope, double amplitude);

SpectralVelocityField initial_field(const Grid& grid, const InitSpec& init);
SolverState initial_state(const SolverConfig& config);

/// Zero-mean pressure from the divergence of the momentum equation:
/// q_hat = i k.(u . grad u)^ / |k|^2.
SpectralScalarField reconstruct_pressure(const SpectralVelocityField& u_hat);

}  // namespace regcrit
