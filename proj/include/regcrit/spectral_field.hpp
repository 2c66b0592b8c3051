#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "regcrit/grid.hpp"

namespace regcrit {

using Complex = std::complex<double>;

/// Real samples of a scalar on the grid. Values are checked finite at
/// construction and immutable afterwards.
class RealScalarField {
 public:
  RealScalarField(Grid grid, std::vector<double> values);
  static RealScalarField zeros(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Three real components sharing one grid.
class VelocityField {
 public:
  explicit VelocityField(std::array<RealScalarField, 3> components);
  VelocityField(const Grid& grid, std::vector<double> u1, std::vector<double> u2,
                std::vector<double> u3);
  static VelocityField zeros(const Grid& grid);

  const Grid& grid() const noexcept { return components_[0].grid(); }
  const RealScalarField& component(int i) const { return components_.at(i); }
  const std::array<RealScalarField, 3>& components() const noexcept { return components_; }

 private:
  std::array<RealScalarField, 3> components_;
};

/// Fourier coefficients of a real scalar, normalized so the k = 0 entry is
/// the mean. Storage follows the FFT slot layout of `Grid`.
class SpectralScalarField {
 public:
  SpectralScalarField(Grid grid, std::vector<Complex> coefficients);
  static SpectralScalarField zeros(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> coefficients() const noexcept { return coefficients_; }
  const Complex& operator[](std::size_t i) const noexcept { return coefficients_[i]; }

  /// Coefficient at signed integer wavevector k, each entry in [-n/2, n/2).
  Complex at(int kx, int ky, int kz) const;

 private:
  Grid grid_;
  std::vector<Complex> coefficients_;
};

/// Spectral form of a vector field; also used for gradients and vorticity.
class SpectralVelocityField {
 public:
  explicit SpectralVelocityField(std::array<SpectralScalarField, 3> components);
  static SpectralVelocityField zeros(const Grid& grid);

  const Grid& grid() const noexcept { return components_[0].grid(); }
  const SpectralScalarField& component(int i) const { return components_.at(i); }
  const std::array<SpectralScalarField, 3>& components() const noexcept {
    return components_;
  }

 private:
  std::array<SpectralScalarField, 3> components_;
};

using SpectralVectorField = SpectralVelocityField;

// Transforms. Forward divides by n^3.
SpectralScalarField fft_forward(const RealScalarField& f);
SpectralVelocityField fft_forward(const VelocityField& u);

/// Throws NonHermitianInput when |F(k) - conj(F(-k))| exceeds 1e-10 of the
/// largest coefficient; smaller imaginary residue is discarded.
RealScalarField fft_inverse(const SpectralScalarField& F);
VelocityField fft_inverse(const SpectralVelocityField& U);

/// Unchecked batch transforms for spectra that are conjugate-symmetric by
/// construction. Two fields share one complex FFT, so results can differ
/// from fft_inverse / fft_forward in the last bit.
std::vector<RealScalarField> fft_inverse_batch(std::span<const SpectralScalarField> fields);
std::vector<SpectralScalarField> fft_forward_batch(std::span<const RealScalarField> fields);

/// Largest |F(k) - conj(F(-k))| relative to max |F| (0 for a zero field).
double hermitian_defect(const SpectralScalarField& F);

// Differential operators. Modes on a Nyquist plane (any axis at -n/2) are
// zeroed in every output.
SpectralScalarField partial(const SpectralScalarField& F, int axis);
SpectralScalarField second_partial(const SpectralScalarField& F, int axis_a, int axis_b);
SpectralVectorField gradient(const SpectralScalarField& F);
SpectralVelocityField curl(const SpectralVelocityField& U);
SpectralScalarField divergence(const SpectralVelocityField& U);
SpectralScalarField laplacian(const SpectralScalarField& F);

/// Helmholtz-Leray projection onto divergence-free fields. The mean mode
/// passes through; Nyquist planes are zeroed.
SpectralVelocityField leray_project(const SpectralVelocityField& U);

/// 2/3 rule: zero every mode with max(|kx|,|ky|,|kz|) > n/3.
SpectralScalarField dealias(const SpectralScalarField& F);
SpectralVelocityField dealias(const SpectralVelocityField& U);

/// Zero-pads or truncates to another resolution on the same box. Modes
/// that exist on both grids keep their coefficients; Nyquist planes of the
/// source are dropped.
SpectralScalarField resample(const SpectralScalarField& F, const Grid& target);
SpectralVelocityField resample(const SpectralVelocityField& U, const Grid& target);

/// Spectral L2 inner product: L^3 * sum_k Re(a(k) conj(b(k))), summed over
/// all slots in storage order.
double inner_product(const SpectralScalarField& a, const SpectralScalarField& b);
double inner_product(const SpectralVelocityField& a, const SpectralVelocityField& b);

// Pointwise algebra used by the solver and tests.
SpectralScalarField operator+(const SpectralScalarField& a, const SpectralScalarField& b);
SpectralScalarField operator-(const SpectralScalarField& a, const SpectralScalarField& b);
SpectralScalarField operator*(double s, const SpectralScalarField& a);
SpectralVelocityField operator+(const SpectralVelocityField& a, const SpectralVelocityField& b);
SpectralVelocityField operator-(const SpectralVelocityField& a, const SpectralVelocityField& b);
SpectralVelocityField operator*(double s, const SpectralVelocityField& a);

/// Largest coefficient magnitude over all components.
double max_abs(const SpectralVelocityField& U);

/// max_k |k . U(k)| using physical wavenumbers; zero for divergence-free U.
double max_divergence_coefficient(const SpectralVelocityField& U);

}  // namespace regcrit
