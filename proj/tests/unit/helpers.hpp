#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "regcrit/spectral_field.hpp"

namespace regcrit::testing {

using Fn3 = std::function<double(double, double, double)>;

inline RealScalarField sample(const Grid& grid, const Fn3& f) {
  const int n = grid.n();
  std::vector<double> v(grid.size());
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz) {
    for (int iy = 0; iy < n; ++iy) {
      for (int ix = 0; ix < n; ++ix, ++idx) {
        v[idx] = f(grid.coordinate(ix), grid.coordinate(iy), grid.coordinate(iz));
      }
    }
  }
  return RealScalarField(grid, std::move(v));
}

inline VelocityField sample(const Grid& grid, const Fn3& f1, const Fn3& f2, const Fn3& f3) {
  return VelocityField({sample(grid, f1), sample(grid, f2), sample(grid, f3)});
}

inline SpectralVelocityField spectral(const Grid& grid, const Fn3& f1, const Fn3& f2,
                                      const Fn3& f3) {
  return fft_forward(sample(grid, f1, f2, f3));
}

inline const Fn3 zero = [](double, double, double) { return 0.0; };

/// Uniform noise in [-1, 1) from a fixed seed.
inline RealScalarField noise(const Grid& grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(grid.size());
  for (auto& x : v) x = dist(rng);
  return RealScalarField(grid, std::move(v));
}

inline VelocityField noise_field(const Grid& grid, unsigned seed) {
  return VelocityField({noise(grid, seed), noise(grid, seed + 1), noise(grid, seed + 2)});
}

inline double max_abs_diff(const RealScalarField& a, const RealScalarField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double max_abs_diff(const VelocityField& a, const VelocityField& b) {
  double d = 0.0;
  for (int c = 0; c < 3; ++c) d = std::max(d, max_abs_diff(a.component(c), b.component(c)));
  return d;
}

inline double max_abs_value(const RealScalarField& a) {
  double d = 0.0;
  for (double x : a.values()) d = std::max(d, std::abs(x));
  return d;
}

inline double max_abs_diff(const SpectralVelocityField& a, const SpectralVelocityField& b) {
  return max_abs(a - b);
}

}  // namespace regcrit::testing
