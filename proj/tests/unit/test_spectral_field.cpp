#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "regcrit/errors.hpp"
#include "regcrit/solver.hpp"

using namespace regcrit;
using namespace regcrit::testing;
using std::numbers::pi;

namespace {

const Fn3 sin_x = [](double x, double, double) { return std::sin(x); };
const Fn3 cos_x = [](double x, double, double) { return std::cos(x); };
const Fn3 sin_y = [](double, double y, double) { return std::sin(y); };

SpectralVelocityField random_spectral(const Grid& grid, unsigned seed) {
  return fft_forward(noise_field(grid, seed));
}

}  // namespace

TEST_CASE("grid validates n and length") {
  CHECK_THROWS_AS(Grid(3), InvalidArgument);
  CHECK_THROWS_AS(Grid(2), InvalidArgument);
  CHECK_THROWS_AS(Grid(7), InvalidArgument);
  CHECK_THROWS_AS(Grid(8, 0.0), InvalidArgument);
  const Grid g(8);
  CHECK(g.size() == 512);
  CHECK(g.wavenumber_scale() == 1.0);
  CHECK(g.wavenumber(3) == 3);
  CHECK(g.wavenumber(4) == -4);
  CHECK(g.wavenumber(7) == -1);
  CHECK(g.partner_slot(1) == 7);
  CHECK(g.is_nyquist(4));
}

TEST_CASE("fft_forward of a constant is the mean") {
  const Grid g(8);
  const auto F = fft_forward(sample(g, [](double, double, double) { return 2.5; }));
  CHECK(F.at(0, 0, 0).real() == doctest::Approx(2.5).epsilon(1e-15));
  double rest = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) rest = std::max(rest, std::abs(F[i]));
  CHECK(rest < 1e-15);
}

TEST_CASE("fft_forward of sin(x) on n = 8 matches a direct DFT") {
  const Grid g(8);
  const auto f = sample(g, sin_x);
  const auto F = fft_forward(f);
  CHECK(std::abs(F.at(1, 0, 0) - Complex(0.0, -0.5)) < 1e-15);
  CHECK(std::abs(F.at(-1, 0, 0) - Complex(0.0, 0.5)) < 1e-15);
  // Direct summation over every wavevector.
  const int n = g.n();
  double worst = 0.0;
  for (int kz = -n / 2; kz < n / 2; ++kz) {
    for (int ky = -n / 2; ky < n / 2; ++ky) {
      for (int kx = -n / 2; kx < n / 2; ++kx) {
        Complex sum{};
        std::size_t idx = 0;
        for (int iz = 0; iz < n; ++iz) {
          for (int iy = 0; iy < n; ++iy) {
            for (int ix = 0; ix < n; ++ix, ++idx) {
              const double phase = -2.0 * pi * (kx * ix + ky * iy + kz * iz) / n;
              sum += f[idx] * Complex(std::cos(phase), std::sin(phase));
            }
          }
        }
        sum /= static_cast<double>(g.size());
        worst = std::max(worst, std::abs(sum - F.at(kx, ky, kz)));
      }
    }
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("fft round trip is the identity for random input") {
  const Grid g(16);
  const auto f = noise(g, 7);
  const auto back = fft_inverse(fft_forward(f));
  CHECK(max_abs_diff(f, back) < 1e-13 * max_abs_value(f));
}

TEST_CASE("fft_inverse examples") {
  const Grid g(8);
  CHECK(max_abs_value(fft_inverse(SpectralScalarField::zeros(g))) == 0.0);

  std::vector<Complex> c(g.size());
  c[g.index(1, 0, 0)] = Complex(0.0, -0.5);
  c[g.index(7, 0, 0)] = Complex(0.0, 0.5);
  const auto f = fft_inverse(SpectralScalarField(g, c));
  CHECK(max_abs_diff(f, sample(g, sin_x)) < 1e-15);

  c[g.index(7, 0, 0)] = Complex(0.3, 0.5);
  CHECK_THROWS_AS(fft_inverse(SpectralScalarField(g, c)), NonHermitianInput);
  CHECK(hermitian_defect(SpectralScalarField(g, c)) > 0.1);
}

TEST_CASE("Plancherel: sample energy equals coefficient energy") {
  const Grid g(16);
  const auto f = noise(g, 11);
  const auto F = fft_forward(f);
  double physical = 0.0;
  for (double v : f.values()) physical += v * v;
  physical *= g.cell_volume();
  double spectral = 0.0;
  for (const auto& c : F.coefficients()) spectral += std::norm(c);
  spectral *= g.volume();
  CHECK(std::abs(physical - spectral) < 1e-12 * physical);
}

TEST_CASE("batch transforms agree with single transforms") {
  const Grid g(16);
  const auto u = noise_field(g, 3);
  std::vector<RealScalarField> reals(u.components().begin(), u.components().end());
  const auto batched = fft_forward_batch(reals);
  REQUIRE(batched.size() == 3);
  for (int c = 0; c < 3; ++c) {
    const auto single = fft_forward(u.component(c));
    double d = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) d = std::max(d, std::abs(single[i] - batched[c][i]));
    CHECK(d < 1e-15);
    CHECK(hermitian_defect(batched[c]) < 1e-15);
  }
  const auto back = fft_inverse_batch(batched);
  for (int c = 0; c < 3; ++c) CHECK(max_abs_diff(back[c], u.component(c)) < 1e-13);
}

TEST_CASE("gradient examples") {
  const Grid g(16);
  const auto grad = fft_inverse(gradient(fft_forward(sample(g, sin_x))));
  CHECK(max_abs_diff(grad, sample(g, cos_x, zero, zero)) < 1e-13);

  const auto flat = gradient(fft_forward(sample(g, [](double, double, double) { return 4.0; })));
  CHECK(max_abs(flat) == 0.0);

  const auto twice = partial(partial(fft_forward(sample(g, sin_x)), 0), 0);
  const Fn3 minus_sin = [](double x, double, double) { return -std::sin(x); };
  CHECK(max_abs_diff(fft_inverse(twice), sample(g, minus_sin)) < 1e-13);
}

TEST_CASE("curl examples") {
  const Grid g(16);
  const auto w = fft_inverse(curl(spectral(g, zero, zero, sin_x)));
  const Fn3 minus_cos = [](double x, double, double) { return -std::cos(x); };
  CHECK(max_abs_diff(w, sample(g, zero, minus_cos, zero)) < 1e-13);

  const auto f = fft_forward(noise(g, 5));
  CHECK(max_abs(curl(gradient(f))) < 1e-12 * max_abs(gradient(f)));

  const auto ub = init_beltrami(Grid(32), 1.0);
  CHECK(max_abs_diff(curl(ub), ub) < 1e-13);
}

TEST_CASE("divergence examples") {
  const Grid g(16);
  const auto d1 = fft_inverse(divergence(spectral(g, sin_x, zero, zero)));
  CHECK(max_abs_diff(d1, sample(g, cos_x)) < 1e-13);
  const auto d2 = fft_inverse(divergence(spectral(g, sin_y, zero, zero)));
  CHECK(max_abs_value(d2) < 1e-15);
  const auto U = random_spectral(g, 21);
  CHECK(max_abs_value(fft_inverse(divergence(leray_project(U)))) < 1e-12 * max_abs(U));
}

TEST_CASE("leray_project examples") {
  const Grid g(16);
  // Gradient of a mean-zero scalar is annihilated.
  auto f = fft_forward(noise(g, 9));
  std::vector<Complex> c(f.coefficients().begin(), f.coefficients().end());
  c[0] = Complex{};
  const auto grad = gradient(SpectralScalarField(g, c));
  CHECK(max_abs(leray_project(grad)) < 1e-15 * max_abs(grad) + 1e-300);

  const auto U = random_spectral(g, 13);
  const auto P = leray_project(U);
  CHECK(max_abs_diff(leray_project(P), P) < 1e-13 * max_abs(P));

  const auto ub = init_beltrami(Grid(32), 1.0);
  CHECK(max_abs_diff(leray_project(ub), ub) < 1e-13);
}

TEST_CASE("leray_project is self-adjoint") {
  const Grid g(16);
  const auto U = random_spectral(g, 31);
  const auto V = random_spectral(g, 41);
  const double a = inner_product(leray_project(U), V);
  const double b = inner_product(U, leray_project(V));
  CHECK(std::abs(a - b) < 1e-13 * std::abs(a));
}

TEST_CASE("divergence of curl vanishes") {
  const Grid g(16);
  const auto U = random_spectral(g, 51);
  CHECK(max_abs_value(fft_inverse(divergence(curl(U)))) < 1e-12 * max_abs(U));
}

TEST_CASE("mixed second derivatives are exactly symmetric") {
  const Grid g(16);
  const auto f = fft_forward(noise(g, 61));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const auto a = second_partial(f, i, j);
      const auto b = second_partial(f, j, i);
      for (std::size_t k = 0; k < g.size(); ++k) REQUIRE(a[k] == b[k]);
    }
  }
}

TEST_CASE("derivatives zero the Nyquist planes") {
  const Grid g(8);
  const auto f = fft_forward(noise(g, 71));
  const auto d = partial(f, 1);
  CHECK(d.at(-4, 1, 1) == Complex{});
  CHECK(d.at(1, -4, 1) == Complex{});
  CHECK(d.at(1, 1, -4) == Complex{});
  CHECK(hermitian_defect(d) < 1e-15);
}

TEST_CASE("dealias examples") {
  const Grid g(16);
  auto single = [&](int kx) {
    std::vector<Complex> c(g.size());
    c[g.index(kx, 0, 0)] = Complex(0.0, -0.5);
    c[g.index(g.n() - kx, 0, 0)] = Complex(0.0, 0.5);
    return SpectralScalarField(g, c);
  };
  const auto low = single(1);
  const auto low_out = dealias(low);
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(low_out[i] == low[i]);

  const auto high_out = dealias(single(7));
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(high_out[i] == Complex{});

  const auto U = random_spectral(g, 81);
  CHECK(inner_product(dealias(U), dealias(U)) <= inner_product(U, U));
}

TEST_CASE("resample preserves shared modes") {
  const Grid coarse(16);
  const Grid fine(32);
  const auto U = dealias(random_spectral(coarse, 91));
  const auto up = resample(U, fine);
  const auto down = resample(up, coarse);
  CHECK(max_abs_diff(down, U) == 0.0);
  CHECK(std::abs(inner_product(up, up) - inner_product(U, U)) < 1e-13 * inner_product(U, U));
}
