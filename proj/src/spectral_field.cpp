#include "regcrit/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "regcrit/errors.hpp"
#include "regcrit/fft.hpp"

namespace regcrit {
namespace {

constexpr double kHermitianTolerance = 1e-10;

// Visits every slot in storage order with its signed wavenumbers.
template <typename Fn>
void for_each_mode(const Grid& grid, Fn&& fn) {
  const int n = grid.n();
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz) {
    const int kz = grid.wavenumber(iz);
    for (int iy = 0; iy < n; ++iy) {
      const int ky = grid.wavenumber(iy);
      for (int ix = 0; ix < n; ++ix, ++idx) {
        fn(idx, std::array<int, 3>{ix, iy, iz}, std::array<int, 3>{grid.wavenumber(ix), ky, kz});
      }
    }
  }
}

bool on_nyquist_plane(const Grid& grid, const std::array<int, 3>& slot) {
  return grid.is_nyquist(slot[0]) || grid.is_nyquist(slot[1]) || grid.is_nyquist(slot[2]);
}

// Multiplication by i*kappa, written out so the two real products are exact
// single roundings.
Complex times_i(double kappa, const Complex& c) {
  return {-kappa * c.imag(), kappa * c.real()};
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw InvalidArgument(std::string(what) + ": operands live on different grids");
}

template <typename Op>
SpectralScalarField combine(const SpectralScalarField& a, const SpectralScalarField& b, Op op) {
  require_same_grid(a.grid(), b.grid(), "spectral arithmetic");
  std::vector<Complex> out(a.coefficients().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return SpectralScalarField(a.grid(), std::move(out));
}

}  // namespace

// ---------------------------------------------------------------------------
// Field containers

RealScalarField::RealScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("RealScalarField: expected " + std::to_string(grid_.size()) +
                          " samples, got " + std::to_string(values_.size()));
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidArgument("RealScalarField: non-finite sample");
  }
}

RealScalarField RealScalarField::zeros(const Grid& grid) {
  return RealScalarField(grid, std::vector<double>(grid.size(), 0.0));
}

VelocityField::VelocityField(std::array<RealScalarField, 3> components)
    : components_(std::move(components)) {
  if (!(components_[0].grid() == components_[1].grid()) ||
      !(components_[0].grid() == components_[2].grid())) {
    throw InvalidArgument("VelocityField: components on different grids");
  }
}

VelocityField::VelocityField(const Grid& grid, std::vector<double> u1, std::vector<double> u2,
                             std::vector<double> u3)
    : VelocityField(std::array<RealScalarField, 3>{RealScalarField(grid, std::move(u1)),
                                                   RealScalarField(grid, std::move(u2)),
                                                   RealScalarField(grid, std::move(u3))}) {}

VelocityField VelocityField::zeros(const Grid& grid) {
  return VelocityField({RealScalarField::zeros(grid), RealScalarField::zeros(grid),
                        RealScalarField::zeros(grid)});
}

SpectralScalarField::SpectralScalarField(Grid grid, std::vector<Complex> coefficients)
    : grid_(grid), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != grid_.size()) {
    throw InvalidArgument("SpectralScalarField: expected " + std::to_string(grid_.size()) +
                          " coefficients, got " + std::to_string(coefficients_.size()));
  }
}

SpectralScalarField SpectralScalarField::zeros(const Grid& grid) {
  return SpectralScalarField(grid, std::vector<Complex>(grid.size()));
}

Complex SpectralScalarField::at(int kx, int ky, int kz) const {
  const int n = grid_.n();
  auto slot = [n](int k) {
    if (k < -n / 2 || k >= n / 2) throw InvalidArgument("wavenumber outside [-n/2, n/2)");
    return k < 0 ? k + n : k;
  };
  return coefficients_[grid_.index(slot(kx), slot(ky), slot(kz))];
}

SpectralVelocityField::SpectralVelocityField(std::array<SpectralScalarField, 3> components)
    : components_(std::move(components)) {
  if (!(components_[0].grid() == components_[1].grid()) ||
      !(components_[0].grid() == components_[2].grid())) {
    throw InvalidArgument("SpectralVelocityField: components on different grids");
  }
}

SpectralVelocityField SpectralVelocityField::zeros(const Grid& grid) {
  return SpectralVelocityField({SpectralScalarField::zeros(grid), SpectralScalarField::zeros(grid),
                                SpectralScalarField::zeros(grid)});
}

// ---------------------------------------------------------------------------
// Transforms

SpectralScalarField fft_forward(const RealScalarField& f) {
  const Grid& grid = f.grid();
  std::vector<Complex> in(f.values().begin(), f.values().end());
  std::vector<Complex> out(grid.size());
  fft::forward(grid.n(), in, out);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : out) c *= scale;
  return SpectralScalarField(grid, std::move(out));
}

SpectralVelocityField fft_forward(const VelocityField& u) {
  auto c = fft_forward_batch(u.components());
  return SpectralVelocityField({std::move(c[0]), std::move(c[1]), std::move(c[2])});
}

double hermitian_defect(const SpectralScalarField& F) {
  const Grid& grid = F.grid();
  const int n = grid.n();
  double largest_sq = 0.0;
  for (const auto& c : F.coefficients()) largest_sq = std::max(largest_sq, std::norm(c));
  if (largest_sq == 0.0) return 0.0;
  double defect_sq = 0.0;
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz) {
    const int pz = (n - iz) % n;
    for (int iy = 0; iy < n; ++iy) {
      const int py = (n - iy) % n;
      for (int ix = 0; ix < n; ++ix, ++idx) {
        const Complex d = F[idx] - std::conj(F[grid.index((n - ix) % n, py, pz)]);
        defect_sq = std::max(defect_sq, std::norm(d));
      }
    }
  }
  return std::sqrt(defect_sq / largest_sq);
}

RealScalarField fft_inverse(const SpectralScalarField& F) {
  const double defect = hermitian_defect(F);
  if (defect > kHermitianTolerance) {
    throw NonHermitianInput("fft_inverse: conjugate symmetry violated (relative defect " +
                            std::to_string(defect) + ")");
  }
  const Grid& grid = F.grid();
  std::vector<Complex> out(grid.size());
  fft::backward(grid.n(), F.coefficients(), out);
  std::vector<double> values(grid.size());
  std::transform(out.begin(), out.end(), values.begin(), [](const Complex& c) { return c.real(); });
  return RealScalarField(grid, std::move(values));
}

VelocityField fft_inverse(const SpectralVelocityField& U) {
  for (const auto& c : U.components()) {
    const double defect = hermitian_defect(c);
    if (defect > kHermitianTolerance) {
      throw NonHermitianInput("fft_inverse: conjugate symmetry violated (relative defect " +
                              std::to_string(defect) + ")");
    }
  }
  auto r = fft_inverse_batch(U.components());
  return VelocityField({std::move(r[0]), std::move(r[1]), std::move(r[2])});
}

std::vector<RealScalarField> fft_inverse_batch(std::span<const SpectralScalarField> fields) {
  std::vector<RealScalarField> result;
  result.reserve(fields.size());
  if (fields.empty()) return result;
  const Grid& grid = fields[0].grid();
  const std::size_t size = grid.size();
  std::vector<Complex> in(size), out(size);
  // a + i b transforms to a real part from a and an imaginary part from b.
  for (std::size_t f = 0; f < fields.size(); f += 2) {
    const auto a = fields[f].coefficients();
    if (f + 1 < fields.size()) {
      const auto b = fields[f + 1].coefficients();
      for (std::size_t i = 0; i < size; ++i) {
        in[i] = {a[i].real() - b[i].imag(), a[i].imag() + b[i].real()};
      }
    } else {
      std::copy(a.begin(), a.end(), in.begin());
    }
    fft::backward(grid.n(), in, out);
    std::vector<double> ra(size);
    for (std::size_t i = 0; i < size; ++i) ra[i] = out[i].real();
    result.emplace_back(grid, std::move(ra));
    if (f + 1 < fields.size()) {
      std::vector<double> rb(size);
      for (std::size_t i = 0; i < size; ++i) rb[i] = out[i].imag();
      result.emplace_back(grid, std::move(rb));
    }
  }
  return result;
}

std::vector<SpectralScalarField> fft_forward_batch(std::span<const RealScalarField> fields) {
  std::vector<SpectralScalarField> result;
  result.reserve(fields.size());
  if (fields.empty()) return result;
  const Grid& grid = fields[0].grid();
  const int n = grid.n();
  const std::size_t size = grid.size();
  const double scale = 1.0 / static_cast<double>(size);
  std::vector<Complex> in(size), out(size);
  for (std::size_t f = 0; f < fields.size(); f += 2) {
    const auto a = fields[f].values();
    if (f + 1 == fields.size()) {
      result.push_back(fft_forward(fields[f]));
      break;
    }
    const auto b = fields[f + 1].values();
    for (std::size_t i = 0; i < size; ++i) in[i] = {a[i], b[i]};
    fft::forward(n, in, out);
    // A(k) = (Z(k) + conj Z(-k)) / 2, B(k) = (Z(k) - conj Z(-k)) / 2i.
    std::vector<Complex> ca(size), cb(size);
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz) {
      const int pz = (n - iz) % n;
      for (int iy = 0; iy < n; ++iy) {
        const int py = (n - iy) % n;
        for (int ix = 0; ix < n; ++ix, ++idx) {
          const Complex z = out[idx];
          const Complex zp = std::conj(out[grid.index((n - ix) % n, py, pz)]);
          const Complex sum = z + zp;
          const Complex diff = z - zp;
          ca[idx] = 0.5 * scale * sum;
          cb[idx] = 0.5 * scale * Complex{diff.imag(), -diff.real()};
        }
      }
    }
    result.emplace_back(grid, std::move(ca));
    result.emplace_back(grid, std::move(cb));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Differential operators

SpectralScalarField partial(const SpectralScalarField& F, int axis) {
  if (axis < 0 || axis > 2) throw InvalidArgument("partial: axis must be 0, 1 or 2");
  const Grid& grid = F.grid();
  const int n = grid.n();
  const double scale = grid.wavenumber_scale();
  std::vector<Complex> out(grid.size());
  const Complex* in = F.coefficients().data();
  for (int iz = 0; iz < n; ++iz) {
    if (grid.is_nyquist(iz)) continue;
    for (int iy = 0; iy < n; ++iy) {
      if (grid.is_nyquist(iy)) continue;
      const std::size_t row = grid.index(0, iy, iz);
      const double fixed = scale * (axis == 1 ? grid.wavenumber(iy) : grid.wavenumber(iz));
      for (int ix = 0; ix < n; ++ix) {
        if (grid.is_nyquist(ix)) continue;
        const double kappa = axis == 0 ? scale * grid.wavenumber(ix) : fixed;
        out[row + ix] = times_i(kappa, in[row + ix]);
      }
    }
  }
  return SpectralScalarField(grid, std::move(out));
}

SpectralScalarField second_partial(const SpectralScalarField& F, int axis_a, int axis_b) {
  if (axis_a < 0 || axis_a > 2 || axis_b < 0 || axis_b > 2) {
    throw InvalidArgument("second_partial: axes must be 0, 1 or 2");
  }
  const Grid& grid = F.grid();
  const double scale = grid.wavenumber_scale();
  std::vector<Complex> out(grid.size());
  for_each_mode(grid, [&](std::size_t idx, const std::array<int, 3>& s, const std::array<int, 3>& k) {
    if (on_nyquist_plane(grid, s)) return;
    // The product of the two wavenumbers is formed first so that the result
    // is symmetric in (axis_a, axis_b) bit for bit.
    const double weight = -((scale * k[axis_a]) * (scale * k[axis_b]));
    out[idx] = weight * F[idx];
  });
  return SpectralScalarField(grid, std::move(out));
}

SpectralVectorField gradient(const SpectralScalarField& F) {
  return SpectralVectorField({partial(F, 0), partial(F, 1), partial(F, 2)});
}

SpectralVelocityField curl(const SpectralVelocityField& U) {
  const Grid& grid = U.grid();
  const double scale = grid.wavenumber_scale();
  std::array<std::vector<Complex>, 3> out;
  for (auto& c : out) c.assign(grid.size(), Complex{});
  const auto& u = U.components();
  for_each_mode(grid, [&](std::size_t idx, const std::array<int, 3>& s, const std::array<int, 3>& k) {
    if (on_nyquist_plane(grid, s)) return;
    const double kx = scale * k[0], ky = scale * k[1], kz = scale * k[2];
    out[0][idx] = times_i(ky, u[2][idx]) - times_i(kz, u[1][idx]);
    out[1][idx] = times_i(kz, u[0][idx]) - times_i(kx, u[2][idx]);
    out[2][idx] = times_i(kx, u[1][idx]) - times_i(ky, u[0][idx]);
  });
  return SpectralVelocityField({SpectralScalarField(grid, std::move(out[0])),
                                SpectralScalarField(grid, std::move(out[1])),
                                SpectralScalarField(grid, std::move(out[2]))});
}

SpectralScalarField divergence(const SpectralVelocityField& U) {
  const Grid& grid = U.grid();
  const double scale = grid.wavenumber_scale();
  std::vector<Complex> out(grid.size());
  const auto& u = U.components();
  for_each_mode(grid, [&](std::size_t idx, const std::array<int, 3>& s, const std::array<int, 3>& k) {
    if (on_nyquist_plane(grid, s)) return;
    out[idx] = times_i(scale * k[0], u[0][idx]) + times_i(scale * k[1], u[1][idx]) +
               times_i(scale * k[2], u[2][idx]);
  });
  return SpectralScalarField(grid, std::move(out));
}

SpectralScalarField laplacian(const SpectralScalarField& F) {
  const Grid& grid = F.grid();
  const double scale = grid.wavenumber_scale();
  std::vector<Complex> out(grid.size());
  for_each_mode(grid, [&](std::size_t idx, const std::array<int, 3>& s, const std::array<int, 3>& k) {
    if (on_nyquist_plane(grid, s)) return;
    const double kx = scale * k[0], ky = scale * k[1], kz = scale * k[2];
    out[idx] = -(kx * kx + ky * ky + kz * kz) * F[idx];
  });
  return SpectralScalarField(grid, std::move(out));
}

SpectralVelocityField leray_project(const SpectralVelocityField& U) {
  const Grid& grid = U.grid();
  const double scale = grid.wavenumber_scale();
  std::array<std::vector<Complex>, 3> out;
  for (auto& c : out) c.assign(grid.size(), Complex{});
  const auto& u = U.components();
  for_each_mode(grid, [&](std::size_t idx, const std::array<int, 3>& s, const std::array<int, 3>& k) {
    if (on_nyquist_plane(grid, s)) return;
    if (k[0] == 0 && k[1] == 0 && k[2] == 0) {
      for (int c = 0; c < 3; ++c) out[c][idx] = u[c][idx];
      return;
    }
    const double kv[3] = {scale * k[0], scale * k[1], scale * k[2]};
    const double k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
    const Complex k_dot_u = (kv[0] * u[0][idx] + kv[1] * u[1][idx] + kv[2] * u[2][idx]) / k2;
    for (int c = 0; c < 3; ++c) out[c][idx] = u[c][idx] - kv[c] * k_dot_u;
  });
  return SpectralVelocityField({SpectralScalarField(grid, std::move(out[0])),
                                SpectralScalarField(grid, std::move(out[1])),
                                SpectralScalarField(grid, std::move(out[2]))});
}

SpectralScalarField dealias(const SpectralScalarField& F) {
  const Grid& grid = F.grid();
  const int n = grid.n();
  auto kept = [&](int slot) { return 3 * std::abs(grid.wavenumber(slot)) <= n; };
  std::vector<Complex> out(grid.size());
  const Complex* in = F.coefficients().data();
  for (int iz = 0; iz < n; ++iz) {
    if (!kept(iz)) continue;
    for (int iy = 0; iy < n; ++iy) {
      if (!kept(iy)) continue;
      const std::size_t row = grid.index(0, iy, iz);
      for (int ix = 0; ix < n; ++ix) {
        if (kept(ix)) out[row + ix] = in[row + ix];
      }
    }
  }
  return SpectralScalarField(grid, std::move(out));
}

SpectralVelocityField dealias(const SpectralVelocityField& U) {
  return SpectralVelocityField(
      {dealias(U.component(0)), dealias(U.component(1)), dealias(U.component(2))});
}

SpectralScalarField resample(const SpectralScalarField& F, const Grid& target) {
  const Grid& source = F.grid();
  if (std::abs(source.length() - target.length()) > 1e-15 * source.length()) {
    throw InvalidArgument("resample: box lengths differ");
  }
  const int half = std::min(source.n(), target.n()) / 2;
  std::vector<Complex> out(target.size());
  const int tn = target.n();
  for_each_mode(source, [&](std::size_t idx, const std::array<int, 3>& s, const std::array<int, 3>& k) {
    if (on_nyquist_plane(source, s)) return;
    if (std::abs(k[0]) >= half || std::abs(k[1]) >= half || std::abs(k[2]) >= half) return;
    auto slot = [tn](int kk) { return kk < 0 ? kk + tn : kk; };
    out[target.index(slot(k[0]), slot(k[1]), slot(k[2]))] = F[idx];
  });
  return SpectralScalarField(target, std::move(out));
}

SpectralVelocityField resample(const SpectralVelocityField& U, const Grid& target) {
  return SpectralVelocityField({resample(U.component(0), target), resample(U.component(1), target),
                                resample(U.component(2), target)});
}

double inner_product(const SpectralScalarField& a, const SpectralScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "inner_product");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
    sum += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  }
  return sum * a.grid().volume();
}

double inner_product(const SpectralVelocityField& a, const SpectralVelocityField& b) {
  return inner_product(a.component(0), b.component(0)) +
         inner_product(a.component(1), b.component(1)) +
         inner_product(a.component(2), b.component(2));
}

SpectralScalarField operator+(const SpectralScalarField& a, const SpectralScalarField& b) {
  return combine(a, b, [](const Complex& x, const Complex& y) { return x + y; });
}

SpectralScalarField operator-(const SpectralScalarField& a, const SpectralScalarField& b) {
  return combine(a, b, [](const Complex& x, const Complex& y) { return x - y; });
}

SpectralScalarField operator*(double s, const SpectralScalarField& a) {
  std::vector<Complex> out(a.coefficients().begin(), a.coefficients().end());
  for (auto& c : out) c *= s;
  return SpectralScalarField(a.grid(), std::move(out));
}

SpectralVelocityField operator+(const SpectralVelocityField& a, const SpectralVelocityField& b) {
  return SpectralVelocityField({a.component(0) + b.component(0), a.component(1) + b.component(1),
                                a.component(2) + b.component(2)});
}

SpectralVelocityField operator-(const SpectralVelocityField& a, const SpectralVelocityField& b) {
  return SpectralVelocityField({a.component(0) - b.component(0), a.component(1) - b.component(1),
                                a.component(2) - b.component(2)});
}

SpectralVelocityField operator*(double s, const SpectralVelocityField& a) {
  return SpectralVelocityField({s * a.component(0), s * a.component(1), s * a.component(2)});
}

double max_abs(const SpectralVelocityField& U) {
  double m = 0.0;
  for (const auto& comp : U.components()) {
    for (const auto& c : comp.coefficients()) m = std::max(m, std::abs(c));
  }
  return m;
}

double max_divergence_coefficient(const SpectralVelocityField& U) {
  const Grid& grid = U.grid();
  const double scale = grid.wavenumber_scale();
  const auto& u = U.components();
  double m = 0.0;
  for_each_mode(grid, [&](std::size_t idx, const auto&, const std::array<int, 3>& k) {
    const Complex d = scale * (double(k[0]) * u[0][idx] + double(k[1]) * u[1][idx] +
                               double(k[2]) * u[2][idx]);
    m = std::max(m, std::abs(d));
  });
  return m;
}

}  // namespace regcrit
