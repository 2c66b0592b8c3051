#include "regcrit/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "regcrit/errors.hpp"

namespace regcrit {

LebesgueExponent::LebesgueExponent(double p) : p_(p), infinite_(false) {
  if (std::isinf(p) && p > 0) {
    infinite_ = true;
    p_ = 0.0;
    return;
  }
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw InvalidArgument("LebesgueExponent: p must lie in (1, inf]");
  }
}

LebesgueExponent LebesgueExponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("LebesgueExponent: cannot parse '" + text + "'");
  }
  if (used != text.size()) throw InvalidArgument("LebesgueExponent: cannot parse '" + text + "'");
  return LebesgueExponent(p);
}

double LebesgueExponent::value() const noexcept {
  return infinite_ ? std::numeric_limits<double>::infinity() : p_;
}

LebesgueExponent LebesgueExponent::holder_partner() const {
  if (infinite_) return LebesgueExponent(2.0);
  if (!(p_ > 2.0)) throw InvalidArgument("holder_partner: requires p > 2");
  return LebesgueExponent(2.0 * p_ / (p_ - 2.0));
}

std::string LebesgueExponent::label() const {
  if (infinite_) return "inf";
  std::ostringstream out;
  out.precision(15);
  out << p_;
  return out.str();
}

std::vector<double> pointwise_magnitude(const VelocityField& u) {
  const auto a = u.component(0).values();
  const auto b = u.component(1).values();
  const auto c = u.component(2).values();
  std::vector<double> mag(a.size());
  for (std::size_t i = 0; i < mag.size(); ++i) {
    mag[i] = std::sqrt(a[i] * a[i] + b[i] * b[i] + c[i] * c[i]);
  }
  return mag;
}

double lp_norm_of_magnitude(std::span<const double> magnitude, double cell_volume,
                            LebesgueExponent p) {
  double largest = 0.0;
  for (double v : magnitude) largest = std::max(largest, v);
  if (p.is_infinite() || largest == 0.0) return largest;
  const double exponent = p.value();
  double sum = 0.0;
  if (exponent == 2.0) {
    for (double v : magnitude) {
      const double r = v / largest;
      sum += r * r;
    }
  } else {
    for (double v : magnitude) sum += std::pow(v / largest, exponent);
  }
  return largest * std::pow(cell_volume * sum, 1.0 / exponent);
}

double lp_norm(const VelocityField& u, LebesgueExponent p) {
  const auto mag = pointwise_magnitude(u);
  return lp_norm_of_magnitude(mag, u.grid().cell_volume(), p);
}

double linf_norm_oversampled(const SpectralVelocityField& u, int factor) {
  if (factor < 1) throw InvalidArgument("linf_norm_oversampled: factor must be >= 1");
  if (factor == 1) return lp_norm(fft_inverse(u), LebesgueExponent::infinity());
  const Grid fine(u.grid().n() * factor, u.grid().length());
  return lp_norm(fft_inverse(resample(u, fine)), LebesgueExponent::infinity());
}

double sobolev_seminorm(const SpectralVelocityField& u, int m) {
  if (m < 0 || m > 3) throw InvalidArgument("sobolev_seminorm: m must be in 0..3");
  const Grid& grid = u.grid();
  const int n = grid.n();
  const double scale = grid.wavenumber_scale();
  const auto& c = u.components();
  double sum = 0.0;
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz) {
    const double kz = scale * grid.wavenumber(iz);
    for (int iy = 0; iy < n; ++iy) {
      const double ky = scale * grid.wavenumber(iy);
      for (int ix = 0; ix < n; ++ix, ++idx) {
        const double kx = scale * grid.wavenumber(ix);
        double weight = 1.0;
        if (m > 0) {
          if (grid.is_nyquist(ix) || grid.is_nyquist(iy) || grid.is_nyquist(iz)) continue;
          const double k2 = kx * kx + ky * ky + kz * kz;
          weight = k2;
          for (int power = 1; power < m; ++power) weight *= k2;
        }
        sum += weight * (std::norm(c[0][idx]) + std::norm(c[1][idx]) + std::norm(c[2][idx]));
      }
    }
  }
  return std::sqrt(sum * grid.volume());
}

std::vector<double> hessian_magnitude(const SpectralVelocityField& u) {
  const Grid& grid = u.grid();
  std::vector<SpectralScalarField> spectra;
  std::vector<double> multiplicity;
  for (int l = 0; l < 3; ++l) {
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        spectra.push_back(second_partial(u.component(l), i, j));
        multiplicity.push_back(i == j ? 1.0 : 2.0);
      }
    }
  }
  const auto entries = fft_inverse_batch(spectra);
  std::vector<double> squared(grid.size(), 0.0);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto v = entries[e].values();
    for (std::size_t x = 0; x < squared.size(); ++x) squared[x] += multiplicity[e] * v[x] * v[x];
  }
  for (auto& s : squared) s = std::sqrt(s);
  return squared;
}

double gn_ratio(const SpectralVelocityField& u, LebesgueExponent p) {
  if (!p.is_infinite() && !(p.value() > 3.0)) {
    throw InvalidArgument("gn_ratio: requires 3 < p <= inf");
  }
  const double h2 = sobolev_seminorm(u, 2);
  const double h3 = sobolev_seminorm(u, 3);
  if (h3 == 0.0) throw DegenerateField("gn_ratio: ||grad^3 u||_2 vanishes");
  const double theta = p.three_over_p();
  const LebesgueExponent q = p.holder_partner();
  // At q = 2 the left side is the same L^2 seminorm, evaluated exactly.
  const double left = q.value() == 2.0
                          ? h2
                          : lp_norm_of_magnitude(hessian_magnitude(u), u.grid().cell_volume(), q);
  return left / (std::pow(h2, 1.0 - theta) * std::pow(h3, theta));
}

NormReport norm_report(const SpectralVelocityField& u, std::span<const LebesgueExponent> exponents) {
  NormReport report;
  const auto physical = fft_inverse(u);
  const auto mag = pointwise_magnitude(physical);
  const double dv = u.grid().cell_volume();
  for (const auto& p : exponents) report.lp[p.label()] = lp_norm_of_magnitude(mag, dv, p);
  for (int m = 0; m <= 3; ++m) report.sobolev[m] = sobolev_seminorm(u, m);
  report.linf = lp_norm_of_magnitude(mag, dv, LebesgueExponent::infinity());
  return report;
}

}  // namespace regcrit
