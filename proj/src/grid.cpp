#include "regcrit/grid.hpp"

#include <cmath>
#include <string>

#include "regcrit/errors.hpp"

namespace regcrit {

Grid::Grid(int n, double length) : n_(n), length_(length) {
  if (n < 4 || n % 2 != 0) {
    throw InvalidArgument("grid: n must be even and >= 4, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("grid: box length must be positive and finite");
  }
}

double Grid::cell_volume() const noexcept {
  const double h = spacing();
  return h * h * h;
}

double Grid::wavenumber_scale() const noexcept {
  return 2.0 * std::numbers::pi / length_;
}

}  // namespace regcrit
