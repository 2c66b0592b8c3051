#pragma once

#include <cstddef>
#include <numbers>

namespace regcrit {

/// Uniform periodic discretization of the cube [0, L)^3 with n points per
/// axis. Linear sample index is x fastest, then y, then z.
class Grid {
 public:
  explicit Grid(int n, double length = 2.0 * std::numbers::pi);

  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / n_; }
  double cell_volume() const noexcept;
  double volume() const noexcept { return length_ * length_ * length_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n_) * n_ * n_;
  }

  /// Multiplier turning an integer wavenumber into a physical one (2pi/L).
  double wavenumber_scale() const noexcept;

  /// Signed integer wavenumber in [-n/2, n/2) stored at FFT slot `slot`.
  int wavenumber(int slot) const noexcept { return slot < n_ / 2 ? slot : slot - n_; }

  /// Slot holding the conjugate partner of the wavenumber at `slot`.
  int partner_slot(int slot) const noexcept { return slot == 0 ? 0 : n_ - slot; }

  bool is_nyquist(int slot) const noexcept { return slot == n_ / 2; }

  std::size_t index(int ix, int iy, int iz) const noexcept {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(n_) *
               (static_cast<std::size_t>(iy) + static_cast<std::size_t>(n_) * iz);
  }

  /// Physical coordinate of sample `i` along any axis.
  double coordinate(int i) const noexcept { return spacing() * i; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
  double length_;
};

}  // namespace regcrit
