#pragma once

#include <cmath>
#include <complex>

namespace bqc {

/// Discrete angle k*pi/4 with k in {0..7}. All protocol angle arithmetic
/// (theta, phi, delta, sigma) is integer arithmetic mod 8; pi corresponds
/// to adding 4. Construction reduces any integer index mod 8.
class Angle8 {
 public:
  constexpr Angle8() = default;
  constexpr explicit Angle8(int index) : index_(((index % 8) + 8) % 8) {}

  constexpr int index() const { return index_; }

  double radians() const { return index_ * kQuarterPi; }

  /// e^{i k pi/4}
  std::complex<double> phase() const {
    return {std::cos(radians()), std::sin(radians())};
  }

  friend constexpr Angle8 operator+(Angle8 a, Angle8 b) {
    return Angle8(a.index_ + b.index_);
  }
  friend constexpr Angle8 operator-(Angle8 a, Angle8 b) {
    return Angle8(a.index_ - b.index_);
  }
  constexpr Angle8 operator-() const { return Angle8(-index_); }

  /// Adds r*pi, i.e. 4r positions. r is a bit.
  constexpr Angle8 flipped(int r) const { return Angle8(index_ + 4 * (r & 1)); }

  /// The orthogonal partner angle k+4 (|+_k> and |+_{k+4}> are orthogonal).
  constexpr Angle8 antipode() const { return Angle8(index_ + 4); }

  constexpr bool operator==(const Angle8&) const = default;

 private:
  static constexpr double kQuarterPi = 0.78539816339744830961;
  int index_ = 0;
};

constexpr Angle8 angle_add(Angle8 a, Angle8 b) { return a + b; }

}  // namespace bqc
