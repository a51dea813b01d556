#pragma once

#include <array>
#include <optional>
#include <vector>

namespace polyforge {

using Vec3 = std::array<double, 3>;

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator*(double k, const Vec3& a) { return {k * a[0], k * a[1], k * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a);

// Orthogonal cell with the chain axis along z. x and y are pinned to 55 A;
// only the z height varies between systems.
struct Cell {
  static constexpr double kXY = 55.0;
  double bz = 0.0;

  bool valid() const { return bz > 0.0; }
};

// Atomic coordinates for one system. Periodic systems carry fractional
// coordinates and a cell; molecules carry Cartesian coordinates only.
struct Structure {
  bool periodic = false;
  std::vector<Vec3> cart;            // Angstrom
  std::vector<Vec3> frac;            // empty for molecules
  std::optional<Cell> cell;          // absent for molecules

  int atom_count() const { return static_cast<int>(cart.size()); }
};

}  // namespace polyforge
