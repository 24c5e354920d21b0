#pragma once

#include <array>
#include <cmath>

namespace qcsim {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;  // row-major, m[i][j]

inline constexpr Vec3 zero_vec() { return {0.0, 0.0, 0.0}; }
inline constexpr Mat3 zero_mat() { return {zero_vec(), zero_vec(), zero_vec()}; }

inline constexpr Mat3 identity_mat()
{
  return {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}, Vec3{0.0, 0.0, 1.0}};
}

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b)
{
  a[0] += b[0];
  a[1] += b[1];
  a[2] += b[2];
  return a;
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross(const Vec3& a, const Vec3& b)
{
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Mat3 operator+(const Mat3& a, const Mat3& b)
{
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

inline Mat3 operator-(const Mat3& a, const Mat3& b)
{
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

inline Mat3 operator*(double s, const Mat3& a)
{
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = s * a[i][j];
  return r;
}

inline double trace(const Mat3& a) { return a[0][0] + a[1][1] + a[2][2]; }

inline Mat3 transpose(const Mat3& a)
{
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
  return r;
}

inline Mat3 sym(const Mat3& a) { return 0.5 * (a + transpose(a)); }
inline Mat3 skw(const Mat3& a) { return 0.5 * (a - transpose(a)); }

/// Frobenius product A·B = A_ij B_ij.
inline double ddot(const Mat3& a, const Mat3& b)
{
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += a[i][j] * b[i][j];
  return s;
}

inline double max_asymmetry(const Mat3& a)
{
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) m = std::fmax(m, std::fabs(a[i][j] - a[j][i]));
  return m;
}

}  // namespace qcsim
