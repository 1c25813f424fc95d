// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Pointwise spin algebra in three dimensions: Clifford multiplication by the
/// Pauli matrices, the quadratic map from spinors to vectors, and the right
/// action of the quaternions on C^2.
///
/// Convention: the Clifford images of an oriented orthonormal frame are
///
///   sigma_1 = [ i  0 ]   sigma_2 = [ 0 -1 ]   sigma_3 = [ 0  i ]
///             [ 0 -i ]             [ 1  0 ]             [ i  0 ]
///
/// These are skew-hermitian and satisfy sigma_1 sigma_2 = -sigma_3.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace spinframe {

using Cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Spinor {
  Cplx alpha{};
  Cplx beta{};

  double norm2() const { return std::norm(alpha) + std::norm(beta); }

  friend Spinor operator+(const Spinor& a, const Spinor& b) { return {a.alpha + b.alpha, a.beta + b.beta}; }
  friend Spinor operator-(const Spinor& a, const Spinor& b) { return {a.alpha - b.alpha, a.beta - b.beta}; }
  friend Spinor operator*(Cplx c, const Spinor& s) { return {c * s.alpha, c * s.beta}; }
  friend Spinor operator*(double c, const Spinor& s) { return {c * s.alpha, c * s.beta}; }
  friend bool operator==(const Spinor&, const Spinor&) = default;
};

/// Components in a fixed orthonormal frame (e1, e2, e3).
struct Vec3 {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  double operator[](int i) const { return i == 0 ? c1 : (i == 1 ? c2 : c3); }
  double norm2() const { return c1 * c1 + c2 * c2 + c3 * c3; }
  double norm() const { return std::sqrt(norm2()); }

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.c1 + b.c1, a.c2 + b.c2, a.c3 + b.c3}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.c1 - b.c1, a.c2 - b.c2, a.c3 - b.c3}; }
  friend Vec3 operator*(double s, const Vec3& v) { return {s * v.c1, s * v.c2, s * v.c3}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.c1 * b.c1 + a.c2 * b.c2 + a.c3 * b.c3; }

inline Cplx fiber_inner(const Spinor& a, const Spinor& b) {
  return std::conj(a.alpha) * b.alpha + std::conj(a.beta) * b.beta;
}

/// Row-major 2x2 complex matrix acting on spinors.
using Mat2 = std::array<Cplx, 4>;

inline Spinor operator*(const Mat2& m, const Spinor& s) {
  return {m[0] * s.alpha + m[1] * s.beta, m[2] * s.alpha + m[3] * s.beta};
}

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

/// sigma_i for i = 0, 1, 2 (frame vectors e1, e2, e3).
inline Mat2 pauli(int i) {
  constexpr Cplx I{0.0, 1.0};
  switch (i) {
    case 0: return {I, 0.0, 0.0, -I};
    case 1: return {0.0, -1.0, 1.0, 0.0};
    case 2: return {0.0, I, I, 0.0};
    default: throw std::out_of_range("pauli: index must be 0, 1 or 2");
  }
}

/// Matrix of Clifford multiplication by v, i.e. sum_i v_i sigma_i.
inline Mat2 clifford_matrix(const Vec3& v) {
  constexpr Cplx I{0.0, 1.0};
  return {I * v.c1, -v.c2 + I * v.c3, v.c2 + I * v.c3, -I * v.c1};
}

inline Spinor clifford_mul(const Vec3& v, const Spinor& s) { return clifford_matrix(v) * s; }

/// rho^{-1}(i (s s^*)_0) = (|a|^2 - |b|^2)/2 e1 + Im(a conj b) e2 + Re(a conj b) e3.
inline Vec3 quadratic_map(const Spinor& s) {
  const Cplx ab = s.alpha * std::conj(s.beta);
  return {0.5 * (std::norm(s.alpha) - std::norm(s.beta)), ab.imag(), ab.real()};
}

/// Right multiplication by j under (v, w) = v + j w.
inline Spinor apply_j(const Spinor& s) { return {-std::conj(s.beta), std::conj(s.alpha)}; }

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm2() const { return w * w + x * x + y * y + z * z; }

  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
};

class UnitQuaternion {
 public:
  static constexpr double kTolerance = 1e-12;

  UnitQuaternion() = default;
  UnitQuaternion(double w, double x, double y, double z) : q_{w, x, y, z} {
    if (!(std::abs(q_.norm2() - 1.0) <= kTolerance))
      throw std::invalid_argument("UnitQuaternion: w^2+x^2+y^2+z^2 must equal 1");
  }

  static UnitQuaternion identity() { return {}; }
  static UnitQuaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
  static UnitQuaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
  static UnitQuaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

  double w() const { return q_.w; }
  double x() const { return q_.x; }
  double y() const { return q_.y; }
  double z() const { return q_.z; }
  const Quaternion& value() const { return q_; }

  friend UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
    UnitQuaternion r;
    r.q_ = a.q_ * b.q_;
    return r;
  }

 private:
  Quaternion q_{};
};

/// s . q for s = (v, w) = v + j w. Scalars act as complex multiplication,
/// j as apply_j and k = ij as (s.i).j = (i conj(beta), -i conj(alpha)).
inline Spinor quat_act(const UnitQuaternion& q, const Spinor& s) {
  constexpr Cplx I{0.0, 1.0};
  const Spinor sj = apply_j(s);
  const Spinor sk{I * std::conj(s.beta), -I * std::conj(s.alpha)};
  return {q.w() * s.alpha + q.x() * I * s.alpha + q.y() * sj.alpha + q.z() * sk.alpha,
          q.w() * s.beta + q.x() * I * s.beta + q.y() * sj.beta + q.z() * sk.beta};
}

inline const UnitQuaternion& rotation_one_plus_k() {
  static const UnitQuaternion q{1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)};
  return q;
}

inline const UnitQuaternion& rotation_one_plus_j() {
  static const UnitQuaternion q{1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0), 0.0};
  return q;
}

struct FrameTriple {
  Vec3 x1;
  Vec3 x2;
  Vec3 x3;
};

/// Quadratic images of s, s.(1+k)/sqrt2 and s.(1+j)/sqrt2. Pairwise orthogonal,
/// each of length |s|^2 / 2.
inline FrameTriple frame_triple(const Spinor& s) {
  return {quadratic_map(s), quadratic_map(quat_act(rotation_one_plus_k(), s)),
          quadratic_map(quat_act(rotation_one_plus_j(), s))};
}

}  // namespace spinframe
