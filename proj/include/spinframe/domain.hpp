// SPDX-License-Identifier: Apache-2.0
#pragma once

// Geometric configuration on the torus R^3 / Lambda: lattices, spin structures,
// sampling grids, sampled fields and conformal factors.
//
// Node (i1, i2, i3) sits at fractional coordinate t = (i1/n1, i2/n2, i3/n3),
// physical position x = B t, and is stored at linear index i1 + n1 (i2 + n2 i3).
// Spinor fields hold the periodic representative u of a section; the section
// itself is exp(2 pi i <eps/2, t>) u, so spin twists live only in the momenta.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinframe/clifford.hpp"

namespace spinframe {

class GridMismatch : public std::invalid_argument {
 public:
  explicit GridMismatch(const std::string& what) : std::invalid_argument(what + ": grid mismatch") {}
};

class Lattice {
 public:
  /// Columns of `basis` generate Lambda.
  explicit Lattice(const Eigen::Matrix3d& basis) : basis_(basis) {
    if (!basis.allFinite()) throw std::invalid_argument("lattice basis must be finite");
    volume_ = basis.determinant();
    if (!(volume_ > 0.0)) throw std::invalid_argument("lattice basis must have positive determinant");
    dual_ = basis.inverse().transpose();
  }

  static Lattice cubic(double side = 1.0) { return Lattice(side * Eigen::Matrix3d::Identity()); }
  static Lattice diagonal(double a, double b, double c) { return Lattice(Eigen::Vector3d(a, b, c).asDiagonal()); }

  const Eigen::Matrix3d& basis() const { return basis_; }
  /// B^{-T}; columns pair with the generators to the identity.
  const Eigen::Matrix3d& dual() const { return dual_; }
  double volume() const { return volume_; }
  bool is_diagonal() const { return (basis_ - Eigen::Matrix3d(basis_.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0; }

  Vec3 physical_momentum(const Eigen::Vector3d& dual_coords) const {
    const Eigen::Vector3d xi = dual_ * dual_coords;
    return {xi[0], xi[1], xi[2]};
  }
  Vec3 position(const Eigen::Vector3d& fractional) const {
    const Eigen::Vector3d x = basis_ * fractional;
    return {x[0], x[1], x[2]};
  }

 private:
  Eigen::Matrix3d basis_;
  Eigen::Matrix3d dual_;
  double volume_ = 0.0;
};

/// One of the 8 spin structures on T^3: eps_a = 1 means antiperiodic along generator a.
class SpinStructure {
 public:
  SpinStructure() = default;
  explicit SpinStructure(std::array<int, 3> eps) : eps_(eps) {
    for (int e : eps)
      if (e != 0 && e != 1) throw std::invalid_argument("spin structure flags must be 0 or 1");
  }

  static std::array<SpinStructure, 8> all() {
    std::array<SpinStructure, 8> out;
    for (int code = 0; code < 8; ++code) out[code] = SpinStructure({code & 1, (code >> 1) & 1, (code >> 2) & 1});
    return out;
  }

  const std::array<int, 3>& flags() const { return eps_; }
  int operator[](int a) const { return eps_[a]; }
  double shift(int a) const { return 0.5 * eps_[a]; }
  bool periodic() const { return eps_ == std::array<int, 3>{0, 0, 0}; }
  friend bool operator==(const SpinStructure&, const SpinStructure&) = default;

 private:
  std::array<int, 3> eps_{0, 0, 0};
};

class Grid {
 public:
  Grid() = default;
  explicit Grid(std::array<int, 3> n) : n_(n) {
    for (int v : n) {
      if (v % 2 != 0) throw std::invalid_argument("grid dimensions must be even");
      if (v < 4) throw std::invalid_argument("grid dimensions must be at least 4");
    }
  }
  static Grid cube(int n) { return Grid({n, n, n}); }

  int n(int a) const { return n_[a]; }
  const std::array<int, 3>& dims() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2]; }
  std::size_t index(int i1, int i2, int i3) const {
    return static_cast<std::size_t>(i1) + static_cast<std::size_t>(n_[0]) * (i2 + static_cast<std::size_t>(n_[1]) * i3);
  }
  std::array<int, 3> multi_index(std::size_t idx) const {
    const int i1 = static_cast<int>(idx % n_[0]);
    idx /= n_[0];
    const int i2 = static_cast<int>(idx % n_[1]);
    return {i1, i2, static_cast<int>(idx / n_[1])};
  }
  Eigen::Vector3d fractional(std::size_t idx) const {
    const auto m = multi_index(idx);
    return {double(m[0]) / n_[0], double(m[1]) / n_[1], double(m[2]) / n_[2]};
  }
  /// Signed frequency of FFT slot m along axis a, in [-n/2, n/2).
  int frequency(int a, int m) const { return m < n_[a] / 2 ? m : m - n_[a]; }
  std::array<int, 3> frequencies(std::size_t idx) const {
    const auto m = multi_index(idx);
    return {frequency(0, m[0]), frequency(1, m[1]), frequency(2, m[2])};
  }
  bool is_nyquist(int a, int k) const { return k == -n_[a] / 2; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::array<int, 3> n_{4, 4, 4};
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw GridMismatch(where);
}

struct ScalarField {
  Grid grid;
  std::vector<double> data;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double value = 0.0) : grid(g), data(g.size(), value) {}
  double operator[](std::size_t i) const { return data[i]; }
  double& operator[](std::size_t i) { return data[i]; }
  double max_abs() const {
    double m = 0.0;
    for (double v : data) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Components along the Euclidean coordinate frame d/dx1, d/dx2, d/dx3.
struct VectorField {
  Grid grid;
  std::vector<Vec3> data;

  VectorField() = default;
  explicit VectorField(const Grid& g) : grid(g), data(g.size()) {}
  const Vec3& operator[](std::size_t i) const { return data[i]; }
  Vec3& operator[](std::size_t i) { return data[i]; }
  double max_norm() const {
    double m = 0.0;
    for (const auto& v : data) m = std::max(m, v.norm());
    return m;
  }
};

/// Interleaved storage (alpha_0, beta_0, alpha_1, beta_1, ...).
class SpinorField {
 public:
  SpinorField() = default;
  explicit SpinorField(const Grid& g) : grid_(g), data_(2 * g.size()) {}
  SpinorField(const Grid& g, std::vector<Cplx> data) : grid_(g), data_(std::move(data)) {
    if (data_.size() != 2 * g.size()) throw std::invalid_argument("SpinorField: data length must be 2 * grid size");
  }
  static SpinorField constant(const Grid& g, const Spinor& s) {
    SpinorField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f.set(i, s);
    return f;
  }

  const Grid& grid() const { return grid_; }
  std::size_t nodes() const { return grid_.size(); }
  Spinor at(std::size_t i) const { return {data_[2 * i], data_[2 * i + 1]}; }
  void set(std::size_t i, const Spinor& s) {
    data_[2 * i] = s.alpha;
    data_[2 * i + 1] = s.beta;
  }
  std::span<const Cplx> values() const { return data_; }
  std::span<Cplx> values() { return data_; }

  SpinorField& operator+=(const SpinorField& o) {
    require_same_grid(grid_, o.grid_, "SpinorField +=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  SpinorField& operator-=(const SpinorField& o) {
    require_same_grid(grid_, o.grid_, "SpinorField -=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  SpinorField& operator*=(Cplx c) {
    for (auto& v : data_) v *= c;
    return *this;
  }
  friend SpinorField operator-(SpinorField a, const SpinorField& b) { return a -= b; }
  friend SpinorField operator+(SpinorField a, const SpinorField& b) { return a += b; }
  friend SpinorField operator*(Cplx c, SpinorField a) { return a *= c; }

  /// Pointwise multiplication by a real field.
  SpinorField scaled(const ScalarField& s) const {
    require_same_grid(grid_, s.grid, "SpinorField::scaled");
    SpinorField out(*this);
    for (std::size_t i = 0; i < nodes(); ++i) {
      out.data_[2 * i] *= s[i];
      out.data_[2 * i + 1] *= s[i];
    }
    return out;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](Cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }
  double max_abs_component() const {
    double m = 0.0;
    for (Cplx z : data_) m = std::max(m, std::abs(z));
    return m;
  }

 private:
  Grid grid_;
  std::vector<Cplx> data_;
};

struct ConformalTerm {
  std::array<int, 3> m{0, 0, 0};  // wavevector in dual lattice coordinates
  double amplitude = 0.0;
  double phase = 0.0;
};

/// h(t) = offset + sum_j a_j cos(2 pi <m_j, t> + phi_j), strictly positive.
class ConformalFactor {
 public:
  ConformalFactor(double offset, std::vector<ConformalTerm> terms) : offset_(offset), terms_(std::move(terms)) {
    if (!std::isfinite(offset_)) throw std::invalid_argument("conformal offset must be finite");
    int mmax = 0;
    for (const auto& t : terms_) {
      if (!std::isfinite(t.amplitude) || !std::isfinite(t.phase))
        throw std::invalid_argument("conformal term amplitude and phase must be finite");
      for (int a = 0; a < 3; ++a) mmax = std::max(mmax, std::abs(t.m[a]));
    }
    // Positivity is checked on a reference sampling well above the band of h.
    const int n = 2 * std::max(16, 8 * mmax);
    const double hmin = min_on(Grid::cube(n));
    if (!(hmin > 0.0)) throw std::invalid_argument("conformal factor must be strictly positive (min sample " + std::to_string(hmin) + ")");
  }

  static ConformalFactor constant(double c) { return ConformalFactor(c, {}); }

  double offset() const { return offset_; }
  const std::vector<ConformalTerm>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }

  double operator()(const Eigen::Vector3d& t) const {
    double v = offset_;
    for (const auto& term : terms_)
      v += term.amplitude * std::cos(kTwoPi * (term.m[0] * t[0] + term.m[1] * t[1] + term.m[2] * t[2]) + term.phase);
    return v;
  }

  /// Largest |m_a| parallel to axis a.
  int band(int a) const {
    int b = 0;
    for (const auto& t : terms_) b = std::max(b, std::abs(t.m[a]));
    return b;
  }

  /// Bandlimit: every |m_a| < n_a / 4.
  bool admissible_on(const Grid& g) const {
    for (int a = 0; a < 3; ++a)
      if (4 * band(a) >= g.n(a)) return false;
    return min_on(g) > 0.0;
  }

  ScalarField samples(const Grid& g) const {
    for (int a = 0; a < 3; ++a)
      if (4 * band(a) >= g.n(a))
        throw std::invalid_argument("conformal factor wavevector exceeds the bandlimit n/4 of the grid");
    ScalarField s(g);
    for (std::size_t i = 0; i < g.size(); ++i) s[i] = (*this)(g.fractional(i));
    if (!(*std::min_element(s.data.begin(), s.data.end()) > 0.0))
      throw std::invalid_argument("conformal factor must be strictly positive on the grid");
    return s;
  }

  ScalarField power(const Grid& g, double p) const {
    ScalarField s = samples(g);
    for (double& v : s.data) v = std::pow(v, p);
    return s;
  }

  /// Pointwise product, again a trigonometric polynomial.
  friend ConformalFactor operator*(const ConformalFactor& a, const ConformalFactor& b) {
    double offset = a.offset_ * b.offset_;
    std::vector<ConformalTerm> terms;
    for (const auto& t : a.terms_) terms.push_back({t.m, t.amplitude * b.offset_, t.phase});
    for (const auto& t : b.terms_) terms.push_back({t.m, t.amplitude * a.offset_, t.phase});
    for (const auto& s : a.terms_) {
      for (const auto& t : b.terms_) {
        const double amp = 0.5 * s.amplitude * t.amplitude;
        const std::array<int, 3> sum{s.m[0] + t.m[0], s.m[1] + t.m[1], s.m[2] + t.m[2]};
        const std::array<int, 3> diff{s.m[0] - t.m[0], s.m[1] - t.m[1], s.m[2] - t.m[2]};
        terms.push_back({sum, amp, s.phase + t.phase});
        if (diff == std::array<int, 3>{0, 0, 0})
          offset += amp * std::cos(s.phase - t.phase);
        else
          terms.push_back({diff, amp, s.phase - t.phase});
      }
    }
    return ConformalFactor(offset, std::move(terms));
  }

 private:
  double min_on(const Grid& g) const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) m = std::min(m, (*this)(g.fractional(i)));
    return m;
  }

  double offset_;
  std::vector<ConformalTerm> terms_;
};

/// Density w of the volume form w dx, sampled on the grid.
class VolumeWeight {
 public:
  explicit VolumeWeight(ScalarField w) : w_(std::move(w)) {
    for (double v : w_.data)
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("volume weight must be strictly positive");
  }
  static VolumeWeight uniform(const Grid& g) { return VolumeWeight(ScalarField(g, 1.0)); }
  /// w = h^3, the density of dvol for the metric h^2 (flat).
  static VolumeWeight of_metric(const ConformalFactor& h, const Grid& g) { return VolumeWeight(h.power(g, 3.0)); }
  static VolumeWeight of_metric(const std::optional<ConformalFactor>& h, const Grid& g) {
    return h ? of_metric(*h, g) : uniform(g);
  }

  const Grid& grid() const { return w_.grid; }
  const ScalarField& field() const { return w_; }
  double operator[](std::size_t i) const { return w_[i]; }

 private:
  ScalarField w_;
};

/// Physical momenta B^{-T}(k + eps/2), one per FFT slot, in storage order.
inline std::vector<Vec3> momentum_set(const Lattice& lattice, const SpinStructure& spin, const Grid& grid) {
  std::vector<Vec3> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = grid.frequencies(i);
    out[i] = lattice.physical_momentum({k[0] + spin.shift(0), k[1] + spin.shift(1), k[2] + spin.shift(2)});
  }
  return out;
}

/// (vol / N) sum_nodes w <a, b>, conjugate-linear in a.
inline Cplx weighted_inner(const SpinorField& a, const SpinorField& b, const VolumeWeight& w, const Lattice& lattice) {
  require_same_grid(a.grid(), b.grid(), "weighted_inner");
  require_same_grid(a.grid(), w.grid(), "weighted_inner");
  Cplx acc = 0.0;
  for (std::size_t i = 0; i < a.nodes(); ++i) acc += w[i] * fiber_inner(a.at(i), b.at(i));
  return acc * (lattice.volume() / static_cast<double>(a.nodes()));
}

inline Cplx inner(const SpinorField& a, const SpinorField& b, const Lattice& lattice) {
  require_same_grid(a.grid(), b.grid(), "inner");
  Cplx acc = 0.0;
  for (std::size_t i = 0; i < a.nodes(); ++i) acc += fiber_inner(a.at(i), b.at(i));
  return acc * (lattice.volume() / static_cast<double>(a.nodes()));
}

inline double weighted_norm(const SpinorField& a, const VolumeWeight& w, const Lattice& lattice) {
  return std::sqrt(std::max(0.0, weighted_inner(a, a, w, lattice).real()));
}

inline double norm(const SpinorField& a, const Lattice& lattice) { return std::sqrt(std::max(0.0, inner(a, a, lattice).real())); }

/// Standard complex Gaussian in every component.
inline SpinorField random_spinor_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  SpinorField f(g);
  for (auto& z : f.values()) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = {re, im};
  }
  return f;
}

/// exp(i sign pi <eps, t>) at every node, t in lattice coordinates.
inline std::vector<Cplx> twist_phases(const Grid& g, const SpinStructure& spin, double sign) {
  std::vector<Cplx> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Eigen::Vector3d t = g.fractional(i);
    const double arg = sign * kPi * (spin[0] * t[0] + spin[1] * t[1] + spin[2] * t[2]);
    out[i] = std::polar(1.0, arg);
  }
  return out;
}

/// Values of the section exp(2 pi i <eps/2, t>) u at the nodes.
inline std::vector<Spinor> section_values(const SpinorField& u, const SpinStructure& spin) {
  const auto phase = twist_phases(u.grid(), spin, 1.0);
  std::vector<Spinor> out(u.nodes());
  for (std::size_t i = 0; i < u.nodes(); ++i) out[i] = phase[i] * u.at(i);
  return out;
}

/// Right action of j on a section, expressed on representatives:
/// u -> exp(-2 pi i <eps, t>) j(u). The spin twist is conjugated by j, so the
/// phase moves the result back to the canonical twist.
inline SpinorField apply_j(const SpinorField& u, const SpinStructure& spin) {
  const auto phase = twist_phases(u.grid(), spin, -2.0);
  SpinorField out(u.grid());
  for (std::size_t i = 0; i < u.nodes(); ++i) out.set(i, phase[i] * apply_j(u.at(i)));
  return out;
}

}  // namespace spinframe
