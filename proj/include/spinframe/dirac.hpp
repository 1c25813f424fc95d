// SPDX-License-Identifier: Apache-2.0
#pragma once

// Spin Dirac operator on flat and conformally flat 3-tori.
//
// Flat case: Fourier-diagonal with symbol 2 pi i sum_a xi_a sigma_a at the
// twisted momenta xi = B^{-T}(k + eps/2).
//
// Conformal case g = h^2 (flat): the 3-d covariance D_g(h^{-1} psi) = h^{-2} D psi
// makes S = h^{-1/2} D h^{-1/2} symmetric in the unweighted L2 product and
// isospectral to D_g; eigenspinors of D_g are Phi = h^{-3/2} theta.
//
// Nyquist slots on periodic axes (k_a = -n_a/2, eps_a = 0) are their own partner
// under xi -> -xi, so no sign of xi_a is preferred there. They get the scalar
// symbol 2 pi min_s |xi_s| Id (min over the sign choices): hermitian, commuting
// with j, and never zero.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "spinframe/clifford.hpp"
#include "spinframe/domain.hpp"
#include "spinframe/fft.hpp"

namespace spinframe {

struct OperatorSpec {
  Lattice lattice;
  SpinStructure spin;
  Grid grid;
  std::optional<ConformalFactor> conformal;  // absent: flat metric

  OperatorSpec(Lattice l, SpinStructure s, Grid g, std::optional<ConformalFactor> h = std::nullopt)
      : lattice(std::move(l)), spin(s), grid(g), conformal(std::move(h)) {
    if (conformal && !conformal->admissible_on(grid))
      throw std::invalid_argument("conformal factor is not admissible on the operator grid");
  }

  bool flat() const { return !conformal.has_value(); }
  VolumeWeight weight() const { return VolumeWeight::of_metric(conformal, grid); }
};

struct EigenPair {
  double lambda = 0.0;
  SpinorField field;  // eigenspinor of the physical operator, unit weighted norm
  double residual = 0.0;
  int cluster_id = 0;
};

/// Precomputed per-slot symbols and conformal samples for one OperatorSpec.
/// Application uses an internal scratch buffer, so one instance must not be
/// shared between threads.
class DiracOperator {
 public:
  explicit DiracOperator(const OperatorSpec& spec) : spec_(spec), scratch_(2 * spec.grid.size()) {
    const Grid& g = spec.grid;
    const auto xi = momentum_set(spec.lattice, spec.spin, g);
    symbols_.resize(g.size());
    magnitude2_.resize(g.size());
    constexpr Cplx I{0.0, 1.0};
    for (std::size_t s = 0; s < g.size(); ++s) {
      const auto k = g.frequencies(s);
      bool nyquist = false;
      for (int a = 0; a < 3; ++a) nyquist = nyquist || (spec.spin[a] == 0 && g.is_nyquist(a, k[a]));
      if (!nyquist) {
        const Mat2 c = clifford_matrix(xi[s]);
        for (int e = 0; e < 4; ++e) symbols_[s][e] = kTwoPi * I * c[e];
        magnitude2_[s] = kTwoPi * kTwoPi * xi[s].norm2();
      } else {
        const double c = kTwoPi * nyquist_magnitude(spec, k);
        symbols_[s] = {c, 0.0, 0.0, c};
        magnitude2_[s] = c * c;
      }
    }
    if (spec.conformal) {
      inv_sqrt_h_ = spec.conformal->power(g, -0.5).data;
    }
    double smallest = std::numeric_limits<double>::infinity();
    for (double m2 : magnitude2_)
      if (m2 > 1e-12) smallest = std::min(smallest, m2);
    shift_ = std::isfinite(smallest) ? smallest : 1.0;
  }

  const OperatorSpec& spec() const { return spec_; }
  std::size_t dimension() const { return 2 * spec_.grid.size(); }

  /// Flat operator on interleaved samples.
  void apply_flat(std::span<const Cplx> in, std::span<Cplx> out) const {
    check_sizes(in, out);
    std::copy(in.begin(), in.end(), scratch_.begin());
    fft_forward(scratch_, spec_.grid, 2);
    for (std::size_t s = 0; s < symbols_.size(); ++s) {
      const Spinor r = symbols_[s] * Spinor{scratch_[2 * s], scratch_[2 * s + 1]};
      scratch_[2 * s] = r.alpha;
      scratch_[2 * s + 1] = r.beta;
    }
    fft_inverse(scratch_, spec_.grid, 2);
    std::copy(scratch_.begin(), scratch_.end(), out.begin());
  }

  /// S = h^{-1/2} D h^{-1/2}; equal to the flat operator when h is absent.
  void apply_symmetrized(std::span<const Cplx> in, std::span<Cplx> out) const {
    check_sizes(in, out);
    if (inv_sqrt_h_.empty()) {
      apply_flat(in, out);
      return;
    }
    std::vector<Cplx> tmp(in.begin(), in.end());
    scale_nodes(tmp, inv_sqrt_h_);
    apply_flat(tmp, out);
    scale_nodes(out, inv_sqrt_h_);
  }

  void apply_squared(std::span<const Cplx> in, std::span<Cplx> out) const {
    std::vector<Cplx> tmp(in.size());
    apply_symmetrized(in, tmp);
    apply_symmetrized(tmp, out);
  }

  /// (|symbol|^2 + shift)^{-1}, the flat approximation of (S^2 + shift)^{-1}.
  void precondition(std::span<const Cplx> in, std::span<Cplx> out) const {
    check_sizes(in, out);
    std::copy(in.begin(), in.end(), scratch_.begin());
    fft_forward(scratch_, spec_.grid, 2);
    for (std::size_t s = 0; s < magnitude2_.size(); ++s) {
      const double f = 1.0 / (magnitude2_[s] + shift_);
      scratch_[2 * s] *= f;
      scratch_[2 * s + 1] *= f;
    }
    fft_inverse(scratch_, spec_.grid, 2);
    std::copy(scratch_.begin(), scratch_.end(), out.begin());
  }

  /// Exact projector onto the eigenspaces of the flat operator whose
  /// eigenvalue lies within `tol` of lambda.
  void project_flat_eigenspace(std::span<Cplx> v, double lambda, double tol) const {
    check_sizes(v, v);
    std::copy(v.begin(), v.end(), scratch_.begin());
    fft_forward(scratch_, spec_.grid, 2);
    for (std::size_t s = 0; s < symbols_.size(); ++s) {
      const Mat2& m = symbols_[s];
      const Spinor x{scratch_[2 * s], scratch_[2 * s + 1]};
      Spinor y{};
      if (m[1] == 0.0 && m[2] == 0.0 && m[0] == m[3]) {
        if (std::abs(m[0].real() - lambda) <= tol) y = x;
      } else {
        const double mag = std::sqrt(magnitude2_[s]);
        for (double sign : {1.0, -1.0})
          if (std::abs(sign * mag - lambda) <= tol) y = y + 0.5 * (x + (sign / mag) * (m * x));
      }
      scratch_[2 * s] = y.alpha;
      scratch_[2 * s + 1] = y.beta;
    }
    fft_inverse(scratch_, spec_.grid, 2);
    std::copy(scratch_.begin(), scratch_.end(), v.begin());
  }

  /// Samples of h^{-1/2}; empty for the flat metric.
  const std::vector<double>& inv_sqrt_h() const { return inv_sqrt_h_; }

  static double nyquist_magnitude(const OperatorSpec& spec, const std::array<int, 3>& k) {
    double best = std::numeric_limits<double>::infinity();
    for (int signs = 0; signs < 8; ++signs) {
      Eigen::Vector3d kk;
      for (int a = 0; a < 3; ++a) {
        const bool nyq = spec.spin[a] == 0 && spec.grid.is_nyquist(a, k[a]);
        const double flip = (nyq && ((signs >> a) & 1)) ? -1.0 : 1.0;
        kk[a] = flip * (k[a] + spec.spin.shift(a));
      }
      best = std::min(best, spec.lattice.physical_momentum(kk).norm());
    }
    return best;
  }

 private:
  void check_sizes(std::span<const Cplx> in, std::span<Cplx> out) const {
    if (in.size() != dimension() || out.size() != dimension()) throw GridMismatch("DiracOperator");
  }
  static void scale_nodes(std::span<Cplx> v, const std::vector<double>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      v[2 * i] *= s[i];
      v[2 * i + 1] *= s[i];
    }
  }

  OperatorSpec spec_;
  std::vector<Mat2> symbols_;
  std::vector<double> magnitude2_;
  std::vector<double> inv_sqrt_h_;
  double shift_ = 1.0;
  mutable std::vector<Cplx> scratch_;
};

inline SpinorField flat_dirac_apply(const SpinorField& f, const Lattice& lattice, const SpinStructure& spin) {
  const DiracOperator op(OperatorSpec(lattice, spin, f.grid()));
  SpinorField out(f.grid());
  op.apply_flat(f.values(), out.values());
  return out;
}

inline void require_conformal(const OperatorSpec& spec, const SpinorField& f, const char* where) {
  if (!spec.conformal) throw std::invalid_argument(std::string(where) + ": operator spec has no conformal factor");
  require_same_grid(spec.grid, f.grid(), where);
}

inline SpinorField conformal_dirac_apply_symmetrized(const SpinorField& f, const OperatorSpec& spec) {
  require_conformal(spec, f, "conformal_dirac_apply_symmetrized");
  const DiracOperator op(spec);
  SpinorField out(f.grid());
  op.apply_symmetrized(f.values(), out.values());
  return out;
}

/// Dirac operator of g = h^2 (flat) acting on Phi: h^{-2} D (h Phi).
inline SpinorField conformal_dirac_apply_physical(const SpinorField& phi, const OperatorSpec& spec) {
  require_same_grid(spec.grid, phi.grid(), "conformal_dirac_apply_physical");
  if (!spec.conformal) return flat_dirac_apply(phi, spec.lattice, spec.spin);
  const ScalarField h = spec.conformal->samples(spec.grid);
  ScalarField inv_h2(spec.grid);
  for (std::size_t i = 0; i < h.data.size(); ++i) inv_h2[i] = 1.0 / (h[i] * h[i]);
  return flat_dirac_apply(phi.scaled(h), spec.lattice, spec.spin).scaled(inv_h2);
}

/// theta -> h^{-3/2} theta.
inline SpinorField desymmetrize(const SpinorField& theta, const OperatorSpec& spec) {
  require_conformal(spec, theta, "desymmetrize");
  return theta.scaled(spec.conformal->power(spec.grid, -1.5));
}

struct SpectralLevel {
  double lambda = 0.0;
  int multiplicity = 0;
  friend bool operator==(const SpectralLevel&, const SpectralLevel&) = default;
};

/// Groups sorted values whose consecutive gaps are below gap_tol * max(1, |lambda|).
inline std::vector<SpectralLevel> group_levels(std::vector<double> values, double gap_tol) {
  std::sort(values.begin(), values.end());
  std::vector<SpectralLevel> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    const bool split = i == values.size() || values[i] - values[i - 1] >= gap_tol * std::max({1.0, std::abs(values[i]), std::abs(values[i - 1])});
    if (!split) continue;
    double mean = 0.0;
    for (std::size_t j = start; j < i; ++j) mean += values[j];
    out.push_back({mean / static_cast<double>(i - start), static_cast<int>(i - start)});
    start = i;
  }
  return out;
}

/// Closed-form spectrum of the flat operator: +-2 pi |xi| for every twisted
/// momentum with 2 pi |xi| <= lambda_max, and a double zero mode when eps = 0.
inline std::vector<SpectralLevel> flat_spectrum_oracle(const Lattice& lattice, const SpinStructure& spin, double lambda_max) {
  if (!(lambda_max > 0.0)) throw std::invalid_argument("flat_spectrum_oracle: lambda_max must be positive");
  const double radius = lambda_max / kTwoPi;
  std::vector<double> values;
  int bound[3];
  for (int a = 0; a < 3; ++a) bound[a] = static_cast<int>(std::ceil(lattice.basis().col(a).norm() * radius)) + 1;
  for (int k1 = -bound[0]; k1 <= bound[0]; ++k1)
    for (int k2 = -bound[1]; k2 <= bound[1]; ++k2)
      for (int k3 = -bound[2]; k3 <= bound[2]; ++k3) {
        const Vec3 xi = lattice.physical_momentum({k1 + spin.shift(0), k2 + spin.shift(1), k3 + spin.shift(2)});
        const double lam = kTwoPi * xi.norm();
        if (lam > lambda_max * (1.0 + 1e-12)) continue;
        values.push_back(lam);
        values.push_back(-lam);
      }
  return group_levels(std::move(values), 1e-9);
}

inline std::vector<double> expand_levels(const std::vector<SpectralLevel>& levels) {
  std::vector<double> out;
  for (const auto& l : levels) out.insert(out.end(), static_cast<std::size_t>(l.multiplicity), l.lambda);
  return out;
}

/// All eigenvalues of the discrete flat operator on `grid`, in closed form.
inline std::vector<double> grid_spectrum_oracle(const Lattice& lattice, const SpinStructure& spin, const Grid& grid) {
  const OperatorSpec spec(lattice, spin, grid);
  std::vector<double> out;
  out.reserve(2 * grid.size());
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const auto k = grid.frequencies(s);
    bool nyquist = false;
    for (int a = 0; a < 3; ++a) nyquist = nyquist || (spin[a] == 0 && grid.is_nyquist(a, k[a]));
    if (nyquist) {
      const double c = kTwoPi * DiracOperator::nyquist_magnitude(spec, k);
      out.push_back(c);
      out.push_back(c);
    } else {
      const double lam = kTwoPi * lattice.physical_momentum({k[0] + spin.shift(0), k[1] + spin.shift(1), k[2] + spin.shift(2)}).norm();
      out.push_back(lam);
      out.push_back(-lam);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Below this |lambda| every eigenvalue of the continuum flat operator is
/// resolved by the grid and no Nyquist slot contributes.
inline double grid_resolved_cutoff(const Lattice& lattice, const SpinStructure& spin, const Grid& grid) {
  const OperatorSpec spec(lattice, spin, grid);
  double cutoff = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const auto k = grid.frequencies(s);
    for (int a = 0; a < 3; ++a)
      if (spin[a] == 0 && grid.is_nyquist(a, k[a])) cutoff = std::min(cutoff, kTwoPi * DiracOperator::nyquist_magnitude(spec, k));
  }
  // Momenta with some |k_a + eps_a/2| >= n_a/2 are not on the grid.
  const int reach = 2 + *std::max_element(grid.dims().begin(), grid.dims().end());
  for (int a = 0; a < 3; ++a) {
    for (int k1 = -reach; k1 <= reach; ++k1)
      for (int k2 = -reach; k2 <= reach; ++k2)
        for (int k3 = -reach; k3 <= reach; ++k3) {
          const int kk[3] = {k1, k2, k3};
          const double c = kk[a] + spin.shift(a);
          if (std::abs(c) < 0.5 * grid.n(a)) continue;
          const double lam = kTwoPi * lattice.physical_momentum({k1 + spin.shift(0), k2 + spin.shift(1), k3 + spin.shift(2)}).norm();
          cutoff = std::min(cutoff, lam);
        }
  }
  return cutoff;
}

struct PlaneWave {
  double lambda = 0.0;
  SpinorField field;
};

/// exp(2 pi i <k, t>) psi0 with i sum_a xi_a sigma_a psi0 = sign |xi| psi0, so that
/// the flat operator returns sign 2 pi |xi| times the field. psi0 is unit with
/// its first nonzero component real and positive.
inline PlaneWave plane_wave_eigenspinor(const Lattice& lattice, const SpinStructure& spin, const Grid& grid,
                                        const std::array<int, 3>& k, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("plane_wave_eigenspinor: sign must be +1 or -1");
  for (int a = 0; a < 3; ++a) {
    const double c = k[a] + spin.shift(a);
    if (std::abs(c) >= 0.5 * grid.n(a)) throw std::invalid_argument("plane_wave_eigenspinor: momentum is not resolved by the grid");
  }
  const Vec3 xi = lattice.physical_momentum({k[0] + spin.shift(0), k[1] + spin.shift(1), k[2] + spin.shift(2)});
  const double mag = xi.norm();
  if (mag == 0.0) throw std::invalid_argument("plane_wave_eigenspinor: zero momentum has no nonzero eigenvalue");
  constexpr Cplx I{0.0, 1.0};
  // H = i sum xi_a sigma_a = [[-xi1, -i xi2 - xi3], [i xi2 - xi3, xi1]].
  const double s = sign * mag;
  const Spinor u{-I * xi.c2 - xi.c3, s + xi.c1};
  const Spinor v{s - xi.c1, I * xi.c2 - xi.c3};
  Spinor psi = u.norm2() >= v.norm2() ? u : v;
  psi = (1.0 / std::sqrt(psi.norm2())) * psi;
  const Cplx lead = std::abs(psi.alpha) > 1e-14 ? psi.alpha : psi.beta;
  psi = (std::abs(lead) / lead) * psi;

  SpinorField f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Eigen::Vector3d t = grid.fractional(i);
    const double arg = kTwoPi * (k[0] * t[0] + k[1] * t[1] + k[2] * t[2]);
    f.set(i, std::polar(1.0, arg) * psi);
  }
  return {kTwoPi * s, std::move(f)};
}

struct DenseSpectrum {
  std::vector<double> eigenvalues;  // ascending
  double hermiticity_defect = 0.0;  // max |M - M^*|
};

inline constexpr std::size_t kDefaultDenseLimit = 432;

/// Assembles S column by column and diagonalizes it densely.
inline DenseSpectrum dense_spectrum(const OperatorSpec& spec, std::size_t max_dimension = kDefaultDenseLimit) {
  const DiracOperator op(spec);
  const std::size_t n = op.dimension();
  if (n > max_dimension)
    throw std::invalid_argument("dense_spectrum: grid too large for dense assembly (" + std::to_string(n) + " > " +
                                std::to_string(max_dimension) + " complex dimensions)");
  Eigen::MatrixXcd m(n, n);
  std::vector<Cplx> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply_symmetrized(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
  }
  DenseSpectrum out;
  out.hermiticity_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (out.hermiticity_defect > 1e-10)
    throw std::runtime_error("dense_spectrum: assembled operator is not hermitian (defect " + std::to_string(out.hermiticity_defect) + ")");
  const Eigen::MatrixXcd hm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm, Eigen::EigenvaluesOnly);
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return out;
}

struct Cluster {
  double lambda_mean = 0.0;
  int multiplicity = 0;
  bool simple_over_quaternions() const { return multiplicity == 2; }
};

/// Consecutive eigenvalues closer than gap_tol * max(1, |lambda|) share a cluster.
inline std::vector<Cluster> cluster_multiplicities(const std::vector<double>& sorted_values, double gap_tol) {
  std::vector<Cluster> out;
  for (const auto& l : group_levels(sorted_values, gap_tol)) out.push_back({l.lambda, l.multiplicity});
  return out;
}

inline std::vector<Cluster> cluster_multiplicities(const std::vector<EigenPair>& pairs, double gap_tol) {
  std::vector<double> v;
  v.reserve(pairs.size());
  for (const auto& p : pairs) v.push_back(p.lambda);
  return cluster_multiplicities(v, gap_tol);
}

}  // namespace spinframe
