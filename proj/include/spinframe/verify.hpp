// SPDX-License-Identifier: Apache-2.0
#pragma once

// Numerical certificates for framings and for the spectral structure of D.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "spinframe/dirac.hpp"
#include "spinframe/eigensolver.hpp"
#include "spinframe/fft.hpp"
#include "spinframe/framing.hpp"

namespace spinframe {

/// w^{-1} sum_a d_a (w X^a) with spectral derivatives in physical coordinates.
/// Odd derivatives vanish on Nyquist slots.
inline ScalarField divergence(const VectorField& x, const VolumeWeight& w, const Lattice& lattice) {
  const Grid& g = x.grid;
  require_same_grid(g, w.grid(), "divergence");
  std::vector<Cplx> buf(3 * g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int a = 0; a < 3; ++a) buf[3 * i + a] = w[i] * x[i][a];
  fft_forward(buf, g, 3);
  std::vector<Cplx> out(g.size());
  constexpr Cplx I{0.0, 1.0};
  for (std::size_t s = 0; s < g.size(); ++s) {
    auto k = g.frequencies(s);
    for (int a = 0; a < 3; ++a)
      if (g.is_nyquist(a, k[a])) k[a] = 0;
    const Vec3 xi = lattice.physical_momentum({double(k[0]), double(k[1]), double(k[2])});
    out[s] = kTwoPi * I * (xi.c1 * buf[3 * s] + xi.c2 * buf[3 * s + 1] + xi.c3 * buf[3 * s + 2]);
  }
  fft_inverse(out, g, 1);
  ScalarField div(g);
  for (std::size_t i = 0; i < g.size(); ++i) div[i] = out[i].real() / w[i];
  return div;
}

struct FramingThresholds {
  double max_divergence = 1e-10;
  double orthogonality = 1e-12;
  double length_spread = 1e-12;
};

inline FramingThresholds flat_thresholds() { return {}; }
inline FramingThresholds conformal_thresholds() { return {1e-6, 1e-8, 1e-8}; }

struct FramingReport {
  double max_divergence = 0.0;           // absolute, over the three fields
  double max_divergence_relative = 0.0;  // divided by the largest Euclidean |X_a|
  double orthogonality_defect = 0.0;     // max |g(X_a, X_b)|, a != b, over max g-length^2
  double length_spread = 0.0;            // max per-node spread of g-lengths over max g-length
  double min_length = 0.0;
  double max_length = 0.0;
  bool degenerate = true;

  bool passes(const FramingThresholds& t) const {
    return max_divergence <= t.max_divergence && orthogonality_defect <= t.orthogonality && length_spread <= t.length_spread;
  }
};

inline FramingReport framing_report(const Framing& fr, const Lattice& lattice) {
  const Grid& g = fr.grid();
  const VolumeWeight w = VolumeWeight::of_metric(fr.metric_h, g);
  const ScalarField h = fr.metric_h ? fr.metric_h->samples(g) : ScalarField(g, 1.0);
  FramingReport rep;
  double max_euclid = 0.0;
  for (int a = 0; a < 3; ++a) {
    rep.max_divergence = std::max(rep.max_divergence, divergence(fr.field(a), w, lattice).max_abs());
    max_euclid = std::max(max_euclid, fr.field(a).max_norm());
  }
  const auto len = metric_lengths(fr);
  double max_dot = 0.0, max_spread = 0.0, mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double h2 = h[i] * h[i];
    max_dot = std::max({max_dot, std::abs(h2 * dot(fr.x1[i], fr.x2[i])), std::abs(h2 * dot(fr.x1[i], fr.x3[i])),
                        std::abs(h2 * dot(fr.x2[i], fr.x3[i]))});
    const double lo = std::min({len[0][i], len[1][i], len[2][i]});
    const double hi = std::max({len[0][i], len[1][i], len[2][i]});
    max_spread = std::max(max_spread, hi - lo);
    mn = std::min(mn, lo);
    mx = std::max(mx, hi);
  }
  rep.min_length = mn;
  rep.max_length = mx;
  if (mx > 0.0) {
    rep.orthogonality_defect = max_dot / (mx * mx);
    rep.length_spread = max_spread / mx;
  }
  if (max_euclid > 0.0) rep.max_divergence_relative = rep.max_divergence / max_euclid;
  rep.degenerate = fr.degenerate;
  return rep;
}

/// max over random fields of ||Op(f.j) - (Op f).j|| / ||f||, Op the symmetrized
/// operator of `spec` (the flat operator when no conformal factor is set).
inline double quaternionic_commutation_check(const OperatorSpec& spec, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("quaternionic_commutation_check: trials must be at least 1");
  const DiracOperator op(spec);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const SpinorField f = random_spinor_field(spec.grid, rng);
    SpinorField of(spec.grid), ojf(spec.grid);
    op.apply_symmetrized(f.values(), of.values());
    const SpinorField jf = apply_j(f, spec.spin);
    op.apply_symmetrized(jf.values(), ojf.values());
    const SpinorField diff = ojf - apply_j(of, spec.spin);
    worst = std::max(worst, norm(diff, spec.lattice) / norm(f, spec.lattice));
  }
  return worst;
}

/// max over random pairs of |<S f, g> - <f, S g>| / (||S f|| ||g||).
inline double symmetry_defect(const OperatorSpec& spec, int trials, std::uint64_t seed) {
  const DiracOperator op(spec);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const SpinorField f = random_spinor_field(spec.grid, rng);
    const SpinorField g = random_spinor_field(spec.grid, rng);
    SpinorField sf(spec.grid), sg(spec.grid);
    op.apply_symmetrized(f.values(), sf.values());
    op.apply_symmetrized(g.values(), sg.values());
    const Cplx lhs = inner(sf, g, spec.lattice);
    const Cplx rhs = inner(f, sg, spec.lattice);
    worst = std::max(worst, std::abs(lhs - rhs) / (norm(sf, spec.lattice) * norm(g, spec.lattice)));
  }
  return worst;
}

inline bool evenness_check(const std::vector<Cluster>& clusters) {
  return std::all_of(clusters.begin(), clusters.end(), [](const Cluster& c) { return c.multiplicity % 2 == 0; });
}

/// Drops clusters at the largest |lambda|: a count-limited solve may cut them.
inline std::vector<Cluster> complete_clusters(const std::vector<Cluster>& clusters, double gap_tol) {
  double top = 0.0;
  for (const auto& c : clusters) top = std::max(top, std::abs(c.lambda_mean));
  std::vector<Cluster> out;
  for (const auto& c : clusters)
    if (top - std::abs(c.lambda_mean) >= gap_tol * std::max(1.0, top)) out.push_back(c);
  return out;
}

struct KernelOptions {
  int count = 8;
  double solver_tol = 1e-8;
  std::uint64_t seed = 7;
  int max_iter = 1000;
};

/// Number of eigenvalues with |lambda| < tol among the `count` smallest.
inline int kernel_dimension(const OperatorSpec& spec, double tol, const KernelOptions& opt = {}) {
  if (!(tol > 0.0)) throw std::invalid_argument("kernel_dimension: tol must be positive");
  SolverOptions so;
  so.count = opt.count;
  so.tol = opt.solver_tol;
  so.seed = opt.seed;
  so.max_iter = opt.max_iter;
  const auto pairs = eigensolve(spec, so);
  return static_cast<int>(std::count_if(pairs.begin(), pairs.end(), [&](const EigenPair& p) { return std::abs(p.lambda) < tol; }));
}

/// Max elementwise deviation of two sorted spectra of equal length.
inline double spectrum_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// Sorted |lambda| of the lowest `count` oracle levels (ties broken arbitrarily).
inline std::vector<double> lowest_magnitudes(const std::vector<double>& values, std::size_t count) {
  std::vector<double> mags;
  for (double v : values) mags.push_back(std::abs(v));
  std::sort(mags.begin(), mags.end());
  if (mags.size() > count) mags.resize(count);
  return mags;
}

}  // namespace spinframe
