// SPDX-License-Identifier: Apache-2.0
#pragma once

// Eigenpairs of smallest |lambda| for the (symmetrized) Dirac operator S.
//
// Stage 1: preconditioned block LOBPCG on the positive semidefinite S^2, with
// the trial basis [X, W, P] fully reorthonormalized every iteration.
// Stage 2: Rayleigh-Ritz for S itself on span{V, S V}, V the converged S^2
// block extended to whole S^2 clusters. That span is S-invariant whenever V
// spans S^2 eigenspaces, which splits the +-sqrt(mu) branches even when they
// are nearly degenerate or a cluster is cut by `count`.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinframe/dirac.hpp"

namespace spinframe {

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> achieved, int iterations)
      : std::runtime_error(what), achieved_(std::move(achieved)), iterations_(iterations) {}
  const std::vector<double>& achieved_residuals() const { return achieved_; }
  int iterations() const { return iterations_; }

 private:
  std::vector<double> achieved_;
  int iterations_;
};

struct SolverOptions {
  int count = 1;
  double tol = 1e-8;
  int max_iter = 1000;
  std::uint64_t seed = 0;
  int padding = 4;
};

struct SolverStats {
  int iterations = 0;
  int restarts = 0;  // times stage 2 asked stage 1 for a tighter S^2 tolerance
};

namespace detail {

using Block = Eigen::MatrixXcd;

template <class Apply>
Block apply_block(const Apply& apply, const Block& in) {
  Block out(in.rows(), in.cols());
  for (Eigen::Index c = 0; c < in.cols(); ++c)
    apply(std::span<const Cplx>(in.col(c).data(), static_cast<std::size_t>(in.rows())),
          std::span<Cplx>(out.col(c).data(), static_cast<std::size_t>(in.rows())));
  return out;
}

/// Orthonormalizes the columns of `v` against the orthonormal `q` and each
/// other (two Gram-Schmidt passes). Columns whose remainder falls below
/// drop * (original norm) are discarded.
inline Block orthonormalize(Block v, const Block& q, double drop) {
  std::vector<Eigen::Index> kept;
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    const double original = v.col(c).norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (q.cols() > 0) v.col(c) -= q * (q.adjoint() * v.col(c));
      for (Eigen::Index p : kept) v.col(c) -= v.col(p) * v.col(p).dot(v.col(c));
    }
    const double rest = v.col(c).norm();
    if (rest <= drop * original) continue;
    v.col(c) /= rest;
    kept.push_back(c);
  }
  Block out(v.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = v.col(kept[i]);
  return out;
}

struct RitzResult {
  Eigen::VectorXd values;
  Block vectors;
};

inline RitzResult hermitian_eigen(const Block& g) {
  const Block h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Block> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

struct Stage2Result {
  bool ok = false;
  std::vector<double> lambda;
  Block vectors;  // unit Euclidean columns
  std::vector<double> residuals;
};

template <class ApplyS>
Stage2Result split_branches(const ApplyS& apply_s, const Block& v, double mu_max, int count, double tol) {
  const Block sv = apply_block(apply_s, v);
  const Block y = orthonormalize(sv, v, 1e-13);
  Block q(v.rows(), v.cols() + y.cols());
  q << v, y;
  Block sq(v.rows(), q.cols());
  sq << sv, apply_block(apply_s, y);
  const auto rr = hermitian_eigen(q.adjoint() * sq);

  struct Candidate {
    double lambda;
    double residual;
    Eigen::Index column;
  };
  std::vector<Candidate> good;
  for (Eigen::Index c = 0; c < rr.values.size(); ++c) {
    const double lam = rr.values[c];
    if (lam * lam > mu_max * (1.0 + 1e-6) + tol) continue;
    const Eigen::VectorXcd x = q * rr.vectors.col(c);
    const double res = (sq * rr.vectors.col(c) - lam * x).norm() / x.norm();
    if (res <= tol) good.push_back({lam, res, c});
  }
  Stage2Result out;
  if (static_cast<int>(good.size()) < count) return out;
  std::stable_sort(good.begin(), good.end(), [](const Candidate& a, const Candidate& b) { return std::abs(a.lambda) < std::abs(b.lambda); });
  good.resize(static_cast<std::size_t>(count));
  std::stable_sort(good.begin(), good.end(), [](const Candidate& a, const Candidate& b) { return a.lambda < b.lambda; });
  out.ok = true;
  out.vectors.resize(v.rows(), count);
  for (int i = 0; i < count; ++i) {
    out.lambda.push_back(good[i].lambda);
    out.residuals.push_back(good[i].residual);
    Eigen::VectorXcd x = q * rr.vectors.col(good[i].column);
    out.vectors.col(i) = x / x.norm();
  }
  return out;
}

/// Flat metric: replaces each Ritz vector by its exact spectral projection
/// onto the eigenspace of its Ritz value, re-orthonormalized per cluster.
/// Clusters that lose rank under projection are left untouched.
inline void polish_flat(const DiracOperator& op, Block& vectors, const std::vector<double>& lambda) {
  std::size_t start = 0;
  while (start < lambda.size()) {
    const double tol = 1e-6 * std::max(1.0, std::abs(lambda[start]));
    std::size_t end = start + 1;
    while (end < lambda.size() && std::abs(lambda[end] - lambda[start]) <= tol) ++end;
    const auto len = static_cast<Eigen::Index>(end - start);
    Block g = vectors.middleCols(static_cast<Eigen::Index>(start), len);
    for (Eigen::Index c = 0; c < len; ++c)
      op.project_flat_eigenspace(std::span<Cplx>(g.col(c).data(), static_cast<std::size_t>(g.rows())), lambda[start], tol);
    g = orthonormalize(g, Block(g.rows(), 0), 1e-6);
    if (g.cols() == len) vectors.middleCols(static_cast<Eigen::Index>(start), len) = g;
    start = end;
  }
}

}  // namespace detail

/// The `count` eigenpairs of smallest |lambda|, sorted ascending by lambda.
/// Fields are eigenspinors of the physical operator (h^{-3/2} theta in the
/// conformal case) normalized in the h^3-weighted L2 norm. Flat eigenspinors
/// are projected onto the exact eigenspace, so their residuals are roundoff.
inline std::vector<EigenPair> eigensolve(const OperatorSpec& spec, const SolverOptions& opt, SolverStats* stats = nullptr) {
  using detail::Block;
  if (opt.count < 1) throw std::invalid_argument("eigensolve: count must be at least 1");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("eigensolve: tol must be positive");
  const DiracOperator op(spec);
  const auto n = static_cast<Eigen::Index>(op.dimension());
  if (opt.count > n) throw std::invalid_argument("eigensolve: count exceeds the grid dimension");
  const Eigen::Index m = std::min<Eigen::Index>(opt.count + opt.padding, n);
  constexpr double kS2ClusterGap = 1e-4;

  auto apply_a = [&](std::span<const Cplx> in, std::span<Cplx> out) { op.apply_squared(in, out); };
  auto apply_s = [&](std::span<const Cplx> in, std::span<Cplx> out) { op.apply_symmetrized(in, out); };
  auto apply_t = [&](std::span<const Cplx> in, std::span<Cplx> out) { op.precondition(in, out); };

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Block x(n, m);
  for (Eigen::Index c = 0; c < m; ++c)
    for (Eigen::Index r = 0; r < n; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      x(r, c) = Cplx(re, im);
    }
  x = detail::orthonormalize(x, Block(n, 0), 1e-10);
  if (x.cols() < m) throw std::runtime_error("eigensolve: degenerate random start block");

  Block ax = detail::apply_block(apply_a, x);
  {
    const auto rr = detail::hermitian_eigen(x.adjoint() * ax);
    x = x * rr.vectors;
    ax = ax * rr.vectors;
  }
  Eigen::VectorXd mu = (x.adjoint() * ax).real().diagonal();
  Block p(n, 0);

  double s2_tol = 0.1 * opt.tol;
  const double s2_floor = 1e-15;
  SolverStats local;
  std::vector<double> last_residuals(static_cast<std::size_t>(opt.count), std::numeric_limits<double>::infinity());

  for (int it = 0; it < opt.max_iter; ++it) {
    local.iterations = it + 1;
    if (it > 0 && it % 25 == 0) ax = detail::apply_block(apply_a, x);
    Block r = ax - x * mu.asDiagonal();
    // A cluster of S^2 cut by `count` is kept whole: near-degenerate +-lambda
    // branches are only separable from the complete invariant subspace.
    Eigen::Index head = opt.count;
    while (head < m && mu[head] - mu[head - 1] <= kS2ClusterGap * std::max(1.0, std::abs(mu[head - 1]))) ++head;
    std::vector<Eigen::Index> active;
    bool head_converged = true;
    for (Eigen::Index c = 0; c < m; ++c) {
      const double res = r.col(c).norm();
      const double bound = s2_tol * std::max(1.0, std::sqrt(std::max(0.0, mu[c])));
      if (c < opt.count) last_residuals[static_cast<std::size_t>(c)] = res;
      if (c < head) head_converged = head_converged && res <= bound;
      if (res > bound) active.push_back(c);
    }

    if (head_converged) {
      const Block v = x.leftCols(head);
      const double mu_max = mu.head(head).maxCoeff();
      auto split = detail::split_branches(apply_s, v, std::max(mu_max, 0.0), opt.count, opt.tol);
      if (split.ok) {
        if (spec.flat()) detail::polish_flat(op, split.vectors, split.lambda);
        const VolumeWeight w = spec.weight();
        const double scale = std::sqrt(static_cast<double>(spec.grid.size()) / spec.lattice.volume());
        std::vector<EigenPair> out;
        bool all_ok = true;
        for (int i = 0; i < opt.count; ++i) {
          SpinorField theta(spec.grid, std::vector<Cplx>(split.vectors.col(i).data(), split.vectors.col(i).data() + n));
          theta *= scale;
          SpinorField phi = spec.flat() ? theta : desymmetrize(theta, spec);
          const double lam = split.lambda[static_cast<std::size_t>(i)];
          SpinorField resid = conformal_dirac_apply_physical(phi, spec);
          resid -= Cplx(lam) * phi;
          const double res = weighted_norm(resid, w, spec.lattice) / weighted_norm(phi, w, spec.lattice);
          all_ok = all_ok && res <= opt.tol;
          out.push_back({lam, std::move(phi), res, 0});
        }
        if (all_ok) {
          const auto clusters = cluster_multiplicities(out, 1e-6);
          std::size_t idx = 0;
          for (std::size_t c = 0; c < clusters.size(); ++c)
            for (int k = 0; k < clusters[c].multiplicity; ++k) out[idx++].cluster_id = static_cast<int>(c);
          if (stats) *stats = local;
          return out;
        }
      }
      if (s2_tol <= s2_floor) break;
      s2_tol = std::max(s2_floor, 0.01 * s2_tol);
      ++local.restarts;
      continue;
    }

    Block w(n, static_cast<Eigen::Index>(active.size()));
    for (std::size_t i = 0; i < active.size(); ++i) w.col(static_cast<Eigen::Index>(i)) = r.col(active[i]);
    w = detail::apply_block(apply_t, w);
    Block wp(n, w.cols() + p.cols());
    wp << w, p;
    const Block y = detail::orthonormalize(wp, x, 1e-10);
    if (y.cols() == 0) break;
    const Block ay = detail::apply_block(apply_a, y);

    Block z(n, m + y.cols()), az(n, m + y.cols());
    z << x, y;
    az << ax, ay;
    const auto rr = detail::hermitian_eigen(z.adjoint() * az);
    const Block c = rr.vectors.leftCols(m);
    x = z * c;
    ax = az * c;
    p = y * c.bottomRows(y.cols());
    mu = rr.values.head(m);
  }
  if (stats) *stats = local;
  throw ConvergenceError("eigensolve: no convergence within " + std::to_string(opt.max_iter) + " iterations", last_residuals,
                         local.iterations);
}

inline std::vector<EigenPair> eigensolve(const OperatorSpec& spec, int count, double tol, std::uint64_t seed, int max_iter = 1000) {
  SolverOptions opt;
  opt.count = count;
  opt.tol = tol;
  opt.seed = seed;
  opt.max_iter = max_iter;
  return eigensolve(spec, opt);
}

}  // namespace spinframe
