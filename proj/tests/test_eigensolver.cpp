// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "spinframe/eigensolver.hpp"

namespace sf = spinframe;
using sf::Cplx;

namespace {

const sf::ConformalFactor& default_h() {
  static const sf::ConformalFactor h(1.5, {{{1, 0, 0}, 0.4, 0.0}});
  return h;
}

std::vector<double> lambdas(const std::vector<sf::EigenPair>& pairs) {
  std::vector<double> out;
  for (const auto& p : pairs) out.push_back(p.lambda);
  return out;
}

}  // namespace

TEST(Eigensolve, FlatCubicFirstShell) {
  const sf::OperatorSpec spec(sf::Lattice::cubic(), sf::SpinStructure({0, 0, 0}), sf::Grid::cube(16));
  const auto pairs = sf::eigensolve(spec, 14, 1e-8, 1);
  ASSERT_EQ(pairs.size(), 14u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(pairs[i].lambda, -sf::kTwoPi, 1e-8);
  EXPECT_NEAR(pairs[6].lambda, 0.0, 1e-8);
  EXPECT_NEAR(pairs[7].lambda, 0.0, 1e-8);
  for (std::size_t i = 8; i < 14; ++i) EXPECT_NEAR(pairs[i].lambda, sf::kTwoPi, 1e-8);
  const auto clusters = sf::cluster_multiplicities(pairs, 1e-6);
  ASSERT_EQ(clusters.size(), 3u);
  EXPECT_EQ(clusters[0].multiplicity, 6);
  EXPECT_EQ(clusters[1].multiplicity, 2);
  EXPECT_EQ(pairs[0].cluster_id, 0);
  EXPECT_EQ(pairs[7].cluster_id, 1);
  EXPECT_EQ(pairs[13].cluster_id, 2);
}

TEST(Eigensolve, AntiperiodicOneAxis) {
  const sf::OperatorSpec spec(sf::Lattice::cubic(), sf::SpinStructure({1, 0, 0}), sf::Grid::cube(8));
  const auto pairs = sf::eigensolve(spec, 4, 1e-8, 2);
  ASSERT_EQ(pairs.size(), 4u);
  EXPECT_NEAR(pairs[0].lambda, -sf::kPi, 1e-8);
  EXPECT_NEAR(pairs[1].lambda, -sf::kPi, 1e-8);
  EXPECT_NEAR(pairs[2].lambda, sf::kPi, 1e-8);
  EXPECT_NEAR(pairs[3].lambda, sf::kPi, 1e-8);
}

TEST(Eigensolve, ConformalKernelHasTwoModes) {
  const sf::OperatorSpec spec(sf::Lattice::cubic(), sf::SpinStructure({0, 0, 0}), sf::Grid::cube(8), default_h());
  const auto pairs = sf::eigensolve(spec, 2, 1e-8, 3);
  ASSERT_EQ(pairs.size(), 2u);
  for (const auto& p : pairs) EXPECT_LE(std::abs(p.lambda), 1e-8);
}

TEST(Eigensolve, ResidualsAndWeightedNormalization) {
  const sf::OperatorSpec spec(sf::Lattice::diagonal(1, 1, 2), sf::SpinStructure({0, 1, 0}), sf::Grid({8, 8, 8}), default_h());
  const auto pairs = sf::eigensolve(spec, 6, 1e-8, 4);
  const auto w = spec.weight();
  for (const auto& p : pairs) {
    EXPECT_LE(p.residual, 1e-8);
    EXPECT_NEAR(sf::weighted_norm(p.field, w, spec.lattice), 1.0, 1e-10);
    auto r = sf::conformal_dirac_apply_physical(p.field, spec);
    r -= Cplx(p.lambda) * p.field;
    EXPECT_LE(sf::weighted_norm(r, w, spec.lattice), 1e-8);
  }
  for (std::size_t i = 1; i < pairs.size(); ++i) EXPECT_LE(pairs[i - 1].lambda, pairs[i].lambda);
}

TEST(Eigensolve, EigenvectorsAreWeightedOrthonormal) {
  const sf::OperatorSpec spec(sf::Lattice::cubic(), sf::SpinStructure({0, 0, 0}), sf::Grid::cube(8), default_h());
  const auto pairs = sf::eigensolve(spec, 8, 1e-8, 5);
  const auto w = spec.weight();
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const Cplx ip = sf::weighted_inner(pairs[i].field, pairs[j].field, w, spec.lattice);
      EXPECT_NEAR(std::abs(ip - (i == j ? 1.0 : 0.0)), 0.0, 1e-7);
    }
}

TEST(Eigensolve, MatchesDenseSpectrumOnSmallConformalGrid) {
  const sf::OperatorSpec spec(sf::Lattice::cubic(), sf::SpinStructure({1, 0, 0}), sf::Grid({8, 6, 4}), default_h());
  ASSERT_LE(spec.grid.size() * 2, 432u);
  const auto dense = sf::dense_spectrum(spec);
  const auto pairs = sf::eigensolve(spec, 10, 1e-8, 6);
  std::vector<double> got;
  for (const auto& p : pairs) got.push_back(std::abs(p.lambda));
  std::sort(got.begin(), got.end());
  std::vector<double> ref;
  for (double v : dense.eigenvalues) ref.push_back(std::abs(v));
  std::sort(ref.begin(), ref.end());
  ref.resize(10);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(got[i], ref[i], 1e-8);
}

TEST(Eigensolve, DeterministicForFixedSeed) {
  const sf::OperatorSpec spec(sf::Lattice::cubic(), sf::SpinStructure({0, 1, 1}), sf::Grid::cube(8));
  const auto a = sf::eigensolve(spec, 6, 1e-8, 11);
  const auto b = sf::eigensolve(spec, 6, 1e-8, 11);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].lambda, b[i].lambda);
    EXPECT_EQ(a[i].residual, b[i].residual);
    for (std::size_t c = 0; c < a[i].field.values().size(); ++c) EXPECT_EQ(a[i].field.values()[c], b[i].field.values()[c]);
  }
}

TEST(Eigensolve, CutClusterStillSplitsBranches) {
  // count = 9 cuts the +-2 pi shell of multiplicity 12 unevenly.
  const sf::OperatorSpec spec(sf::Lattice::cubic(), sf::SpinStructure({0, 0, 0}), sf::Grid::cube(8));
  const auto pairs = sf::eigensolve(spec, 9, 1e-8, 12);
  int zeros = 0;
  for (const auto& p : pairs) {
    const double a = std::abs(p.lambda);
    EXPECT_TRUE(a < 1e-8 || std::abs(a - sf::kTwoPi) < 1e-8) << p.lambda;
    zeros += a < 1e-8;
    EXPECT_LE(p.residual, 1e-8);
  }
  EXPECT_EQ(zeros, 2);
}

TEST(Eigensolve, Errors) {
  const sf::OperatorSpec spec(sf::Lattice::cubic(), sf::SpinStructure({0, 0, 0}), sf::Grid::cube(4));
  EXPECT_THROW(sf::eigensolve(spec, 0, 1e-8, 0), std::invalid_argument);
  EXPECT_THROW(sf::eigensolve(spec, 2, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(sf::eigensolve(spec, 129, 1e-8, 0), std::invalid_argument);
  const sf::OperatorSpec big(sf::Lattice::cubic(), sf::SpinStructure({0, 0, 0}), sf::Grid::cube(16));
  try {
    sf::eigensolve(big, 14, 1e-8, 0, 1);
    FAIL() << "expected ConvergenceError";
  } catch (const sf::ConvergenceError& e) {
    EXPECT_EQ(e.achieved_residuals().size(), 14u);
    EXPECT_EQ(e.iterations(), 1);
    for (double r : e.achieved_residuals()) EXPECT_TRUE(std::isfinite(r));
  }
}

TEST(Eigensolve, StatsReportIterations) {
  const sf::OperatorSpec spec(sf::Lattice::cubic(), sf::SpinStructure({1, 1, 1}), sf::Grid::cube(8));
  sf::SolverStats stats;
  sf::SolverOptions opt;
  opt.count = 8;
  const auto pairs = sf::eigensolve(spec, opt, &stats);
  EXPECT_GT(stats.iterations, 0);
  for (double l : lambdas(pairs)) EXPECT_NEAR(std::abs(l), sf::kPi * std::sqrt(3.0), 1e-8);
}
