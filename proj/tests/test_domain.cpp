// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>
#include <set>

#include "spinframe/domain.hpp"

namespace sf = spinframe;
using sf::Cplx;

namespace {

constexpr Cplx I{0.0, 1.0};

sf::SpinorField plane_wave(const sf::Grid& g, const std::array<int, 3>& k, const sf::Spinor& s) {
  sf::SpinorField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto t = g.fractional(i);
    f.set(i, std::polar(1.0, sf::kTwoPi * (k[0] * t[0] + k[1] * t[1] + k[2] * t[2])) * s);
  }
  return f;
}

}  // namespace

TEST(Lattice, DualPairsToIdentity) {
  Eigen::Matrix3d b;
  b << 1.0, 0.3, -0.2, 0.0, 1.2, 0.4, 0.1, 0.0, 0.9;
  const sf::Lattice l(b);
  EXPECT_NEAR((l.dual().transpose() * l.basis() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  EXPECT_NEAR(l.volume(), b.determinant(), 1e-15);
  EXPECT_FALSE(l.is_diagonal());
  EXPECT_TRUE(sf::Lattice::diagonal(1, 1, 2).is_diagonal());
}

TEST(Lattice, RejectsDegenerateOrReflected) {
  EXPECT_THROW(sf::Lattice(Eigen::Matrix3d::Zero()), std::invalid_argument);
  EXPECT_THROW(sf::Lattice(Eigen::Vector3d(1, 1, -1).asDiagonal()), std::invalid_argument);
}

TEST(SpinStructure, EightDistinctValues) {
  const auto all = sf::SpinStructure::all();
  std::set<std::array<int, 3>> seen;
  for (const auto& s : all) seen.insert(s.flags());
  EXPECT_EQ(seen.size(), 8u);
  EXPECT_THROW(sf::SpinStructure({2, 0, 0}), std::invalid_argument);
  EXPECT_DOUBLE_EQ(sf::SpinStructure({1, 0, 1}).shift(2), 0.5);
}

TEST(Grid, Validation) {
  EXPECT_THROW(sf::Grid({5, 4, 4}), std::invalid_argument);
  EXPECT_THROW(sf::Grid({2, 4, 4}), std::invalid_argument);
  try {
    sf::Grid({4, 7, 4});
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "grid dimensions must be even");
  }
  EXPECT_NO_THROW(sf::Grid({4, 6, 8}));
}

TEST(Grid, IndexingIsXFastestAndBijective) {
  const sf::Grid g({4, 6, 8});
  EXPECT_EQ(g.index(1, 0, 0), 1u);
  EXPECT_EQ(g.index(0, 1, 0), 4u);
  EXPECT_EQ(g.index(0, 0, 1), 24u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto m = g.multi_index(i);
    EXPECT_EQ(g.index(m[0], m[1], m[2]), i);
  }
  EXPECT_EQ(g.frequency(0, 2), -2);
  EXPECT_EQ(g.frequency(0, 1), 1);
  EXPECT_TRUE(g.is_nyquist(0, -2));
}

TEST(MomentumSet, Examples) {
  const sf::Grid g = sf::Grid::cube(4);
  const auto cubic = sf::momentum_set(sf::Lattice::cubic(), sf::SpinStructure({0, 0, 0}), g);
  EXPECT_EQ(cubic[g.index(0, 0, 0)], (sf::Vec3{0, 0, 0}));
  const auto shifted = sf::momentum_set(sf::Lattice::cubic(), sf::SpinStructure({1, 0, 0}), g);
  EXPECT_EQ(shifted[g.index(0, 0, 0)], (sf::Vec3{0.5, 0, 0}));
  const auto stretched = sf::momentum_set(sf::Lattice::diagonal(1, 1, 2), sf::SpinStructure({0, 0, 0}), g);
  EXPECT_EQ(stretched[g.index(0, 0, 1)], (sf::Vec3{0, 0, 0.5}));
}

TEST(MomentumSet, BijectiveAndHalfShifted) {
  Eigen::Matrix3d b;
  b << 1.0, 0.2, 0.0, 0.0, 1.1, 0.3, 0.0, 0.0, 0.8;
  const sf::Lattice l(b);
  const sf::Grid g({4, 6, 4});
  for (int a = 0; a < 3; ++a) {
    std::array<int, 3> eps{0, 0, 0};
    eps[a] = 1;
    const auto p = sf::momentum_set(l, sf::SpinStructure({0, 0, 0}), g);
    const auto q = sf::momentum_set(l, sf::SpinStructure(eps), g);
    std::set<std::tuple<double, double, double>> distinct;
    for (std::size_t i = 0; i < g.size(); ++i) {
      distinct.insert({p[i].c1, p[i].c2, p[i].c3});
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(q[i][c] - p[i][c], 0.5 * l.dual()(c, a), 1e-14);
    }
    EXPECT_EQ(distinct.size(), g.size());
  }
}

TEST(WeightedInner, Examples) {
  const sf::Grid g = sf::Grid::cube(8);
  const sf::Lattice l = sf::Lattice::cubic();
  const auto one = sf::SpinorField::constant(g, {1.0, 0.0});
  const auto w1 = sf::VolumeWeight::uniform(g);
  EXPECT_NEAR(std::abs(sf::weighted_inner(one, one, w1, l) - 1.0), 0.0, 1e-14);

  const auto wave = plane_wave(g, {1, 0, 0}, {1.0, 0.0});
  EXPECT_NEAR(std::abs(sf::weighted_inner(wave, one, w1, l)), 0.0, 1e-14);

  const sf::ConformalFactor w(2.0, {{{1, 0, 0}, 1.0, 0.0}});
  EXPECT_NEAR(std::abs(sf::weighted_inner(one, one, sf::VolumeWeight(w.samples(g)), l) - 2.0), 0.0, 1e-14);
}

TEST(WeightedInner, ConjugateSymmetricAndPositive) {
  const sf::Grid g({4, 6, 4});
  const sf::Lattice l = sf::Lattice::diagonal(1, 2, 1.5);
  std::mt19937_64 rng(1);
  const auto a = sf::random_spinor_field(g, rng);
  const auto b = sf::random_spinor_field(g, rng);
  const sf::VolumeWeight w = sf::VolumeWeight::of_metric(sf::ConformalFactor(1.2, {{{0, 1, 0}, 0.3, 0.4}}), g);
  EXPECT_NEAR(std::abs(sf::weighted_inner(a, b, w, l) - std::conj(sf::weighted_inner(b, a, w, l))), 0.0, 1e-12);
  EXPECT_GT(sf::weighted_inner(a, a, w, l).real(), 0.0);
  EXPECT_NEAR(sf::weighted_inner(a, a, w, l).imag(), 0.0, 1e-12);
}

TEST(WeightedInner, ExactQuadratureOfBandlimitedPairs) {
  // int_{T^3} conj(e^{2 pi i k.t}) e^{2 pi i k'.t} |(1,i)|^2 = 2 vol delta_kk'
  const sf::Grid g = sf::Grid::cube(8);
  const sf::Lattice l = sf::Lattice::diagonal(1, 1, 2);
  const auto w = sf::VolumeWeight::uniform(g);
  const std::vector<std::array<int, 3>> ks{{1, 0, 0}, {-2, 1, 3}, {0, 3, -1}, {1, 0, 0}};
  for (const auto& k : ks)
    for (const auto& kp : ks) {
      const auto a = plane_wave(g, k, {1.0, I});
      const auto b = plane_wave(g, kp, {1.0, I});
      const double expected = k == kp ? 2.0 * l.volume() : 0.0;
      EXPECT_NEAR(std::abs(sf::weighted_inner(a, b, w, l) - expected), 0.0, 1e-13);
    }
  // int cos^2(2 pi x) dx = 1/2 on the unit cube.
  sf::SpinorField c(g);
  for (std::size_t i = 0; i < g.size(); ++i) c.set(i, {std::cos(sf::kTwoPi * g.fractional(i)[0]), 0.0});
  EXPECT_NEAR(sf::norm(c, sf::Lattice::cubic()), std::sqrt(0.5), 1e-14);
}

TEST(WeightedInner, GridMismatch) {
  const auto a = sf::SpinorField::constant(sf::Grid::cube(4), {1.0, 0.0});
  const auto b = sf::SpinorField::constant(sf::Grid::cube(6), {1.0, 0.0});
  EXPECT_THROW(sf::weighted_inner(a, b, sf::VolumeWeight::uniform(sf::Grid::cube(4)), sf::Lattice::cubic()), sf::GridMismatch);
  EXPECT_THROW(sf::weighted_inner(a, a, sf::VolumeWeight::uniform(sf::Grid::cube(6)), sf::Lattice::cubic()), sf::GridMismatch);
}

TEST(ConformalFactor, RejectsNonPositive) {
  EXPECT_THROW(sf::ConformalFactor(0.3, {{{1, 0, 0}, 0.4, 0.0}}), std::invalid_argument);
  EXPECT_THROW(sf::ConformalFactor(-1.0, {}), std::invalid_argument);
  EXPECT_THROW(sf::ConformalFactor(0.4, {{{1, 0, 0}, 0.2, 0.0}, {{0, 1, 0}, 0.2, 0.0}}), std::invalid_argument);
  EXPECT_NO_THROW(sf::ConformalFactor(1.5, {{{1, 0, 0}, 0.4, 0.0}}));
}

TEST(ConformalFactor, BandlimitAndSamples) {
  const sf::ConformalFactor h(1.5, {{{2, 0, 0}, 0.4, 0.0}});
  EXPECT_FALSE(h.admissible_on(sf::Grid::cube(8)));
  EXPECT_THROW(h.samples(sf::Grid::cube(8)), std::invalid_argument);
  EXPECT_TRUE(h.admissible_on(sf::Grid({12, 4, 4})));
  const sf::Grid g = sf::Grid::cube(16);
  const auto s = h.samples(g);
  EXPECT_NEAR(s[g.index(0, 0, 0)], 1.9, 1e-15);
  EXPECT_NEAR(s[g.index(4, 0, 0)], 1.1, 1e-15);
}

TEST(ConformalFactor, ProductMatchesPointwise) {
  const sf::ConformalFactor a(1.5, {{{1, 0, 0}, 0.4, 0.3}, {{0, 1, -1}, 0.2, 0.0}});
  const sf::ConformalFactor b(1.2, {{{1, 0, 0}, 0.25, -0.7}, {{0, 0, 1}, 0.1, 1.1}});
  const auto p = a * b;
  const sf::Grid g = sf::Grid::cube(16);
  const auto sa = a.samples(g), sb = b.samples(g), sp = p.samples(g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(sp[i], sa[i] * sb[i], 1e-14);
}

TEST(VolumeWeight, UniformWhenFlat) {
  const sf::Grid g = sf::Grid::cube(4);
  const auto w = sf::VolumeWeight::of_metric(std::optional<sf::ConformalFactor>{}, g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(w[i], 1.0);
  EXPECT_THROW(sf::VolumeWeight(sf::ScalarField(g, 0.0)), std::invalid_argument);
}

TEST(SpinorField, SectionAndJOnRepresentatives) {
  // apply_j twice is -1 on representatives for every spin structure.
  const sf::Grid g({4, 6, 4});
  std::mt19937_64 rng(2);
  const auto u = sf::random_spinor_field(g, rng);
  for (const auto& spin : sf::SpinStructure::all()) {
    const auto jj = sf::apply_j(sf::apply_j(u, spin), spin);
    for (std::size_t i = 0; i < u.values().size(); ++i) EXPECT_NEAR(std::abs(jj.values()[i] + u.values()[i]), 0.0, 1e-14);
    // The section of j(u) is j of the section.
    const auto lhs = sf::section_values(sf::apply_j(u, spin), spin);
    const auto rhs = sf::section_values(u, spin);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const sf::Spinor e = sf::apply_j(rhs[i]);
      EXPECT_NEAR(std::abs(lhs[i].alpha - e.alpha) + std::abs(lhs[i].beta - e.beta), 0.0, 1e-14);
    }
  }
}

TEST(SpinorField, RandomFieldStatistics) {
  const sf::Grid g = sf::Grid::cube(16);
  std::mt19937_64 rng(4);
  const auto f = sf::random_spinor_field(g, rng);
  double s = 0.0;
  for (const auto& z : f.values()) s += std::norm(z);
  EXPECT_NEAR(s / static_cast<double>(f.values().size()), 1.0, 0.02);
  EXPECT_TRUE(f.all_finite());
}
