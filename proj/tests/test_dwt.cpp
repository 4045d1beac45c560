#include <cmath>
#include <set>
#include <tuple>

#include <gtest/gtest.h>

#include "wavegroup/dwt.hpp"
#include "wavegroup/random.hpp"

namespace wavegroup {
namespace {

Tensor random_signal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return Tensor::signal(rng.normal_vector(static_cast<Eigen::Index>(n)));
}

Tensor random_image(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  return Tensor::image(r, c, rng.normal_vector(static_cast<Eigen::Index>(r * c)));
}

TEST(Dwt, ConstantSignalHasOnlyScaling) {
  const auto theta = forward(Tensor::signal(Vec::Constant(4, 2.0)), 2);
  EXPECT_NEAR(theta.data[0], 4.0, 1e-14);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(theta.data[i], 0.0, 1e-14);
}

TEST(Dwt, OrthonormalHaarPair) {
  Vec x(2);
  x << 1.0, -1.0;
  const auto theta = forward(Tensor::signal(x), 1);
  EXPECT_NEAR(theta.data[0], 0.0, 1e-15);
  EXPECT_NEAR(theta.data[1], std::sqrt(2.0), 1e-15);
}

TEST(Dwt, ParsevalOnLongSignal) {
  const Tensor x = random_signal(1024, 11);
  const auto theta = forward(x, 10);
  EXPECT_LT(std::abs(theta.data.norm() - x.data.norm()), 1e-10 * x.data.norm());
}

TEST(Dwt, InverseRecoversShortSignal) {
  Vec x(4);
  x << 3, 1, 4, 1;
  const Tensor back = inverse(forward(Tensor::signal(x), 2));
  EXPECT_LT((back.data - x).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Dwt, ZeroCoefficientsGiveZeroSignal) {
  const CoeffVector z{Vec::Zero(16), CoeffLayout({16}, 3)};
  EXPECT_EQ(inverse(z).data.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dwt, EveryAtomHasUnitNorm) {
  for (const CoeffLayout& layout : {CoeffLayout({32}, 5), CoeffLayout({8, 8}, 3), CoeffLayout({4, 16}, 2)}) {
    for (std::size_t k = 0; k < layout.size(); ++k) {
      EXPECT_NEAR(haar_atom(layout, k).data.norm(), 1.0, 1e-12) << "atom " << k;
    }
  }
}

TEST(Dwt, ConstantImage) {
  const double c = 1.7;
  const auto theta = forward2d(Tensor::image(4, 4, Vec::Constant(16, c)), 2);
  EXPECT_NEAR(theta.data[0], 4.0 * c, 1e-13);
  for (int i = 1; i < 16; ++i) EXPECT_NEAR(theta.data[i], 0.0, 1e-13);
}

TEST(Dwt, ImageAtomMapsToUnitVector) {
  const CoeffLayout layout({8, 8}, 3);
  for (std::size_t k : {0u, 5u, 17u, 63u}) {
    const Tensor atom = haar_atom(layout, k);
    const auto theta = forward2d(atom, 3);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(theta.data[static_cast<Eigen::Index>(i)], i == k ? 1.0 : 0.0, 1e-13);
  }
}

TEST(Dwt, ImageRoundTrip64) {
  const Tensor x = random_image(64, 64, 3);
  const Tensor back = inverse2d(forward2d(x, 6));
  EXPECT_LT((back.data - x.data).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dwt, PropertiesOnRandomInputs) {
  Rng pick(99);
  for (int trial = 0; trial < 30; ++trial) {
    const bool image = trial % 2 == 1;
    const std::size_t n = std::size_t{1} << (1 + pick.below(image ? 6 : 10));
    const Tensor x = image ? random_image(n, n, 100 + trial) : random_signal(n, 100 + trial);
    const Tensor z = image ? random_image(n, n, 500 + trial) : random_signal(n, 500 + trial);
    const int levels = static_cast<int>(pick.below(static_cast<std::uint64_t>(max_levels(x.shape)) + 1));
    const auto tx = forward(x, levels);
    const auto tz = forward(z, levels);
    // perfect reconstruction and Parseval
    EXPECT_LT((inverse(tx).data - x.data).cwiseAbs().maxCoeff(), 1e-10 * x.data.cwiseAbs().maxCoeff());
    EXPECT_LT(std::abs(tx.data.norm() - x.data.norm()), 1e-10 * x.data.norm());
    // linearity
    Tensor combo = x;
    combo.data = 2.5 * x.data - 0.75 * z.data;
    EXPECT_LT((forward(combo, levels).data - (2.5 * tx.data - 0.75 * tz.data)).cwiseAbs().maxCoeff(), 1e-10);
    // forward is the adjoint of inverse
    const CoeffVector theta{z.data, tx.layout};
    EXPECT_NEAR(tx.data.dot(theta.data), x.data.dot(inverse(theta).data), 1e-10 * x.data.norm() * z.data.norm());
  }
}

TEST(Dwt, DetailCountFormula) {
  for (std::size_t n : {4u, 16u, 64u}) {
    for (int j = 1; j <= max_levels({n, n}); ++j) {
      const CoeffLayout layout({n, n}, j);
      std::size_t counted = 0;
      for (const Subband& b : layout.detail_subbands()) counted += b.size();
      const std::size_t coarse = n >> j;
      // subband sizes summed level by level
      std::size_t expected = 0;
      for (int l = 1; l <= j; ++l) expected += 3 * (n >> l) * (n >> l);
      EXPECT_EQ(counted, expected);
      EXPECT_EQ(layout.detail_count(), n * n - coarse * coarse);
    }
  }
}

TEST(Dwt, FlatIndexIsBijection) {
  for (const CoeffLayout& layout : {CoeffLayout({64}, 6), CoeffLayout({16, 16}, 4), CoeffLayout({8, 32}, 2)}) {
    std::set<std::tuple<int, int, std::size_t, std::size_t>> seen;
    for (std::size_t k = 0; k < layout.size(); ++k) {
      const CoeffPosition p = layout.locate(k);
      EXPECT_EQ(layout.index(p), k);
      seen.insert({p.level, static_cast<int>(p.orientation), p.row, p.col});
    }
    EXPECT_EQ(seen.size(), layout.size());
  }
}

TEST(Dwt, RejectsBadShapes) {
  EXPECT_THROW(forward(Tensor::signal(Vec::Zero(6)), 1), dimension_error);
  EXPECT_THROW(forward(Tensor::signal(Vec::Zero(8)), 4), dimension_error);
  EXPECT_THROW(forward(Tensor::image(4, 8, Vec::Zero(32)), 3), dimension_error);
  EXPECT_THROW(inverse(CoeffVector{Vec::Zero(7), CoeffLayout({8}, 2)}), layout_error);
}

TEST(Dwt, FullDepthIsDefault) {
  const auto theta = forward(Tensor::image(8, 16, Vec::Zero(128)));
  EXPECT_EQ(theta.layout.levels(), 3);
}

}  // namespace
}  // namespace wavegroup
