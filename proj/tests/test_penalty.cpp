#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wavegroup/penalty.hpp"

namespace wavegroup {
namespace {

TEST(EvalL1, Basics) {
  Vec v(3);
  v << 1, -2, 3;
  EXPECT_EQ(eval_l1(v), 6.0);
  EXPECT_EQ(eval_l1(Vec::Zero(5)), 0.0);
  Rng rng(3);
  const Vec r = rng.normal_vector(1000);
  Vec p = r.reverse();
  std::swap(p[0], p[500]);
  EXPECT_EQ(eval_l1(r), eval_l1(p));  // bitwise
}

TEST(EvalGroup, Basics) {
  Vec v(4);
  v << 3, 4, 0, 0;
  EXPECT_DOUBLE_EQ(eval_group(v, IndexGroups{{0, 1}}), 5.0);
  Vec w(4);
  w << 3, 0, 0, 4;
  EXPECT_DOUBLE_EQ(eval_group(w, IndexGroups{{0, 1}, {2, 3}}), 7.0);
  EXPECT_DOUBLE_EQ(eval_group(v, IndexGroups{{0, 1, 2, 3}}), 5.0);
  Vec u(3);
  u << -1, 2.5, 0.5;
  EXPECT_DOUBLE_EQ(eval_group(u, IndexGroups{{0}, {1}, {2}}), eval_l1(u));
  EXPECT_THROW(eval_group(u, IndexGroups{{0, 3}}), index_error);
}

TEST(EvalGroup, PermutationCovariant) {
  Rng rng(17);
  const Vec v = rng.normal_vector(12);
  const IndexGroups groups{{0, 1, 2}, {2, 3}, {4, 5, 6, 7}, {7, 8}, {9, 10, 11}};
  std::vector<std::size_t> perm(12);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
  Vec pv(12);
  for (std::size_t i = 0; i < 12; ++i) pv[static_cast<Eigen::Index>(perm[i])] = v[static_cast<Eigen::Index>(i)];
  IndexGroups pg = groups;
  for (auto& g : pg)
    for (auto& i : g) i = perm[i];
  EXPECT_NEAR(eval_group(v, groups), eval_group(pv, pg), 1e-13);
}

TEST(ProxL1, ClosedForm) {
  Vec v(2);
  v << 3.0, -0.5;
  const Vec out = prox_l1(v, 1.0);
  EXPECT_DOUBLE_EQ(out[0], 2.0);
  EXPECT_DOUBLE_EQ(out[1], 0.0);
  EXPECT_EQ(prox_l1(v, 0.0), v);
  EXPECT_THROW(prox_l1(v, -1.0), parameter_error);
}

TEST(ProxL1, MatchesScalarSearch) {
  Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const Vec v = rng.normal_vector(6, 2.0);
    const double t = 2.0 * rng.uniform();
    EXPECT_LT((prox_l1(v, t) - oracle::soft_threshold_by_search(v, t)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(ProxGroup, ClosedForm) {
  Vec v(2);
  v << 3.0, 4.0;
  const GroupIndex one(IndexGroups{{0, 1}}, 2);
  const Vec half = prox_group(v, 2.5, one);
  EXPECT_DOUBLE_EQ(half[0], 1.5);
  EXPECT_DOUBLE_EQ(half[1], 2.0);
  EXPECT_EQ(prox_group(v, 5.0, one), Vec::Zero(2));
  EXPECT_EQ(prox_group(Vec::Zero(2), 1.0, one), Vec::Zero(2));
}

TEST(ProxGroup, MatchesRadialSearch) {
  Rng rng(22);
  for (int trial = 0; trial < 25; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + rng.below(6));
    const Vec v = rng.normal_vector(n, 2.0);
    const double t = 3.0 * rng.uniform();
    const GroupIndex g = GroupIndex::contiguous({0, static_cast<std::size_t>(n)});
    EXPECT_LT((prox_group(v, t, g) - oracle::group_shrink_by_radial_search(v, t)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(ProxGroup, RejectsOverlap) {
  const GroupIndex overlapping(IndexGroups{{0, 1}, {1, 2}}, 3);
  EXPECT_FALSE(overlapping.disjoint());
  EXPECT_THROW(prox_group(Vec::Ones(3), 0.1, overlapping), contract_error);
  EXPECT_THROW(PenaltySpec::group_l2(1.0, overlapping), contract_error);
}

TEST(Prox, Nonexpansive) {
  Rng rng(23);
  const GroupIndex groups = GroupIndex::contiguous({0, 3, 4, 9, 10});
  for (int trial = 0; trial < 50; ++trial) {
    const Vec u = rng.normal_vector(10), v = rng.normal_vector(10);
    const double t = rng.uniform();
    EXPECT_LE((prox_l1(u, t) - prox_l1(v, t)).norm(), (u - v).norm() + 1e-15);
    EXPECT_LE((prox_group(u, t, groups) - prox_group(v, t, groups)).norm(), (u - v).norm() + 1e-15);
  }
}

// Brute-force latent norm for groups {0,1} and {1,2}: only coefficient 1 is
// shared, so the splitting has one free parameter.
double latent_two_groups(const Vec& theta) {
  const double shared = theta[1];
  const double r = std::abs(shared) + 1.0;
  auto f = [&](double a) { return std::hypot(theta[0], a) + std::hypot(shared - a, theta[2]); };
  const double a = oracle::grid_minimize(f, -r, r, 1e-12);
  return f(a);
}

// Groups {0,1,2} and {1,2,3}: coefficients 1 and 2 are shared; nested
// scalar searches over the two split parameters.
double latent_double_overlap(const Vec& theta) {
  const double r1 = std::abs(theta[1]) + 1.0, r2 = std::abs(theta[2]) + 1.0;
  auto value = [&](double a, double b) {
    return std::sqrt(theta[0] * theta[0] + a * a + b * b) +
           std::sqrt((theta[1] - a) * (theta[1] - a) + (theta[2] - b) * (theta[2] - b) + theta[3] * theta[3]);
  };
  auto inner = [&](double a) {
    const double b = oracle::grid_minimize([&](double bb) { return value(a, bb); }, -r2, r2, 1e-10);
    return value(a, b);
  };
  const double a = oracle::grid_minimize(inner, -r1, r1, 1e-9);
  return inner(a);
}

TEST(LatentNorm, MatchesBruteForceSplitting) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec t3 = rng.normal_vector(3);
    const ReplicationMap rep3({{0, 1}, {1, 2}}, 3);
    const auto res3 = latent_group_norm(t3, rep3, {200000, 1e-12});
    EXPECT_NEAR(res3.value, latent_two_groups(t3), 1e-7);
    EXPECT_LT((rep3.collapse(res3.splitting) - t3).norm(), 1e-12);
    EXPECT_LE(res3.lower_bound, res3.value + 1e-12);

    const Vec t4 = rng.normal_vector(4);
    const ReplicationMap rep4({{0, 1, 2}, {1, 2, 3}}, 4);
    EXPECT_NEAR(latent_group_norm(t4, rep4, {200000, 1e-12}).value, latent_double_overlap(t4), 1e-6);
  }
}

TEST(LatentNorm, BoundedByOverlappingGroupNorm) {
  Rng rng(32);
  const CoeffLayout layout({4, 4}, 2);
  const GroupStructure gs = make_groups(layout, Scheme::pc2);
  const ReplicationMap rep = make_replication_map(gs);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec t = rng.normal_vector(16);
    IndexGroups with_singletons = gs.groups;
    for (std::size_t i = 0; i < 16; ++i)
      if (rep.replica_count(i) == 1 && rep.grouped_replicas() <= rep.replicas(i)[0]) with_singletons.push_back({i});
    EXPECT_LE(latent_group_norm(t, rep).value, eval_group(t, with_singletons) + 1e-9);
    EXPECT_GE(latent_group_norm(t, rep).value, eval_l1(t) / std::sqrt(2.0) - 1e-9);
  }
}

TEST(Scramble, PermutesWithinSubbands) {
  const CoeffLayout layout({16, 16}, 4);
  Vec theta(256);
  for (Eigen::Index i = 0; i < 256; ++i) theta[i] = static_cast<double>(i);
  const Vec s = scramble_details(theta, layout, 9);
  EXPECT_EQ(s[0], 0.0);
  for (const Subband& b : layout.detail_subbands()) {
    std::vector<double> before, after;
    for (std::size_t r = 0; r < b.rows; ++r)
      for (std::size_t c = 0; c < b.cols; ++c) {
        const auto k = static_cast<Eigen::Index>((b.row0 + r) * 16 + b.col0 + c);
        before.push_back(theta[k]);
        after.push_back(s[k]);
      }
    std::sort(after.begin(), after.end());
    EXPECT_EQ(before, after);
  }
  EXPECT_NE(s, theta);
  EXPECT_EQ(scramble_details(theta, layout, 9), s);
  const Vec all = scramble_details(theta, layout, 9, ScrambleScope::all_details);
  std::vector<double> sorted(all.data(), all.data() + 256);
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 256; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

TEST(PenaltyRatio, LassoRatioIsExactlyOne) {
  const CoeffLayout layout({32, 32}, 5);
  Rng rng(6);
  const Vec theta = rng.normal_vector(1024);
  const GroupStructure gs = make_groups(layout, Scheme::pc4);
  const ReplicationMap rep = make_replication_map(gs);
  for (auto scope : {ScrambleScope::within_subband, ScrambleScope::all_details}) {
    const PenaltyRatios r = penalty_ratio(theta, scramble_details(theta, layout, 1, scope), gs, rep, {2000, 1e-4});
    EXPECT_EQ(r.l1, 1.0);
  }
}

TEST(PenaltyRatio, ConcentratedGroupEnergyLowersGroupPenalty) {
  // All energy in one parent-child group versus the same values scattered.
  // Two levels, so every detail sits in exactly one pc4 group.
  const CoeffLayout layout({8, 8}, 2);
  const GroupStructure gs = make_groups(layout, Scheme::pc4);
  const ReplicationMap rep = make_replication_map(gs);
  Vec structured = Vec::Zero(64);
  const auto& g = gs.groups.front();
  for (std::size_t k = 0; k < g.size(); ++k) structured[static_cast<Eigen::Index>(g[k])] = 1.0 + 0.1 * static_cast<double>(k);
  const Vec scrambled = scramble_details(structured, layout, 4, ScrambleScope::all_details);
  const PenaltyRatios r = penalty_ratio(structured, scrambled, gs, rep);
  EXPECT_EQ(r.l1, 1.0);
  EXPECT_LT(r.group, 1.0);
  EXPECT_LT(r.replication, 1.0);
}

}  // namespace
}  // namespace wavegroup
