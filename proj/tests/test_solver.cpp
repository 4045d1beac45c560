#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wavegroup/solver.hpp"

namespace wavegroup {
namespace {

SolverConfig tight() {
  SolverConfig cfg;
  cfg.max_iters = 100000;
  cfg.rel_obj_tol = 1e-15;
  return cfg;
}

struct TinyInstance {
  Matrix a;
  Vec y;
  double lambda;
};

TinyInstance tiny_lasso(std::uint64_t seed, Eigen::Index m = 6, Eigen::Index n = 8) {
  Rng rng(seed);
  TinyInstance t;
  t.a = gaussian_matrix(static_cast<std::size_t>(m), static_cast<std::size_t>(n), derive_seed(seed, 1));
  t.y = rng.normal_vector(m, 2.0);
  t.lambda = (0.05 + 0.4 * rng.uniform()) * (t.a.transpose() * t.y).cwiseAbs().maxCoeff();
  return t;
}

TEST(SmoothGrad, ZeroAtExactFit) {
  const Matrix a = gaussian_matrix(5, 5, 3);
  Rng rng(1);
  const Vec z = rng.normal_vector(5);
  const Problem p = make_lasso_problem(matrix_operator(a), a * z, 0.0);
  const SmoothEval s = smooth_value_grad(p, z);
  EXPECT_NEAR(s.value, 0.0, 1e-20);
  EXPECT_LT(s.grad.norm(), 1e-12);
}

TEST(SmoothGrad, CouplingVanishesWhenReplicasAgree) {
  auto rep = std::make_shared<const ReplicationMap>(IndexGroups{{1, 2}, {1, 3}}, 4);
  const Matrix a = gaussian_matrix(6, 4, 2);
  Rng rng(2);
  const Vec theta = rng.normal_vector(4);
  const Vec y = rng.normal_vector(6);
  const Problem p = make_coupled_problem(matrix_operator(a), y, 0.3, 5.0, rep);
  Vec z(4 + static_cast<Eigen::Index>(rep->total_replicas()));
  z << theta, rep->expand(theta);
  EXPECT_NEAR(smooth_value_grad(p, z).value, 0.5 * (y - a * theta).squaredNorm(), 1e-12);
}

TEST(SmoothGrad, MatchesFiniteDifferences) {
  auto rep = std::make_shared<const ReplicationMap>(make_replication_map(make_groups(CoeffLayout({8}, 3), Scheme::pc2_1d)));
  const LinearOperator a = gaussian_sensing(6, 8, 4);
  Rng rng(3);
  const Vec y = rng.normal_vector(6);
  const std::vector<Problem> problems{make_lasso_problem(a, y, 0.1), make_replicated_problem(a, y, 0.1, rep),
                                      make_coupled_problem(a, y, 0.1, 2.0, rep)};
  for (const Problem& p : problems) {
    const Vec z = rng.normal_vector(static_cast<Eigen::Index>(p.dim()));
    const Vec g = smooth_value_grad(p, z).grad;
    const Vec fd = oracle::finite_difference_gradient([&](const Vec& v) { return smooth_value_grad(p, v).value; }, z);
    EXPECT_LT((g - fd).norm(), 1e-5 * g.norm()) << to_string(p.formulation);
  }
  EXPECT_THROW(smooth_value_grad(problems[0], Vec::Zero(3)), dimension_error);
}

TEST(Solve, IdentityOperatorGivesSoftThreshold) {
  Rng rng(4);
  const Vec y = rng.normal_vector(20);
  const Problem p = make_lasso_problem(identity_operator(20), y, 0.5);
  const SolveReport r = solve(p, tight());
  EXPECT_LT((r.solution - prox_l1(y, 0.5)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(r.termination, Termination::converged);
}

TEST(Solve, LargeLambdaGivesZero) {
  const TinyInstance t = tiny_lasso(5);
  const double lmax = (t.a.transpose() * t.y).cwiseAbs().maxCoeff();
  const SolveReport r = solve(make_lasso_problem(matrix_operator(t.a), t.y, lmax * 1.0001), tight());
  EXPECT_EQ(r.solution, Vec::Zero(8));
  EXPECT_DOUBLE_EQ(zero_threshold(matrix_operator(t.a), t.y, PenaltySpec::l1(1.0)), lmax);
}

TEST(Solve, TinyLassoMatchesCoordinateDescent) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TinyInstance t = tiny_lasso(100 + seed);
    const Problem p = make_lasso_problem(matrix_operator(t.a), t.y, t.lambda);
    const SolveReport r = solve(p, tight());
    const Vec ref = oracle::lasso_coordinate_descent(t.a, t.y, t.lambda);
    EXPECT_NEAR(objective(p, r.solution), oracle::lasso_objective(t.a, t.y, t.lambda, ref), 1e-6) << seed;
    EXPECT_LT(check_kkt(p, r.solution, 1e-4).max_violation, 1e-4) << seed;
  }
}

TEST(Solve, ObjectiveTraceIsNonmonotoneDescent) {
  const TinyInstance t = tiny_lasso(7, 30, 60);
  SolverConfig cfg;
  const SolveReport r = solve(make_lasso_problem(matrix_operator(t.a), t.y, t.lambda * 0.2), cfg);
  const auto& tr = r.objective_trace;
  ASSERT_GE(tr.size(), 2u);
  EXPECT_LE(tr.back(), tr.front());
  for (std::size_t k = 1; k < tr.size(); ++k) {
    double ref = tr[k - 1];
    for (std::size_t j = k >= static_cast<std::size_t>(cfg.window) ? k - cfg.window : 0; j < k; ++j) ref = std::max(ref, tr[j]);
    EXPECT_LE(tr[k], ref);
    EXPECT_TRUE(std::isfinite(tr[k]));
  }
}

TEST(Solve, Deterministic) {
  const TinyInstance t = tiny_lasso(8, 20, 40);
  const Problem p = make_lasso_problem(matrix_operator(t.a), t.y, t.lambda * 0.3);
  EXPECT_EQ(solve(p).objective_trace, solve(p).objective_trace);
}

TEST(Solve, ReplicatedBlocksAreAllOrNothing) {
  const CoeffLayout layout({16}, 4);
  auto rep = std::make_shared<const ReplicationMap>(make_replication_map(make_groups(layout, Scheme::pc2_1d)));
  const LinearOperator a = compose_with_synthesis(gaussian_sensing(10, 16, 9), layout);
  Rng rng(9);
  const Vec y = rng.normal_vector(10, 3.0);
  const Problem p = make_replicated_problem(a, y, 1.0, rep);
  const SolveReport r = solve(p, tight());
  const auto& off = rep->group_offsets();
  int zero_groups = 0;
  for (std::size_t g = 0; g + 1 < off.size(); ++g) {
    const auto seg = r.solution.segment(static_cast<Eigen::Index>(off[g]), static_cast<Eigen::Index>(off[g + 1] - off[g]));
    const bool all_zero = (seg.array() == 0.0).all();
    zero_groups += all_zero;
    if (!all_zero) {
      EXPECT_GT(seg.cwiseAbs().minCoeff(), 1e-12);
    }
  }
  EXPECT_GT(zero_groups, 0);
  EXPECT_LT(check_kkt(p, r.solution, 1e-4).max_violation, 1e-4);
  EXPECT_LT((r.coefficients - rep->collapse(r.solution)).norm(), 1e-15);
}

TEST(Kkt, ExactProxSolutionHasNoViolations) {
  Rng rng(10);
  const Vec y = rng.normal_vector(15);
  const Problem p = make_lasso_problem(identity_operator(15), y, 0.4);
  EXPECT_TRUE(check_kkt(p, prox_l1(y, 0.4), 1e-6).ok());
  Vec bad = prox_l1(y, 0.4);
  bad[3] += 0.05;
  const KktReport rep = check_kkt(p, bad, 1e-6);
  EXPECT_FALSE(rep.ok());
  EXPECT_NEAR(rep.max_violation, 0.05, 1e-12);
}

TEST(Kkt, GroupConditions) {
  Vec y(4);
  y << 3, 4, 0.1, -0.2;
  const GroupIndex groups = GroupIndex::contiguous({0, 2, 4});
  const Problem p = make_lasso_problem(identity_operator(4), y, PenaltySpec::group_l2(1.0, groups));
  const Vec exact = prox_group(y, 1.0, groups);
  EXPECT_EQ(exact.tail(2), Vec::Zero(2));
  EXPECT_TRUE(check_kkt(p, exact, 1e-12).ok());
  Vec off = exact;
  off[0] *= 1.1;
  EXPECT_FALSE(check_kkt(p, off, 1e-6).ok());
}

TEST(Solve, TinyReplicatedInstancesPassKkt) {
  const CoeffLayout layout({8}, 3);
  auto rep = std::make_shared<const ReplicationMap>(make_replication_map(make_groups(layout, Scheme::pc2_1d)));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TinyInstance t = tiny_lasso(300 + seed);
    const LinearOperator a = matrix_operator(t.a);
    const double lmax = zero_threshold(a, t.y, PenaltySpec::group_l2(1.0, replicated_groups(*rep)), rep.get());
    const Problem p = make_replicated_problem(a, t.y, 0.2 * lmax, rep);
    EXPECT_LT(check_kkt(p, solve(p, tight()).solution, 1e-4).max_violation, 1e-4) << seed;
  }
}

// 4-coefficient tree: scaling 0, parent 1, children 2 and 3.
struct TauLimitCase {
  Matrix a;
  Vec y;
  double lambda;
  std::shared_ptr<const ReplicationMap> rep;
  std::vector<std::vector<int>> groups{{1, 2}, {1, 3}, {0}};
};

TauLimitCase tau_case() {
  TauLimitCase c;
  c.a = gaussian_matrix(6, 4, 77);
  Vec truth(4);
  truth << 1.0, 2.0, 1.5, -0.3;
  Rng rng(78);
  c.y = c.a * truth + 0.1 * rng.normal_vector(6);
  c.lambda = 2.0;
  c.rep = std::make_shared<const ReplicationMap>(
      make_replication_map(make_groups(CoeffLayout({4}, 2), Scheme::pc2_1d)));
  return c;
}

TEST(Solve, CoupledApproachesOverlappingGroupLasso) {
  const TauLimitCase c = tau_case();
  const Vec ref = oracle::overlapping_group_lasso_admm(c.a, c.y, c.lambda, c.groups);
  SolverConfig cfg = tight();
  cfg.max_iters = 400000;
  double previous = INFINITY;
  Vec last;
  for (double tau : {1.0, 10.0, 100.0, 1000.0}) {
    const Problem p = make_coupled_problem(matrix_operator(c.a), c.y, c.lambda, tau, c.rep);
    const SolveReport r = solve(p, cfg);
    const Vec gap = r.solution.tail(static_cast<Eigen::Index>(c.rep->total_replicas())) - c.rep->expand(r.coefficients);
    const double disagreement = gap.cwiseAbs().maxCoeff();
    EXPECT_LT(disagreement, previous) << tau;
    previous = disagreement;
    last = r.coefficients;
  }
  EXPECT_LT((last - ref).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Solve, RejectsBadConfig) {
  const Problem p = make_lasso_problem(identity_operator(3), Vec::Ones(3), 0.1);
  SolverConfig cfg;
  cfg.alpha_min = 2.0;
  cfg.alpha_max = 1.0;
  EXPECT_THROW(solve(p, cfg), parameter_error);
  EXPECT_THROW(solve(p, SolverConfig{}, Vec::Zero(2)), dimension_error);
}

}  // namespace
}  // namespace wavegroup
