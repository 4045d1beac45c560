#pragma once

// Proximal-gradient solver with Barzilai-Borwein steps and a nonmonotone
// acceptance rule, for
//
//   lasso      : 1/2 |y - A t|^2 + lambda |t|_1
//   replicated : 1/2 |y - A~ v|^2 + lambda sum_g |v_g|_2     (v = replicas)
//   coupled    : 1/2 |y - A t|^2 + lambda sum_g |v_g|_2
//                + tau^2/2 sum_i sum_{j in J_i} (t_i - v_j)^2   (z = [t ; v])
//
// In the coupled form the masters t carry no nonsmooth term; the coupling is
// folded into the smooth part so every prox stays separable.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavegroup/error.hpp"
#include "wavegroup/grouping.hpp"
#include "wavegroup/linop.hpp"
#include "wavegroup/penalty.hpp"

namespace wavegroup {

enum class Formulation { lasso, replicated, coupled };

inline const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::lasso: return "lasso";
    case Formulation::replicated: return "replicated";
    case Formulation::coupled: return "coupled";
  }
  return "?";
}

struct Problem {
  Formulation formulation = Formulation::lasso;
  // A for lasso and coupled problems, the replicated A~ otherwise.
  LinearOperator op;
  Vec y;
  PenaltySpec penalty;
  std::shared_ptr<const ReplicationMap> repmap;
  double tau = 0.0;

  // Length of the coefficient vector in original coordinates.
  std::size_t coefficient_dim() const {
    return formulation == Formulation::replicated ? repmap->original_dim() : op.domain_dim();
  }

  // Length of the optimization variable.
  std::size_t dim() const {
    switch (formulation) {
      case Formulation::lasso: return op.domain_dim();
      case Formulation::replicated: return repmap->total_replicas();
      case Formulation::coupled: return op.domain_dim() + repmap->total_replicas();
    }
    return 0;
  }

  // Offset of the block the penalty acts on.
  std::size_t penalized_offset() const { return formulation == Formulation::coupled ? op.domain_dim() : 0; }
  std::size_t penalized_dim() const { return dim() - penalized_offset(); }

  // Solution in original coordinates: identity, replica sums, or masters.
  Vec coefficients(const Vec& z) const {
    switch (formulation) {
      case Formulation::lasso: return z;
      case Formulation::replicated: return repmap->collapse(z);
      case Formulation::coupled: return z.head(static_cast<Eigen::Index>(op.domain_dim()));
    }
    return z;
  }
};

inline Problem make_lasso_problem(LinearOperator a, Vec y, PenaltySpec penalty) {
  if (static_cast<std::size_t>(y.size()) != a.range_dim()) throw dimension_error("data length does not match operator");
  if (penalty.kind == PenaltyKind::group_l2 && penalty.groups.dim() != a.domain_dim()) {
    throw dimension_error("group penalty dimension does not match operator domain");
  }
  Problem p;
  p.formulation = Formulation::lasso;
  p.op = std::move(a);
  p.y = std::move(y);
  p.penalty = std::move(penalty);
  return p;
}

inline Problem make_lasso_problem(LinearOperator a, Vec y, double lambda) {
  return make_lasso_problem(std::move(a), std::move(y), PenaltySpec::l1(lambda));
}

// Overlap group lasso with replicated columns.
inline Problem make_replicated_problem(const LinearOperator& a, Vec y, double lambda,
                                       std::shared_ptr<const ReplicationMap> repmap) {
  if (static_cast<std::size_t>(y.size()) != a.range_dim()) throw dimension_error("data length does not match operator");
  Problem p;
  p.formulation = Formulation::replicated;
  p.op = replicate_columns(a, repmap);
  p.y = std::move(y);
  p.penalty = PenaltySpec::group_l2(lambda, replicated_groups(*repmap));
  p.repmap = std::move(repmap);
  return p;
}

// Overlap group lasso with master copies tied to replicas by tau^2.
inline Problem make_coupled_problem(LinearOperator a, Vec y, double lambda, double tau,
                                    std::shared_ptr<const ReplicationMap> repmap) {
  if (static_cast<std::size_t>(y.size()) != a.range_dim()) throw dimension_error("data length does not match operator");
  if (repmap->original_dim() != a.domain_dim()) throw dimension_error("replication map does not match operator");
  if (tau < 0.0) throw parameter_error("tau must be nonnegative");
  Problem p;
  p.formulation = Formulation::coupled;
  p.op = std::move(a);
  p.y = std::move(y);
  p.penalty = PenaltySpec::group_l2(lambda, replicated_groups(*repmap));
  p.repmap = std::move(repmap);
  p.tau = tau;
  return p;
}

struct SmoothEval {
  double value = 0.0;
  Vec grad;
};

inline SmoothEval smooth_value_grad(const Problem& p, const Vec& z) {
  if (static_cast<std::size_t>(z.size()) != p.dim()) {
    throw dimension_error("variable length " + std::to_string(z.size()) + " does not match problem dimension " +
                          std::to_string(p.dim()));
  }
  SmoothEval out;
  if (p.formulation != Formulation::coupled) {
    const Vec residual = p.op.apply(z) - p.y;
    out.value = 0.5 * residual.squaredNorm();
    out.grad = p.op.adjoint(residual);
    return out;
  }
  const auto n = static_cast<Eigen::Index>(p.op.domain_dim());
  const auto r = static_cast<Eigen::Index>(p.repmap->total_replicas());
  const Vec master = z.head(n);
  const Vec residual = p.op.apply(master) - p.y;
  const Vec gap = z.tail(r) - p.repmap->expand(master);  // v_j - t_i
  const double tau2 = p.tau * p.tau;
  out.value = 0.5 * residual.squaredNorm() + 0.5 * tau2 * gap.squaredNorm();
  out.grad.resize(n + r);
  out.grad.head(n) = p.op.adjoint(residual) - tau2 * p.repmap->collapse(gap);
  out.grad.tail(r) = tau2 * gap;
  return out;
}

inline double nonsmooth_value(const Problem& p, const Vec& z) {
  if (p.formulation == Formulation::coupled) {
    return p.penalty.value(z.tail(static_cast<Eigen::Index>(p.penalized_dim())));
  }
  return p.penalty.value(z);
}

inline double objective(const Problem& p, const Vec& z) { return smooth_value_grad(p, z).value + nonsmooth_value(p, z); }

// prox of step * (nonsmooth part).
inline Vec prox_step(const Problem& p, const Vec& v, double step) {
  if (p.formulation != Formulation::coupled) return p.penalty.prox(v, step);
  Vec out = v;
  const auto off = static_cast<Eigen::Index>(p.penalized_offset());
  out.tail(v.size() - off) = p.penalty.prox(v.tail(v.size() - off), step);
  return out;
}

// Smallest lambda for which zero solves the penalized block; the top of a
// regularization path. For the coupled form the replicated value is used.
inline double zero_threshold(const LinearOperator& a, const Vec& y, const PenaltySpec& shape,
                             const ReplicationMap* repmap = nullptr) {
  const Vec corr = a.adjoint(y);
  if (shape.kind == PenaltyKind::l1 && repmap == nullptr) return corr.cwiseAbs().maxCoeff();
  const Vec c = repmap ? repmap->expand(corr) : corr;
  double best = 0.0;
  for (std::size_t g = 0; g < shape.groups.size(); ++g) {
    double sq = 0.0;
    for (std::size_t k = shape.groups.begin(g); k < shape.groups.end(g); ++k) {
      const double v = c[static_cast<Eigen::Index>(shape.groups.member(k))];
      sq += v * v;
    }
    best = std::max(best, std::sqrt(sq));
  }
  return best;
}

struct SolverConfig {
  int max_iters = 2000;
  double rel_obj_tol = 1e-6;
  double alpha_min = 1e-8;
  double alpha_max = 1e8;
  int window = 5;               // nonmonotone memory M
  double initial_alpha = 0.0;   // 0 picks the curvature along the first gradient
  double sufficient_decrease = 1e-5;
  double backtrack_factor = 2.0;
  int max_backtracks = 200;
};

enum class Termination { converged, max_iters };

inline const char* to_string(Termination t) { return t == Termination::converged ? "converged" : "max_iters"; }

struct SolveReport {
  Vec solution;      // optimization variable
  Vec coefficients;  // solution in original coordinates
  std::vector<double> objective_trace;
  int iterations = 0;
  Termination termination = Termination::max_iters;
};

inline SolveReport solve(const Problem& p, const SolverConfig& cfg, const Vec& start) {
  if (!(cfg.alpha_min > 0.0) || cfg.alpha_min > cfg.alpha_max) throw parameter_error("need 0 < alpha_min <= alpha_max");
  if (!(cfg.rel_obj_tol > 0.0) || cfg.window < 1) throw parameter_error("invalid solver tolerances");
  if (static_cast<std::size_t>(start.size()) != p.dim()) throw dimension_error("start vector has wrong length");

  Vec z = start;
  SmoothEval s = smooth_value_grad(p, z);
  double phi = s.value + nonsmooth_value(p, z);
  if (!std::isfinite(phi)) throw divergence_error("objective is not finite at the starting point");

  SolveReport rep;
  rep.objective_trace.push_back(phi);
  std::deque<double> recent{phi};

  double alpha = cfg.initial_alpha;
  if (!(alpha > 0.0)) {
    const double gnorm = s.grad.norm();
    alpha = 1.0;
    if (gnorm > 0.0) {
      const Vec dz = -s.grad / gnorm;
      const Vec dg = smooth_value_grad(p, z + dz).grad - s.grad;
      alpha = dz.dot(dg);
    }
  }
  alpha = std::clamp(alpha, cfg.alpha_min, cfg.alpha_max);

  rep.termination = Termination::max_iters;
  int k = 0;
  for (; k < cfg.max_iters; ++k) {
    const double reference = *std::max_element(recent.begin(), recent.end());
    Vec u;
    SmoothEval su;
    double phi_u = 0.0;
    double step_sq = 0.0;
    bool accepted = false;
    for (int b = 0; b <= cfg.max_backtracks; ++b) {
      u = prox_step(p, z - s.grad / alpha, 1.0 / alpha);
      su = smooth_value_grad(p, u);
      phi_u = su.value + nonsmooth_value(p, u);
      if (!std::isfinite(phi_u)) throw divergence_error("objective became non-finite");
      step_sq = (u - z).squaredNorm();
      if (phi_u <= reference - 0.5 * cfg.sufficient_decrease * alpha * step_sq) {
        accepted = true;
        break;
      }
      alpha *= cfg.backtrack_factor;
    }
    if (!accepted || step_sq == 0.0) {
      // No representable descent left.
      rep.termination = Termination::converged;
      break;
    }

    const Vec dz = u - z;
    const double curvature = dz.dot(su.grad - s.grad);
    alpha = std::clamp(curvature / step_sq, cfg.alpha_min, cfg.alpha_max);

    const double change = std::abs(phi_u - phi) / std::max(std::abs(phi), std::numeric_limits<double>::min());
    z = std::move(u);
    s = std::move(su);
    phi = phi_u;
    rep.objective_trace.push_back(phi);
    recent.push_back(phi);
    if (static_cast<int>(recent.size()) > cfg.window) recent.pop_front();
    if (change < cfg.rel_obj_tol) {
      rep.termination = Termination::converged;
      ++k;
      break;
    }
  }
  rep.iterations = k;
  rep.coefficients = p.coefficients(z);
  rep.solution = std::move(z);
  return rep;
}

inline SolveReport solve(const Problem& p, const SolverConfig& cfg = {}) {
  return solve(p, cfg, Vec::Zero(static_cast<Eigen::Index>(p.dim())));
}

// --- Optimality certificate ---------------------------------------------------

struct KktViolation {
  std::size_t index;  // coordinate (L1, masters) or group number (group penalty)
  double amount;
  std::string what;
};

struct KktReport {
  double max_violation = 0.0;
  std::vector<KktViolation> violations;  // entries above the tolerance

  bool ok() const { return violations.empty(); }
};

inline KktReport check_kkt(const Problem& p, const Vec& solution, double tol) {
  const SmoothEval s = smooth_value_grad(p, solution);
  const double lambda = p.penalty.lambda;
  KktReport rep;
  auto record = [&](std::size_t index, double amount, const char* what) {
    rep.max_violation = std::max(rep.max_violation, amount);
    if (amount > tol) rep.violations.push_back({index, amount, what});
  };

  const std::size_t off = p.penalized_offset();
  for (std::size_t i = 0; i < off; ++i) record(i, std::abs(s.grad[static_cast<Eigen::Index>(i)]), "master gradient");

  const auto block = static_cast<Eigen::Index>(p.penalized_dim());
  const Vec x = solution.segment(static_cast<Eigen::Index>(off), block);
  const Vec g = s.grad.segment(static_cast<Eigen::Index>(off), block);
  if (p.penalty.kind == PenaltyKind::l1) {
    for (Eigen::Index i = 0; i < block; ++i) {
      const double amount = x[i] == 0.0 ? std::max(0.0, std::abs(g[i]) - lambda)
                                        : std::abs(g[i] + lambda * (x[i] > 0.0 ? 1.0 : -1.0));
      record(static_cast<std::size_t>(i), amount, x[i] == 0.0 ? "zero coordinate" : "support coordinate");
    }
    return rep;
  }

  const GroupIndex& groups = p.penalty.groups;
  std::vector<char> covered(static_cast<std::size_t>(block), 0);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    double xn = 0.0;
    for (std::size_t k = groups.begin(gi); k < groups.end(gi); ++k) {
      const auto i = static_cast<Eigen::Index>(groups.member(k));
      covered[static_cast<std::size_t>(i)] = 1;
      xn += x[i] * x[i];
    }
    xn = std::sqrt(xn);
    double sq = 0.0;
    for (std::size_t k = groups.begin(gi); k < groups.end(gi); ++k) {
      const auto i = static_cast<Eigen::Index>(groups.member(k));
      const double r = xn == 0.0 ? g[i] : g[i] + lambda * x[i] / xn;
      sq += r * r;
    }
    const double amount = xn == 0.0 ? std::max(0.0, std::sqrt(sq) - lambda) : std::sqrt(sq);
    record(gi, amount, xn == 0.0 ? "zero group" : "active group");
  }
  for (Eigen::Index i = 0; i < block; ++i) {
    if (!covered[static_cast<std::size_t>(i)]) record(static_cast<std::size_t>(i), std::abs(g[i]), "unpenalized coordinate");
  }
  return rep;
}

}  // namespace wavegroup
