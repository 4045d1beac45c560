#pragma once

// Sparsity penalties, their proximal maps, and the structured-vs-scrambled
// penalty comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "wavegroup/dwt.hpp"
#include "wavegroup/error.hpp"
#include "wavegroup/grouping.hpp"
#include "wavegroup/random.hpp"

namespace wavegroup {

// Flattened list of index groups (CSR layout).
class GroupIndex {
 public:
  GroupIndex() = default;

  GroupIndex(const IndexGroups& groups, std::size_t dim) : dim_(dim) {
    offsets_.reserve(groups.size() + 1);
    offsets_.push_back(0);
    for (const auto& g : groups) {
      if (g.empty()) throw index_error("empty group");
      members_.insert(members_.end(), g.begin(), g.end());
      offsets_.push_back(members_.size());
    }
    finish();
  }

  // Contiguous blocks [offsets[g], offsets[g+1]) over a vector of length offsets.back().
  static GroupIndex contiguous(const std::vector<std::size_t>& offsets) {
    GroupIndex out;
    out.dim_ = offsets.empty() ? 0 : offsets.back();
    out.offsets_ = offsets.empty() ? std::vector<std::size_t>{0} : offsets;
    out.members_.resize(out.dim_);
    std::iota(out.members_.begin(), out.members_.end(), std::size_t{0});
    out.finish();
    return out;
  }

  static GroupIndex singletons(std::size_t dim) {
    std::vector<std::size_t> off(dim + 1);
    std::iota(off.begin(), off.end(), std::size_t{0});
    return contiguous(off);
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return offsets_.size() - 1; }
  bool disjoint() const { return disjoint_; }
  std::size_t begin(std::size_t g) const { return offsets_[g]; }
  std::size_t end(std::size_t g) const { return offsets_[g + 1]; }
  std::size_t member(std::size_t k) const { return members_[k]; }

 private:
  void finish() {
    std::vector<char> seen(dim_, 0);
    disjoint_ = true;
    for (std::size_t i : members_) {
      if (i >= dim_) throw index_error("group index " + std::to_string(i) + " out of range");
      if (seen[i]) disjoint_ = false;
      seen[i] = 1;
    }
  }

  std::size_t dim_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> members_;
  bool disjoint_ = true;
};

// The replicated groups of a replication map (singletons included).
inline GroupIndex replicated_groups(const ReplicationMap& repmap) {
  return GroupIndex::contiguous(repmap.group_offsets());
}

// Summed in sorted order so the value is exactly invariant under permutation.
inline double eval_l1(const Vec& theta) {
  std::vector<double> mags(static_cast<std::size_t>(theta.size()));
  for (Eigen::Index i = 0; i < theta.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(theta[i]);
  std::sort(mags.begin(), mags.end());
  return std::accumulate(mags.begin(), mags.end(), 0.0);
}

inline double eval_group(const Vec& theta, const GroupIndex& groups) {
  if (static_cast<std::size_t>(theta.size()) != groups.dim()) throw dimension_error("eval_group: length mismatch");
  double total = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double sq = 0.0;
    for (std::size_t k = groups.begin(g); k < groups.end(g); ++k) {
      const double v = theta[static_cast<Eigen::Index>(groups.member(k))];
      sq += v * v;
    }
    total += std::sqrt(sq);
  }
  return total;
}

inline double eval_group(const Vec& theta, const IndexGroups& groups) {
  for (const auto& g : groups) {
    for (std::size_t i : g) {
      if (i >= static_cast<std::size_t>(theta.size())) throw index_error("group index out of range");
    }
  }
  return eval_group(theta, GroupIndex(groups, static_cast<std::size_t>(theta.size())));
}

// Soft threshold: argmin_u 1/2 |u - v|^2 + threshold |u|_1.
inline Vec prox_l1(const Vec& v, double threshold) {
  if (threshold < 0.0) throw parameter_error("prox_l1: negative threshold");
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - threshold;
    out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
  }
  return out;
}

// Block shrinkage over a partition: argmin_u 1/2 |u - v|^2 + threshold sum_g |u_g|_2.
// Coordinates outside every group pass through unchanged.
inline Vec prox_group(const Vec& v, double threshold, const GroupIndex& groups) {
  if (threshold < 0.0) throw parameter_error("prox_group: negative threshold");
  if (!groups.disjoint()) throw contract_error("prox_group needs disjoint groups; replicate overlapping groups first");
  if (static_cast<std::size_t>(v.size()) != groups.dim()) throw dimension_error("prox_group: length mismatch");
  Vec out = v;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double sq = 0.0;
    for (std::size_t k = groups.begin(g); k < groups.end(g); ++k) {
      const double x = v[static_cast<Eigen::Index>(groups.member(k))];
      sq += x * x;
    }
    const double norm = std::sqrt(sq);
    const double factor = norm > threshold ? 1.0 - threshold / norm : 0.0;
    for (std::size_t k = groups.begin(g); k < groups.end(g); ++k) {
      out[static_cast<Eigen::Index>(groups.member(k))] *= factor;
    }
  }
  return out;
}

enum class PenaltyKind { l1, group_l2 };

// lambda * |.|_1 or lambda * sum_g |._g|_2 over disjoint groups.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::l1;
  double lambda = 0.0;
  GroupIndex groups;

  static PenaltySpec l1(double lambda) {
    if (lambda < 0.0) throw parameter_error("penalty weight must be nonnegative");
    return {PenaltyKind::l1, lambda, {}};
  }

  static PenaltySpec group_l2(double lambda, GroupIndex groups) {
    if (lambda < 0.0) throw parameter_error("penalty weight must be nonnegative");
    if (!groups.disjoint()) throw contract_error("group penalty in a solver needs disjoint groups");
    return {PenaltyKind::group_l2, lambda, std::move(groups)};
  }

  double value(const Vec& v) const {
    return lambda * (kind == PenaltyKind::l1 ? eval_l1(v) : eval_group(v, groups));
  }

  // prox of step * penalty.
  Vec prox(const Vec& v, double step) const {
    return kind == PenaltyKind::l1 ? prox_l1(v, step * lambda) : prox_group(v, step * lambda, groups);
  }
};

// --- Latent (replication) norm ----------------------------------------------

struct LatentNormOptions {
  int max_iters = 20000;
  double rel_gap = 1e-7;
};

struct LatentNormResult {
  double value = 0.0;        // primal value at the returned splitting
  double lower_bound = 0.0;  // dual certificate
  int iterations = 0;
  Vec splitting;             // replica vector whose collapse equals theta
};

// min over replica vectors v with collapse(v) = theta of sum_g |v_g|_2, the
// penalty the replicated formulation induces on theta. Solved by
// Douglas-Rachford splitting between the block-shrinkage prox and the
// projection onto the affine set {collapse(v) = theta}; the duality gap
// bounds the error.
inline LatentNormResult latent_group_norm(const Vec& theta, const ReplicationMap& repmap,
                                          const LatentNormOptions& opts = {}) {
  if (static_cast<std::size_t>(theta.size()) != repmap.original_dim()) {
    throw dimension_error("latent_group_norm: length mismatch");
  }
  const GroupIndex groups = replicated_groups(repmap);
  const Vec counts = repmap.replica_counts();
  LatentNormResult res;
  const double scale = theta.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    res.splitting = Vec::Zero(static_cast<Eigen::Index>(repmap.total_replicas()));
    return res;
  }
  const double gamma = 0.1 * scale;

  auto project = [&](const Vec& z) -> Vec {
    const Vec residual = (theta - repmap.collapse(z)).cwiseQuotient(counts);
    return z + repmap.expand(residual);
  };
  auto dual_bound = [&](const Vec& z) {
    // alpha = D^{-1}(theta - collapse z) / gamma is a subgradient estimate;
    // rescale it into the dual-feasible set {|expand(alpha)_g| <= 1}.
    const Vec alpha = (theta - repmap.collapse(z)).cwiseQuotient(counts) / gamma;
    const Vec e = repmap.expand(alpha);
    double worst = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      worst = std::max(worst, e.segment(static_cast<Eigen::Index>(groups.begin(g)),
                                        static_cast<Eigen::Index>(groups.end(g) - groups.begin(g)))
                                  .norm());
    }
    return alpha.dot(theta) / std::max(1.0, worst);
  };

  Vec z = repmap.expand(theta.cwiseQuotient(counts));
  Vec x = project(z);
  double best_upper = eval_group(x, groups);
  Vec best_x = x;
  double lower = 0.0;
  int k = 0;
  for (; k < opts.max_iters; ++k) {
    x = project(z);
    const Vec y = prox_group(2.0 * x - z, gamma, groups);
    z += y - x;
    if (k % 10 == 0) {
      const Vec xc = project(z);
      const double upper = eval_group(xc, groups);
      if (upper < best_upper) {
        best_upper = upper;
        best_x = xc;
      }
      lower = std::max(lower, dual_bound(z));
      if (best_upper - lower <= opts.rel_gap * best_upper) break;
    }
  }
  res.value = best_upper;
  res.lower_bound = lower;
  res.iterations = k;
  res.splitting = std::move(best_x);
  return res;
}

// --- Scrambling and penalty ratios ------------------------------------------

enum class ScrambleScope {
  within_subband,  // permute positions inside each detail subband
  all_details,     // one permutation across every detail coefficient
};

inline ScrambleScope parse_scramble_scope(const std::string& s) {
  if (s == "subband" || s == "within_subband") return ScrambleScope::within_subband;
  if (s == "all" || s == "all_details") return ScrambleScope::all_details;
  throw parameter_error("unknown scramble scope '" + s + "'");
}

// Random permutation of detail coefficients; scaling coefficients stay put.
inline Vec scramble_details(const Vec& theta, const CoeffLayout& layout, std::uint64_t seed,
                            ScrambleScope scope = ScrambleScope::within_subband) {
  if (static_cast<std::size_t>(theta.size()) != layout.size()) throw dimension_error("scramble: length mismatch");
  Rng rng(seed);
  Vec out = theta;
  auto shuffle = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> perm = idx;
    for (std::size_t k = perm.size(); k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      out[static_cast<Eigen::Index>(idx[k])] = theta[static_cast<Eigen::Index>(perm[k])];
    }
  };
  std::vector<std::size_t> all;
  for (const Subband& b : layout.detail_subbands()) {
    std::vector<std::size_t> idx;
    idx.reserve(b.size());
    for (std::size_t r = 0; r < b.rows; ++r) {
      for (std::size_t c = 0; c < b.cols; ++c) idx.push_back((b.row0 + r) * layout.cols() + b.col0 + c);
    }
    if (scope == ScrambleScope::within_subband) {
      shuffle(idx);
    } else {
      all.insert(all.end(), idx.begin(), idx.end());
    }
  }
  if (scope == ScrambleScope::all_details) shuffle(all);
  return out;
}

struct PenaltyRatios {
  double l1 = 1.0;
  double group = 1.0;        // overlapping group norm over the parent-child groups
  double replication = 1.0;  // latent norm of the replicated formulation
};

// Penalties of the structured vector divided by those of the scrambled one.
inline PenaltyRatios penalty_ratio(const Vec& structured, const Vec& scrambled, const GroupStructure& gs,
                                   const ReplicationMap& repmap, const LatentNormOptions& opts = {}) {
  if (structured.size() != scrambled.size()) throw dimension_error("penalty_ratio: length mismatch");
  PenaltyRatios r;
  r.l1 = eval_l1(structured) / eval_l1(scrambled);
  r.group = eval_group(structured, gs.groups) / eval_group(scrambled, gs.groups);
  r.replication = latent_group_norm(structured, repmap, opts).value / latent_group_norm(scrambled, repmap, opts).value;
  return r;
}

}  // namespace wavegroup
