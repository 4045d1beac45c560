#pragma once

// Matrix-free linear operators with explicit adjoints.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wavegroup/dwt.hpp"
#include "wavegroup/error.hpp"
#include "wavegroup/grouping.hpp"
#include "wavegroup/random.hpp"

namespace wavegroup {

using Matrix = Eigen::MatrixXd;

class LinearOperator {
 public:
  using Map = std::function<Vec(const Vec&)>;

  LinearOperator() = default;
  LinearOperator(std::size_t domain_dim, std::size_t range_dim, Map apply, Map adjoint)
      : domain_dim_(domain_dim), range_dim_(range_dim), apply_(std::move(apply)), adjoint_(std::move(adjoint)) {}

  std::size_t domain_dim() const { return domain_dim_; }
  std::size_t range_dim() const { return range_dim_; }

  Vec apply(const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != domain_dim_) {
      throw dimension_error("operator apply: expected length " + std::to_string(domain_dim_) + ", got " +
                            std::to_string(x.size()));
    }
    return apply_(x);
  }

  Vec adjoint(const Vec& u) const {
    if (static_cast<std::size_t>(u.size()) != range_dim_) {
      throw dimension_error("operator adjoint: expected length " + std::to_string(range_dim_) + ", got " +
                            std::to_string(u.size()));
    }
    return adjoint_(u);
  }

 private:
  std::size_t domain_dim_ = 0;
  std::size_t range_dim_ = 0;
  Map apply_;
  Map adjoint_;
};

inline LinearOperator identity_operator(std::size_t n) {
  auto id = [](const Vec& v) { return v; };
  return {n, n, id, id};
}

inline LinearOperator scaled(LinearOperator op, double factor) {
  const std::size_t n = op.domain_dim(), m = op.range_dim();
  auto shared = std::make_shared<const LinearOperator>(std::move(op));
  return {n, m, [shared, factor](const Vec& x) { return Vec(factor * shared->apply(x)); },
          [shared, factor](const Vec& u) { return Vec(factor * shared->adjoint(u)); }};
}

inline LinearOperator matrix_operator(std::shared_ptr<const Matrix> mat) {
  const auto m = static_cast<std::size_t>(mat->rows());
  const auto n = static_cast<std::size_t>(mat->cols());
  return {n, m, [mat](const Vec& x) { return Vec(*mat * x); },
          [mat](const Vec& u) { return Vec(mat->transpose() * u); }};
}

inline LinearOperator matrix_operator(Matrix mat) {
  return matrix_operator(std::make_shared<const Matrix>(std::move(mat)));
}

// Dense copy of an operator, built column by column.
inline Matrix materialize(const LinearOperator& op) {
  Matrix out(op.range_dim(), op.domain_dim());
  Vec e = Vec::Zero(static_cast<Eigen::Index>(op.domain_dim()));
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    e[k] = 1.0;
    out.col(k) = op.apply(e);
    e[k] = 0.0;
  }
  return out;
}

// --- Gaussian sensing -------------------------------------------------------

inline constexpr std::size_t kDefaultMaxEntries = std::size_t{1} << 27;

// iid N(0, scale^2) entries, filled row by row from the seed.
inline Matrix gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed, double scale = 1.0) {
  if (m == 0 || n == 0) throw dimension_error("gaussian matrix needs m >= 1 and n >= 1");
  Matrix g(m, n);
  Rng rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) g(i, j) = scale * rng.normal();
  }
  return g;
}

inline LinearOperator gaussian_sensing(std::size_t m, std::size_t n, std::uint64_t seed, double scale = 1.0,
                                       std::size_t max_entries = kDefaultMaxEntries) {
  if (m == 0 || n == 0) throw dimension_error("gaussian sensing needs m >= 1 and n >= 1");
  if (m > max_entries / n) {
    throw capacity_error("gaussian sensing " + std::to_string(m) + "x" + std::to_string(n) +
                         " exceeds memory budget of " + std::to_string(max_entries) + " entries");
  }
  return matrix_operator(gaussian_matrix(m, n, seed, scale));
}

// Independent Gaussian sensing of each tile x tile block of an image.
// Measurements are stacked tile by tile (tiles in row-major order, pixels
// row-major within a tile). Tile t uses seed derive_seed(seed, t).
inline LinearOperator tiled_gaussian_sensing(std::size_t rows, std::size_t cols, std::size_t tile,
                                             std::size_t m_per_tile, std::uint64_t seed, double scale = 1.0,
                                             std::size_t max_entries = kDefaultMaxEntries) {
  if (tile == 0 || rows % tile != 0 || cols % tile != 0) {
    throw dimension_error("image shape must be divisible by the tile size");
  }
  const std::size_t tiles_r = rows / tile, tiles_c = cols / tile, area = tile * tile;
  const std::size_t count = tiles_r * tiles_c;
  if (m_per_tile == 0) throw dimension_error("m_per_tile must be positive");
  if (m_per_tile > max_entries / area / count) throw capacity_error("tiled sensing exceeds memory budget");
  auto mats = std::make_shared<std::vector<Matrix>>();
  for (std::size_t t = 0; t < count; ++t) mats->push_back(gaussian_matrix(m_per_tile, area, derive_seed(seed, t), scale));

  auto gather = [=](const Vec& x, std::size_t t, Vec& patch) {
    const std::size_t r0 = (t / tiles_c) * tile, c0 = (t % tiles_c) * tile;
    for (std::size_t r = 0; r < tile; ++r) {
      patch.segment(static_cast<Eigen::Index>(r * tile), static_cast<Eigen::Index>(tile)) =
          x.segment(static_cast<Eigen::Index>((r0 + r) * cols + c0), static_cast<Eigen::Index>(tile));
    }
  };
  auto scatter = [=](const Vec& patch, std::size_t t, Vec& x) {
    const std::size_t r0 = (t / tiles_c) * tile, c0 = (t % tiles_c) * tile;
    for (std::size_t r = 0; r < tile; ++r) {
      x.segment(static_cast<Eigen::Index>((r0 + r) * cols + c0), static_cast<Eigen::Index>(tile)) =
          patch.segment(static_cast<Eigen::Index>(r * tile), static_cast<Eigen::Index>(tile));
    }
  };
  const auto mpt = static_cast<Eigen::Index>(m_per_tile);
  auto apply = [=](const Vec& x) {
    Vec out(static_cast<Eigen::Index>(count) * mpt);
    Vec patch(static_cast<Eigen::Index>(area));
    for (std::size_t t = 0; t < count; ++t) {
      gather(x, t, patch);
      out.segment(static_cast<Eigen::Index>(t) * mpt, mpt).noalias() = (*mats)[t] * patch;
    }
    return out;
  };
  auto adjoint = [=](const Vec& u) {
    Vec out(static_cast<Eigen::Index>(rows * cols));
    Vec patch(static_cast<Eigen::Index>(area));
    for (std::size_t t = 0; t < count; ++t) {
      patch.noalias() = (*mats)[t].transpose() * u.segment(static_cast<Eigen::Index>(t) * mpt, mpt);
      scatter(patch, t, out);
    }
    return out;
  };
  return {rows * cols, count * m_per_tile, apply, adjoint};
}

// --- Gaussian blur ----------------------------------------------------------

struct BlurKernel {
  double variance = 1.0;
  std::size_t radius = 0;
  // (2 radius + 1)^2 taps, row-major, centred.
  std::vector<double> taps;

  std::size_t width() const { return 2 * radius + 1; }
  double tap(long dr, long dc) const {
    const auto r = static_cast<long>(radius);
    return taps[static_cast<std::size_t>((dr + r) * static_cast<long>(width()) + dc + r)];
  }
};

// Radius used when none is given: three standard deviations, rounded up.
inline std::size_t default_blur_radius(double variance) {
  return 3 * static_cast<std::size_t>(std::ceil(std::sqrt(variance)));
}

inline BlurKernel make_blur_kernel(double variance, std::size_t radius) {
  if (!(variance > 0.0)) throw parameter_error("blur variance must be positive");
  BlurKernel k;
  k.variance = variance;
  k.radius = radius;
  const std::size_t w = k.width();
  k.taps.resize(w * w);
  double total = 0.0;
  const auto r = static_cast<long>(radius);
  for (long i = -r; i <= r; ++i) {
    for (long j = -r; j <= r; ++j) {
      const double v = std::exp(-static_cast<double>(i * i + j * j) / (2.0 * variance));
      k.taps[static_cast<std::size_t>((i + r) * static_cast<long>(w) + (j + r))] = v;
      total += v;
    }
  }
  for (double& t : k.taps) t /= total;
  return k;
}

namespace detail {

// out(p) = sum_d kernel(d) * in(p - d), circular; flip = true uses kernel(-d).
inline Vec circular_convolve(const Vec& in, std::size_t rows, std::size_t cols, const BlurKernel& k, bool flip) {
  Vec out = Vec::Zero(in.size());
  const auto r = static_cast<long>(k.radius);
  const auto nr = static_cast<long>(rows), nc = static_cast<long>(cols);
  for (long dr = -r; dr <= r; ++dr) {
    for (long dc = -r; dc <= r; ++dc) {
      const double w = flip ? k.tap(-dr, -dc) : k.tap(dr, dc);
      if (w == 0.0) continue;
      for (long i = 0; i < nr; ++i) {
        const long si = ((i - dr) % nr + nr) % nr;
        const double* src = in.data() + si * nc;
        double* dst = out.data() + i * nc;
        const long shift = ((dc % nc) + nc) % nc;
        // dst[j] += w * src[(j - dc) mod nc]
        for (long j = 0; j < shift; ++j) dst[j] += w * src[j - shift + nc];
        for (long j = shift; j < nc; ++j) dst[j] += w * src[j - shift];
      }
    }
  }
  return out;
}

}  // namespace detail

// Circular 2-D convolution with a normalized Gaussian kernel.
inline LinearOperator gaussian_blur(std::size_t rows, std::size_t cols, double variance, std::size_t radius) {
  if (rows == 0 || cols == 0) throw dimension_error("empty image shape");
  if (2 * radius >= std::min(rows, cols)) {
    throw kernel_size_error("blur radius " + std::to_string(radius) + " too large for image");
  }
  auto kernel = std::make_shared<const BlurKernel>(make_blur_kernel(variance, radius));
  return {rows * cols, rows * cols,
          [=](const Vec& x) { return detail::circular_convolve(x, rows, cols, *kernel, false); },
          [=](const Vec& u) { return detail::circular_convolve(u, rows, cols, *kernel, true); }};
}

inline LinearOperator gaussian_blur(std::size_t rows, std::size_t cols, double variance) {
  return gaussian_blur(rows, cols, variance, default_blur_radius(variance));
}

// --- Compositions -----------------------------------------------------------

// A = L W: synthesize an image from coefficients, then observe it.
inline LinearOperator compose_with_synthesis(LinearOperator observation, const CoeffLayout& layout) {
  if (observation.domain_dim() != layout.size()) {
    throw dimension_error("observation domain " + std::to_string(observation.domain_dim()) +
                          " does not match layout size " + std::to_string(layout.size()));
  }
  auto obs = std::make_shared<const LinearOperator>(std::move(observation));
  return {layout.size(), obs->range_dim(),
          [obs, layout](const Vec& theta) {
            Vec x = theta;
            inverse_in_place(x, layout);
            return obs->apply(x);
          },
          [obs, layout](const Vec& u) {
            Vec x = obs->adjoint(u);
            forward_in_place(x, layout);
            return x;
          }};
}

// Column-replicated operator: apply(v) = A(collapse(v)), adjoint(u) = expand(A^T u).
inline LinearOperator replicate_columns(LinearOperator a, std::shared_ptr<const ReplicationMap> repmap) {
  if (repmap->original_dim() != a.domain_dim()) {
    throw index_error("replication map covers " + std::to_string(repmap->original_dim()) +
                      " coefficients but operator domain is " + std::to_string(a.domain_dim()));
  }
  for (std::size_t i : repmap->replica_of()) {
    if (i >= a.domain_dim()) throw index_error("replication map index out of range");
  }
  auto op = std::make_shared<const LinearOperator>(std::move(a));
  return {repmap->total_replicas(), op->range_dim(),
          [op, repmap](const Vec& v) { return op->apply(repmap->collapse(v)); },
          [op, repmap](const Vec& u) { return repmap->expand(op->adjoint(u)); }};
}

inline LinearOperator replicate_columns(LinearOperator a, const ReplicationMap& repmap) {
  return replicate_columns(std::move(a), std::make_shared<const ReplicationMap>(repmap));
}

// Worst relative violation of <Ax, u> = <x, A^T u> over random pairs.
inline double adjoint_mismatch(const LinearOperator& op, int pairs, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const Vec x = rng.normal_vector(static_cast<Eigen::Index>(op.domain_dim()));
    const Vec u = rng.normal_vector(static_cast<Eigen::Index>(op.range_dim()));
    const double lhs = op.apply(x).dot(u);
    const double rhs = x.dot(op.adjoint(u));
    worst = std::max(worst, std::abs(lhs - rhs) / (x.norm() * u.norm()));
  }
  return worst;
}

// Largest eigenvalue of A^T A by power iteration.
inline double spectral_norm_sq(const LinearOperator& op, int iterations = 20, std::uint64_t seed = 7) {
  Rng rng(seed);
  Vec v = rng.normal_vector(static_cast<Eigen::Index>(op.domain_dim()));
  v.normalize();
  double estimate = 0.0;
  for (int k = 0; k < iterations; ++k) {
    Vec w = op.adjoint(op.apply(v));
    estimate = w.norm();
    if (estimate == 0.0) return 0.0;
    v = w / estimate;
  }
  return estimate;
}

}  // namespace wavegroup
