#pragma once

// Synthetic test signals and measurement noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "wavegroup/dwt.hpp"
#include "wavegroup/error.hpp"
#include "wavegroup/random.hpp"

namespace wavegroup::bench {

// Piecewise-constant signal of length n. The number of jumps is uniform on
// {0..max_jumps}; jump positions are distinct points of {1..n-1}; each
// segment takes an independent N(0,1) level.
inline Tensor gen_piecewise_constant(std::size_t n, std::size_t max_jumps, std::uint64_t seed) {
  if (n == 0) throw dimension_error("signal length must be positive");
  if (max_jumps >= n) throw parameter_error("max_jumps must be smaller than the signal length");
  Rng rng(seed);
  const std::size_t jumps = static_cast<std::size_t>(rng.below(max_jumps + 1));
  // partial Fisher-Yates over {1..n-1}
  std::vector<std::size_t> pool(n - 1);
  std::iota(pool.begin(), pool.end(), std::size_t{1});
  for (std::size_t k = 0; k < jumps; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(pool.size() - k));
    std::swap(pool[k], pool[j]);
  }
  std::vector<std::size_t> cuts(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(jumps));
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(n);

  Vec x(static_cast<Eigen::Index>(n));
  std::size_t start = 0;
  for (std::size_t stop : cuts) {
    const double level = rng.normal();
    for (std::size_t i = start; i < stop; ++i) x[static_cast<Eigen::Index>(i)] = level;
    start = stop;
  }
  return Tensor::signal(std::move(x));
}

// Constant N(0,1) background with a uniform number of rectangles in
// [min_rects, max_rects]. Each rectangle has sides between a quarter and a half
// of the image side, a random position, and an N(0,1) intensity; later
// rectangles paint over earlier ones.
inline Tensor gen_toy_image(std::size_t rows, std::size_t cols, std::uint64_t seed, std::size_t min_rects = 2,
                            std::size_t max_rects = 5) {
  if (rows < 4 || cols < 4) throw dimension_error("toy image must be at least 4x4");
  if (min_rects > max_rects) throw parameter_error("min_rects > max_rects");
  Rng rng(seed);
  Vec x = Vec::Constant(static_cast<Eigen::Index>(rows * cols), rng.normal());
  const std::size_t count = min_rects + static_cast<std::size_t>(rng.below(max_rects - min_rects + 1));
  auto side = [&](std::size_t n) { return n / 4 + static_cast<std::size_t>(rng.below(n / 4 + 1)); };
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t h = side(rows), w = side(cols);
    const std::size_t r0 = static_cast<std::size_t>(rng.below(rows - h + 1));
    const std::size_t c0 = static_cast<std::size_t>(rng.below(cols - w + 1));
    const double level = rng.normal();
    for (std::size_t r = r0; r < r0 + h; ++r)
      for (std::size_t c = c0; c < c0 + w; ++c) x[static_cast<Eigen::Index>(r * cols + c)] = level;
  }
  return Tensor::image(rows, cols, std::move(x));
}

// x + N(0, variance) noise.
inline Vec add_noise(const Vec& x, double variance, std::uint64_t seed) {
  if (variance < 0.0) throw parameter_error("noise variance must be nonnegative");
  if (variance == 0.0) return x;
  Rng rng(seed);
  return x + rng.normal_vector(x.size(), std::sqrt(variance));
}

}  // namespace wavegroup::bench
