#pragma once

// Orthonormal multilevel Haar transform for signals and images.
//
// Coefficients are stored in the usual pyramid (Mallat) order. For a 1-D
// signal of length n decomposed over J levels:
//
//   [ scaling (n/2^J) | detail J (n/2^J) | detail J-1 | ... | detail 1 (n/2) ]
//
// Level 1 is the finest scale. For a rows x cols image the coefficient array
// has the same shape as the image and is flattened row-major. At level l the
// subbands have size (rows>>l) x (cols>>l) and sit at
//
//   vertical   : rows [0, rs)   cols [cs, 2cs)   high-pass along rows
//   horizontal : rows [rs, 2rs) cols [0, cs)     high-pass along columns
//   diagonal   : rows [rs, 2rs) cols [cs, 2cs)   high-pass along both
//
// with rs = rows>>l, cs = cols>>l, and the scaling block in the top-left
// corner of size (rows>>J) x (cols>>J).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavegroup/error.hpp"

namespace wavegroup {

using Vec = Eigen::VectorXd;

// Real signal (1 dimension) or image (2 dimensions, row-major).
struct Tensor {
  Vec data;
  std::vector<std::size_t> shape;

  static Tensor signal(Vec values) {
    Tensor t;
    t.shape = {static_cast<std::size_t>(values.size())};
    t.data = std::move(values);
    return t;
  }

  static Tensor image(std::size_t rows, std::size_t cols, Vec values) {
    if (static_cast<std::size_t>(values.size()) != rows * cols) {
      throw dimension_error("image data length does not match rows*cols");
    }
    Tensor t;
    t.shape = {rows, cols};
    t.data = std::move(values);
    return t;
  }

  std::size_t ndim() const { return shape.size(); }
  std::size_t size() const { return static_cast<std::size_t>(data.size()); }
  std::size_t rows() const { return shape.at(0); }
  std::size_t cols() const { return shape.size() == 2 ? shape[1] : 1; }

  double at(std::size_t r, std::size_t c) const { return data[static_cast<Eigen::Index>(r * cols() + c)]; }
};

enum class Orientation { scaling, detail, horizontal, vertical, diagonal };

inline const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::scaling: return "scaling";
    case Orientation::detail: return "detail";
    case Orientation::horizontal: return "horizontal";
    case Orientation::vertical: return "vertical";
    case Orientation::diagonal: return "diagonal";
  }
  return "?";
}

constexpr Orientation kImageOrientations[3] = {Orientation::horizontal, Orientation::vertical,
                                               Orientation::diagonal};

// Position of one coefficient in the pyramid. level == 0 marks the scaling
// block; for 1-D layouts col is always 0 and orientation is `detail`.
struct CoeffPosition {
  int level = 0;
  Orientation orientation = Orientation::scaling;
  std::size_t row = 0;
  std::size_t col = 0;

  bool operator==(const CoeffPosition&) const = default;
};

// Rectangle of a subband inside the flattened coefficient array.
struct Subband {
  int level;
  Orientation orientation;
  std::size_t row0, col0, rows, cols;

  std::size_t size() const { return rows * cols; }
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

inline int log2_exact(std::size_t n) { return std::countr_zero(n); }

// Deepest decomposition allowed for the shape.
inline int max_levels(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw dimension_error("empty shape");
  const std::size_t smallest = *std::min_element(shape.begin(), shape.end());
  if (!is_power_of_two(smallest)) throw dimension_error("dimension is not a power of two");
  return log2_exact(smallest);
}

class CoeffLayout {
 public:
  CoeffLayout() = default;

  CoeffLayout(std::vector<std::size_t> shape, int levels) : shape_(std::move(shape)), levels_(levels) {
    if (shape_.empty() || shape_.size() > 2) throw dimension_error("only 1-D and 2-D layouts are supported");
    for (std::size_t d : shape_) {
      if (!is_power_of_two(d)) throw dimension_error("dimension " + std::to_string(d) + " is not a power of two");
    }
    if (levels_ < 0 || levels_ > max_levels(shape_)) {
      throw dimension_error("levels=" + std::to_string(levels_) + " too deep for shape");
    }
  }

  // Full-depth layout.
  static CoeffLayout full(std::vector<std::size_t> shape) {
    const int j = max_levels(shape);
    return CoeffLayout(std::move(shape), j);
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  int levels() const { return levels_; }
  bool is_2d() const { return shape_.size() == 2; }
  std::size_t rows() const { return shape_.at(0); }
  std::size_t cols() const { return is_2d() ? shape_[1] : 1; }
  std::size_t size() const { return is_2d() ? shape_[0] * shape_[1] : shape_.at(0); }

  std::size_t scaling_rows() const { return rows() >> levels_; }
  std::size_t scaling_cols() const { return is_2d() ? cols() >> levels_ : 1; }
  std::size_t scaling_size() const { return scaling_rows() * scaling_cols(); }
  std::size_t detail_count() const { return size() - scaling_size(); }

  // Subband rectangle; `orientation` is ignored for 1-D layouts.
  Subband subband(int level, Orientation orientation = Orientation::detail) const {
    if (level < 1 || level > levels_) throw layout_error("level out of range");
    if (!is_2d()) {
      const std::size_t len = rows() >> level;
      return {level, Orientation::detail, len, 0, len, 1};
    }
    const std::size_t rs = rows() >> level;
    const std::size_t cs = cols() >> level;
    switch (orientation) {
      case Orientation::vertical: return {level, orientation, 0, cs, rs, cs};
      case Orientation::horizontal: return {level, orientation, rs, 0, rs, cs};
      case Orientation::diagonal: return {level, orientation, rs, cs, rs, cs};
      default: throw layout_error("2-D subbands need horizontal, vertical or diagonal orientation");
    }
  }

  // All detail subbands, coarsest first.
  std::vector<Subband> detail_subbands() const {
    std::vector<Subband> out;
    for (int l = levels_; l >= 1; --l) {
      if (is_2d()) {
        for (Orientation o : kImageOrientations) out.push_back(subband(l, o));
      } else {
        out.push_back(subband(l));
      }
    }
    return out;
  }

  std::size_t index(const CoeffPosition& p) const {
    if (p.level == 0) {
      if (p.row >= scaling_rows() || p.col >= scaling_cols()) throw layout_error("scaling position out of range");
      return p.row * cols() + p.col;
    }
    const Subband b = subband(p.level, p.orientation);
    if (p.row >= b.rows || p.col >= b.cols) throw layout_error("position out of range for subband");
    return (b.row0 + p.row) * cols() + b.col0 + p.col;
  }

  CoeffPosition locate(std::size_t flat) const {
    if (flat >= size()) throw layout_error("flat index out of range");
    const std::size_t r = flat / cols();
    const std::size_t c = flat % cols();
    if (!is_2d()) {
      if (r < scaling_rows()) return {0, Orientation::scaling, r, 0};
      // detail level l occupies [n>>l, n>>(l-1))
      const int l = log2_exact(rows()) - (std::bit_width(r) - 1);
      return {l, Orientation::detail, r - (rows() >> l), 0};
    }
    if (r < scaling_rows() && c < scaling_cols()) return {0, Orientation::scaling, r, c};
    // The finest subband containing (r, c) is set by the larger of the two
    // relative coordinates.
    const int row_level = r < scaling_rows() ? levels_ + 1 : log2_exact(rows()) - (std::bit_width(r) - 1);
    const int col_level = c < scaling_cols() ? levels_ + 1 : log2_exact(cols()) - (std::bit_width(c) - 1);
    const int l = std::min(row_level, col_level);
    const std::size_t rs = rows() >> l;
    const std::size_t cs = cols() >> l;
    const bool high_row = r >= rs;
    const bool high_col = c >= cs;
    Orientation o = high_row && high_col ? Orientation::diagonal
                    : high_row          ? Orientation::horizontal
                                        : Orientation::vertical;
    return {l, o, high_row ? r - rs : r, high_col ? c - cs : c};
  }

  bool operator==(const CoeffLayout&) const = default;

 private:
  std::vector<std::size_t> shape_{1};
  int levels_ = 0;
};

struct CoeffVector {
  Vec data;
  CoeffLayout layout;
};

namespace detail {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

// One analysis step on `len` entries spaced `stride` apart.
inline void haar_analysis_step(double* x, std::size_t len, std::size_t stride, std::vector<double>& scratch) {
  const std::size_t half = len / 2;
  scratch.resize(len);
  for (std::size_t k = 0; k < half; ++k) {
    const double a = x[(2 * k) * stride];
    const double b = x[(2 * k + 1) * stride];
    scratch[k] = (a + b) * kInvSqrt2;
    scratch[half + k] = (a - b) * kInvSqrt2;
  }
  for (std::size_t k = 0; k < len; ++k) x[k * stride] = scratch[k];
}

inline void haar_synthesis_step(double* x, std::size_t len, std::size_t stride, std::vector<double>& scratch) {
  const std::size_t half = len / 2;
  scratch.resize(len);
  for (std::size_t k = 0; k < half; ++k) {
    const double a = x[k * stride];
    const double d = x[(half + k) * stride];
    scratch[2 * k] = (a + d) * kInvSqrt2;
    scratch[2 * k + 1] = (a - d) * kInvSqrt2;
  }
  for (std::size_t k = 0; k < len; ++k) x[k * stride] = scratch[k];
}

inline void check_layout(const CoeffVector& theta) {
  if (static_cast<std::size_t>(theta.data.size()) != theta.layout.size()) {
    throw layout_error("coefficient data length " + std::to_string(theta.data.size()) +
                       " does not match layout size " + std::to_string(theta.layout.size()));
  }
}

}  // namespace detail

// In-place transforms on raw row-major storage. These are the hot paths used
// by the composed operators.
inline void forward_in_place(Vec& x, const CoeffLayout& layout) {
  std::vector<double> scratch;
  double* p = x.data();
  const std::size_t cols = layout.cols();
  if (!layout.is_2d()) {
    for (std::size_t len = layout.rows(), l = 0; l < static_cast<std::size_t>(layout.levels()); ++l, len /= 2) {
      detail::haar_analysis_step(p, len, 1, scratch);
    }
    return;
  }
  std::size_t rs = layout.rows(), cs = layout.cols();
  for (int l = 0; l < layout.levels(); ++l, rs /= 2, cs /= 2) {
    for (std::size_t r = 0; r < rs; ++r) detail::haar_analysis_step(p + r * cols, cs, 1, scratch);
    for (std::size_t c = 0; c < cs; ++c) detail::haar_analysis_step(p + c, rs, cols, scratch);
  }
}

inline void inverse_in_place(Vec& x, const CoeffLayout& layout) {
  std::vector<double> scratch;
  double* p = x.data();
  const std::size_t cols = layout.cols();
  const int levels = layout.levels();
  if (!layout.is_2d()) {
    for (int l = levels; l >= 1; --l) detail::haar_synthesis_step(p, layout.rows() >> (l - 1), 1, scratch);
    return;
  }
  for (int l = levels; l >= 1; --l) {
    const std::size_t rs = layout.rows() >> (l - 1);
    const std::size_t cs = layout.cols() >> (l - 1);
    for (std::size_t c = 0; c < cs; ++c) detail::haar_synthesis_step(p + c, rs, cols, scratch);
    for (std::size_t r = 0; r < rs; ++r) detail::haar_synthesis_step(p + r * cols, cs, 1, scratch);
  }
}

// Analysis; levels < 0 selects the full depth.
inline CoeffVector forward(const Tensor& x, int levels = -1) {
  if (static_cast<std::size_t>(x.data.size()) == 0 || x.shape.empty()) throw dimension_error("empty tensor");
  std::size_t prod = 1;
  for (std::size_t d : x.shape) prod *= d;
  if (prod != x.size()) throw dimension_error("tensor shape does not match data length");
  CoeffLayout layout = levels < 0 ? CoeffLayout::full(x.shape) : CoeffLayout(x.shape, levels);
  CoeffVector out{x.data, layout};
  forward_in_place(out.data, layout);
  return out;
}

inline Tensor inverse(const CoeffVector& theta) {
  detail::check_layout(theta);
  Tensor out;
  out.shape = theta.layout.shape();
  out.data = theta.data;
  inverse_in_place(out.data, theta.layout);
  return out;
}

inline CoeffVector forward2d(const Tensor& image, int levels = -1) {
  if (image.ndim() != 2) throw dimension_error("forward2d expects an image");
  return forward(image, levels);
}

inline Tensor inverse2d(const CoeffVector& theta) {
  if (!theta.layout.is_2d()) throw layout_error("inverse2d expects a 2-D layout");
  return inverse(theta);
}

// Synthesis of the k-th basis vector.
inline Tensor haar_atom(const CoeffLayout& layout, std::size_t k) {
  if (k >= layout.size()) throw index_error("atom index out of range");
  CoeffVector e{Vec::Zero(static_cast<Eigen::Index>(layout.size())), layout};
  e.data[static_cast<Eigen::Index>(k)] = 1.0;
  return inverse(e);
}

}  // namespace wavegroup
