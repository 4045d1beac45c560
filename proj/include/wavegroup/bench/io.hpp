#pragma once

// PGM images and CSV result tables.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wavegroup/dwt.hpp"
#include "wavegroup/error.hpp"

namespace wavegroup::bench {

namespace detail {

inline std::string pgm_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}

inline std::size_t pgm_number(std::istream& in, const std::string& path) {
  const std::string tok = pgm_token(in);
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
    throw io_error("malformed PGM header in '" + path + "'");
  }
  return std::stoul(tok);
}

}  // namespace detail

// Reads binary (P5) or ASCII (P2) PGM; intensities scaled to [0,1].
inline Tensor read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "'");
  const std::string magic = detail::pgm_token(in);
  if (magic != "P5" && magic != "P2") throw io_error("'" + path + "' is not a PGM file");
  const std::size_t cols = detail::pgm_number(in, path);
  const std::size_t rows = detail::pgm_number(in, path);
  const std::size_t maxval = detail::pgm_number(in, path);
  if (rows == 0 || cols == 0 || maxval == 0 || maxval > 65535) throw io_error("bad PGM header in '" + path + "'");

  Vec x(static_cast<Eigen::Index>(rows * cols));
  if (magic == "P2") {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = static_cast<double>(detail::pgm_number(in, path));
  } else {
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> buf(rows * cols * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) throw io_error("truncated PGM data in '" + path + "'");
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const auto k = static_cast<std::size_t>(i) * bytes;
      x[i] = bytes == 1 ? buf[k] : (buf[k] << 8 | buf[k + 1]);
    }
  }
  x /= static_cast<double>(maxval);
  return Tensor::image(rows, cols, std::move(x));
}

// Writes 8-bit binary PGM; values are clamped to [0,1] first.
inline void write_pgm(const std::string& path, const Tensor& image) {
  if (image.ndim() != 2) throw dimension_error("write_pgm needs a 2-D image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  std::vector<unsigned char> buf(image.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const double v = std::clamp(image.data[static_cast<Eigen::Index>(i)], 0.0, 1.0);
    buf[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw io_error("failed writing '" + path + "'");
}

// Centre crop of a 2-D image.
inline Tensor crop_center(const Tensor& image, std::size_t rows, std::size_t cols) {
  if (rows > image.rows() || cols > image.cols()) throw dimension_error("crop larger than image");
  const std::size_t r0 = (image.rows() - rows) / 2, c0 = (image.cols() - cols) / 2;
  Vec x(static_cast<Eigen::Index>(rows * cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) x[static_cast<Eigen::Index>(r * cols + c)] = image.at(r0 + r, c0 + c);
  return Tensor::image(rows, cols, std::move(x));
}

// Shortest-round-trip-ish formatting that is stable across runs.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string fmt(std::optional<double> v) { return v ? fmt(*v) : std::string(); }

struct ResultRow {
  std::string experiment;
  std::string method;
  double sigma2 = 0.0;
  std::size_t m = 0;
  std::size_t trial = 0;
  double lambda = 0.0;
  std::optional<double> tau;
  double err_coeff = 0.0;
  double mse_image = 0.0;
  int iters = 0;
  std::optional<double> seconds;
};

inline constexpr const char* kResultHeader = "experiment,method,sigma2,m,trial,lambda,tau,err_coeff,mse_image,iters,seconds";

inline std::string to_csv(const ResultRow& r) {
  std::ostringstream os;
  os << r.experiment << ',' << r.method << ',' << fmt(r.sigma2) << ',' << r.m << ',' << r.trial << ','
     << fmt(r.lambda) << ',' << fmt(r.tau) << ',' << fmt(r.err_coeff) << ',' << fmt(r.mse_image) << ',' << r.iters
     << ',' << fmt(r.seconds);
  return os.str();
}

inline void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << kResultHeader << '\n';
  for (const ResultRow& r : rows) out << to_csv(r) << '\n';
}

// Generic table: header plus already formatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline void write_table_csv(const std::string& path, const Table& t) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

}  // namespace wavegroup::bench
