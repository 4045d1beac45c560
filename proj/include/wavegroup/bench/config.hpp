#pragma once

// Experiment configuration: a plain `key = value` text file, '#' starts a
// comment. Lists are comma separated. See configs/ for documented examples.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wavegroup/error.hpp"
#include "wavegroup/grouping.hpp"

namespace wavegroup::bench {

enum class Experiment { cs_image, deblur_image, noise_sweep_2d, noise_sweep_1d, measurement_sweep_1d, penalty_ratio };

inline Experiment parse_experiment(const std::string& s) {
  if (s == "cs_image") return Experiment::cs_image;
  if (s == "deblur_image") return Experiment::deblur_image;
  if (s == "noise_sweep_2d") return Experiment::noise_sweep_2d;
  if (s == "noise_sweep_1d") return Experiment::noise_sweep_1d;
  if (s == "measurement_sweep_1d") return Experiment::measurement_sweep_1d;
  if (s == "penalty_ratio") return Experiment::penalty_ratio;
  throw parameter_error("unknown experiment '" + s + "'");
}

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::cs_image: return "cs_image";
    case Experiment::deblur_image: return "deblur_image";
    case Experiment::noise_sweep_2d: return "noise_sweep_2d";
    case Experiment::noise_sweep_1d: return "noise_sweep_1d";
    case Experiment::measurement_sweep_1d: return "measurement_sweep_1d";
    case Experiment::penalty_ratio: return "penalty_ratio";
  }
  return "?";
}

// L: lasso. OGLR: overlap group lasso with replicated columns. OGL: overlap
// group lasso with masters coupled to replicas.
enum class Method { L, OGLR, OGL };

inline Method parse_method(const std::string& s) {
  if (s == "L" || s == "lasso") return Method::L;
  if (s == "OGLR" || s == "oglr") return Method::OGLR;
  if (s == "OGL" || s == "ogl") return Method::OGL;
  throw parameter_error("unknown method '" + s + "'");
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::L: return "L";
    case Method::OGLR: return "OGLR";
    case Method::OGL: return "OGL";
  }
  return "?";
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct ExperimentConfig {
  Experiment experiment = Experiment::noise_sweep_1d;
  std::vector<Method> methods{Method::L, Method::OGLR, Method::OGL};
  Scheme grouping = Scheme::pc4;

  // signal / image geometry; levels < 0 means full depth
  std::size_t size = 1024;
  int levels = -1;

  // measurements
  std::size_t m = 800;
  std::vector<std::size_t> m_list;  // measurement sweep
  bool normalized_sensing = false;  // entries N(0, 1/m) instead of N(0, 1)
  std::size_t tile = 64;
  std::size_t m_per_tile = 800;
  double blur_variance = 1.0;
  int blur_radius = -1;  // < 0: three standard deviations

  // noise
  double noise_variance = 1.0;
  std::vector<double> sigma2_list;  // noise sweep

  // signals
  std::size_t max_jumps = 5;
  std::size_t min_rects = 2;
  std::size_t max_rects = 5;

  // tuning grids
  std::size_t lambda_points = 15;
  double lambda_min_frac = 1e-4;
  double lambda_max_frac = 1.0;
  std::size_t tau_points = 7;
  double tau_step_exponent = 0.5;  // tau^2 grid: 10^(step k) * |A|^2
  std::size_t tau_default_index = 2;
  std::size_t path_patience = 2;  // 0 evaluates the whole grid

  // solver
  int max_iters = 2000;
  double rel_obj_tol = 1e-6;
  // the coupled problem is stiff for large tau and needs its own limits
  int ogl_max_iters = 20000;
  double ogl_rel_obj_tol = 1e-9;

  // penalty ratio
  std::string scramble = "subband";
  std::vector<Scheme> ratio_schemes{Scheme::pc4, Scheme::pc2};

  // measurement sweep summary
  double error_threshold_frac = 0.1;

  std::size_t trials = 20;
  std::uint64_t seed = 1;
  std::string image;
  std::size_t crop = 0;  // > 0: use the centred crop x crop sub-image
  std::string out = "out";
  bool record_timing = false;
  std::size_t threads = 1;
};

inline std::vector<double> default_sigma2_list() {
  std::vector<double> v;
  for (int k = 0; k <= 10; ++k) v.push_back(k / 10.0);
  return v;
}

inline std::vector<std::size_t> default_m_list() {
  std::vector<std::size_t> v;
  for (std::size_t m = 50; m <= 500; m += 50) v.push_back(m);
  return v;
}

// Defaults that differ by experiment.
inline ExperimentConfig defaults_for(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::cs_image:
      c.methods = {Method::L, Method::OGLR};
      c.size = 128;
      c.noise_variance = 1.0;
      c.trials = 1;
      c.lambda_points = 41;
      break;
    case Experiment::deblur_image:
      c.methods = {Method::L, Method::OGLR};
      c.size = 128;
      c.noise_variance = 0.1;
      c.trials = 1;
      c.lambda_points = 41;
      break;
    case Experiment::noise_sweep_2d:
      c.size = 32;
      c.m = 800;
      c.grouping = Scheme::pc4;
      break;
    case Experiment::noise_sweep_1d:
      c.size = 1024;
      c.m = 800;
      c.grouping = Scheme::pc2_1d;
      break;
    case Experiment::measurement_sweep_1d:
      c.methods = {Method::L, Method::OGLR};
      c.size = 1024;
      c.grouping = Scheme::pc2_1d;
      c.normalized_sensing = true;
      c.noise_variance = 1e-4;
      break;
    case Experiment::penalty_ratio:
      c.size = 128;
      c.levels = 4;
      c.trials = 1;
      break;
  }
  c.sigma2_list = default_sigma2_list();
  c.m_list = default_m_list();
  return c;
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw parameter_error("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw parameter_error("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

inline std::size_t to_count(const std::string& key, const std::string& v) {
  const long long d = to_int(key, v);
  if (d < 0) throw parameter_error("config key '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(d);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw parameter_error("config key '" + key + "': expected true/false, got '" + v + "'");
}

}  // namespace detail

inline std::vector<Method> parse_methods(const std::string& v) {
  std::vector<Method> out;
  for (const auto& s : split_list(v)) out.push_back(parse_method(s));
  return out;
}

// Apply one key/value pair. Unknown keys are errors.
inline void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& v) {
  using namespace detail;
  if (key == "experiment") {
    c.experiment = parse_experiment(v);
  } else if (key == "methods") {
    c.methods = parse_methods(v);
  } else if (key == "grouping") {
    c.grouping = parse_scheme(v);
  } else if (key == "size") {
    c.size = to_count(key, v);
  } else if (key == "levels") {
    c.levels = static_cast<int>(to_int(key, v));
  } else if (key == "m") {
    c.m = to_count(key, v);
  } else if (key == "m_list") {
    c.m_list.clear();
    for (const auto& s : split_list(v)) c.m_list.push_back(to_count(key, s));
  } else if (key == "sensing") {
    if (v != "unit" && v != "normalized") throw parameter_error("sensing must be 'unit' or 'normalized'");
    c.normalized_sensing = v == "normalized";
  } else if (key == "tile") {
    c.tile = to_count(key, v);
  } else if (key == "m_per_tile") {
    c.m_per_tile = to_count(key, v);
  } else if (key == "blur_variance") {
    c.blur_variance = to_double(key, v);
  } else if (key == "blur_radius") {
    c.blur_radius = static_cast<int>(to_int(key, v));
  } else if (key == "noise_variance") {
    c.noise_variance = to_double(key, v);
  } else if (key == "sigma2_list") {
    c.sigma2_list.clear();
    for (const auto& s : split_list(v)) c.sigma2_list.push_back(to_double(key, s));
  } else if (key == "max_jumps") {
    c.max_jumps = to_count(key, v);
  } else if (key == "min_rects") {
    c.min_rects = to_count(key, v);
  } else if (key == "max_rects") {
    c.max_rects = to_count(key, v);
  } else if (key == "lambda_points") {
    c.lambda_points = to_count(key, v);
  } else if (key == "lambda_min_frac") {
    c.lambda_min_frac = to_double(key, v);
  } else if (key == "lambda_max_frac") {
    c.lambda_max_frac = to_double(key, v);
  } else if (key == "tau_points") {
    c.tau_points = to_count(key, v);
  } else if (key == "tau_step_exponent") {
    c.tau_step_exponent = to_double(key, v);
  } else if (key == "tau_default_index") {
    c.tau_default_index = to_count(key, v);
  } else if (key == "path_patience") {
    c.path_patience = to_count(key, v);
  } else if (key == "max_iters") {
    c.max_iters = static_cast<int>(to_int(key, v));
  } else if (key == "rel_obj_tol") {
    c.rel_obj_tol = to_double(key, v);
  } else if (key == "ogl_max_iters") {
    c.ogl_max_iters = static_cast<int>(to_int(key, v));
  } else if (key == "ogl_rel_obj_tol") {
    c.ogl_rel_obj_tol = to_double(key, v);
  } else if (key == "scramble") {
    if (v != "subband" && v != "all") throw parameter_error("scramble must be 'subband' or 'all'");
    c.scramble = v;
  } else if (key == "ratio_schemes") {
    c.ratio_schemes.clear();
    for (const auto& s : split_list(v)) c.ratio_schemes.push_back(parse_scheme(s));
  } else if (key == "error_threshold_frac") {
    c.error_threshold_frac = to_double(key, v);
  } else if (key == "trials") {
    c.trials = to_count(key, v);
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(to_int(key, v));
  } else if (key == "image") {
    c.image = v;
  } else if (key == "crop") {
    c.crop = to_count(key, v);
  } else if (key == "out") {
    c.out = v;
  } else if (key == "record_timing") {
    c.record_timing = to_bool(key, v);
  } else if (key == "threads") {
    c.threads = std::max<std::size_t>(1, to_count(key, v));
  } else {
    throw parameter_error("unknown config key '" + key + "'");
  }
}

inline std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& is) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw parameter_error("config line " + std::to_string(lineno) + ": expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

inline void validate(const ExperimentConfig& c) {
  if (c.methods.empty()) throw parameter_error("method set is empty");
  if (c.lambda_points == 0) throw parameter_error("lambda grid is empty");
  if (c.tau_points == 0) throw parameter_error("tau grid is empty");
  if (c.tau_default_index >= c.tau_points) throw parameter_error("tau_default_index outside the tau grid");
  if (c.trials == 0) throw parameter_error("trial count must be at least 1");
  if (!(c.lambda_min_frac > 0.0) || c.lambda_min_frac > c.lambda_max_frac) throw parameter_error("bad lambda range");
  if (c.noise_variance < 0.0) throw parameter_error("noise variance must be nonnegative");
  for (double s : c.sigma2_list) {
    if (s < 0.0) throw parameter_error("noise variance must be nonnegative");
  }
  if (c.experiment == Experiment::noise_sweep_1d || c.experiment == Experiment::noise_sweep_2d) {
    if (c.sigma2_list.empty()) throw parameter_error("sigma2_list is empty");
  }
  if (c.experiment == Experiment::measurement_sweep_1d && c.m_list.empty()) throw parameter_error("m_list is empty");
  if (c.min_rects > c.max_rects) throw parameter_error("min_rects > max_rects");
}

// Defaults for the experiment named in the stream (or `fallback`), then the
// file's keys in order.
inline ExperimentConfig parse_config(std::istream& is, Experiment fallback = Experiment::noise_sweep_1d) {
  const auto kv = read_key_values(is);
  Experiment e = fallback;
  for (const auto& [k, v] : kv) {
    if (k == "experiment") e = parse_experiment(v);
  }
  ExperimentConfig c = defaults_for(e);
  for (const auto& [k, v] : kv) set_config_value(c, k, v);
  return c;
}

inline ExperimentConfig load_config(const std::string& path, Experiment fallback = Experiment::noise_sweep_1d) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  return parse_config(in, fallback);
}

}  // namespace wavegroup::bench
