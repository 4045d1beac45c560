#pragma once

// Experiment drivers: build an instance, tune each method over its grid
// against the known ground truth, collect rows.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "wavegroup/bench/config.hpp"
#include "wavegroup/bench/io.hpp"
#include "wavegroup/bench/signals.hpp"
#include "wavegroup/dwt.hpp"
#include "wavegroup/grouping.hpp"
#include "wavegroup/linop.hpp"
#include "wavegroup/penalty.hpp"
#include "wavegroup/random.hpp"
#include "wavegroup/solver.hpp"

namespace wavegroup::bench {

// Seed streams.
inline constexpr std::uint64_t kSignalStream = 1;
inline constexpr std::uint64_t kSensingStream = 2;
inline constexpr std::uint64_t kNoiseStream = 3;
inline constexpr std::uint64_t kScrambleStream = 4;

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t a, std::uint64_t b = 0) {
  return derive_seed(derive_seed(derive_seed(master, stream), a), b);
}

// A recovery problem in coefficient coordinates with known truth.
struct Instance {
  LinearOperator a;  // observation composed with Haar synthesis
  Vec y;
  Vec theta;         // true coefficients
  CoeffLayout layout;
  std::shared_ptr<const ReplicationMap> repmap;
  mutable std::optional<double> norm_sq;  // |A|^2, computed on first use

  double a_norm_sq() const {
    if (!norm_sq) norm_sq = spectral_norm_sq(a, 50);
    return *norm_sq;
  }
};

struct MethodOutcome {
  Method method = Method::L;
  double lambda = 0.0;
  std::optional<double> tau;
  Vec coefficients;
  double err_coeff = 0.0;
  double mse_image = 0.0;
  int iters = 0;
  double seconds = 0.0;
  std::vector<std::string> warnings;
};

// Descending log grid of `points` values over [lo_frac, hi_frac] * top.
inline std::vector<double> log_grid(double top, double lo_frac, double hi_frac, std::size_t points) {
  std::vector<double> g;
  if (points == 1) return {top * hi_frac};
  const double a = std::log10(hi_frac), b = std::log10(lo_frac);
  for (std::size_t k = 0; k < points; ++k) {
    g.push_back(top * std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1)));
  }
  return g;
}

// tau grid: tau^2 = 10^(step k) |A|^2, k = 0..points-1.
inline std::vector<double> tau_grid(double a_norm_sq, double step, std::size_t points) {
  std::vector<double> g;
  for (std::size_t k = 0; k < points; ++k) g.push_back(std::sqrt(std::pow(10.0, step * static_cast<double>(k)) * a_norm_sq));
  return g;
}

inline SolverConfig solver_config(const ExperimentConfig& cfg, Method method = Method::L) {
  SolverConfig s;
  s.max_iters = method == Method::OGL ? cfg.ogl_max_iters : cfg.max_iters;
  s.rel_obj_tol = method == Method::OGL ? cfg.ogl_rel_obj_tol : cfg.rel_obj_tol;
  return s;
}

namespace detail {

struct PathPoint {
  double err;
  Vec solution;
  Vec coefficients;
  int iters;
};

// Solves along a grid with warm starts and keeps the best point. With
// patience > 0 the path stops once the error has not improved for that many
// consecutive grid points.
template <typename MakeProblem>
std::pair<std::size_t, PathPoint> tune(const std::vector<double>& grid, MakeProblem make, const Vec& truth,
                                       const SolverConfig& scfg, Vec start, std::size_t patience) {
  std::size_t best = 0;
  PathPoint best_point{INFINITY, {}, {}, 0};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (patience > 0 && k >= best + patience + 1 && std::isfinite(best_point.err)) break;
    const Problem p = make(grid[k]);
    SolveReport r = solve(p, scfg, start);
    const double err = (r.coefficients - truth).squaredNorm();
    if (err < best_point.err) {
      best = k;
      best_point = PathPoint{err, r.solution, r.coefficients, r.iterations};
    }
    start = std::move(r.solution);
  }
  return {best, std::move(best_point)};
}

inline void boundary_warning(std::vector<std::string>& w, const char* what, Method m, std::size_t best, std::size_t n) {
  if (n > 1 && (best == 0 || best + 1 == n)) {
    w.push_back(std::string(to_string(m)) + ": selected " + what + " at grid boundary (index " + std::to_string(best) + ")");
  }
}

}  // namespace detail

// Tunes and runs one method on an instance.
inline MethodOutcome run_method(const Instance& inst, Method method, const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const SolverConfig scfg = solver_config(cfg, method);
  MethodOutcome out;
  out.method = method;
  const auto n = static_cast<Eigen::Index>(inst.theta.size());

  if (method == Method::L) {
    const double top = zero_threshold(inst.a, inst.y, PenaltySpec::l1(1.0));
    const auto grid = log_grid(top, cfg.lambda_min_frac, cfg.lambda_max_frac, cfg.lambda_points);
    auto make = [&](double lam) { return make_lasso_problem(inst.a, inst.y, lam); };
    auto [best, pt] = detail::tune(grid, make, inst.theta, scfg, Vec::Zero(n), cfg.path_patience);
    detail::boundary_warning(out.warnings, "lambda", method, best, grid.size());
    out.lambda = grid[best];
    out.coefficients = std::move(pt.coefficients);
    out.iters = pt.iters;
  } else {
    if (!inst.repmap) throw parameter_error("group methods need a replication map");
    const auto& rep = *inst.repmap;
    const double top = zero_threshold(inst.a, inst.y, PenaltySpec::group_l2(1.0, replicated_groups(rep)), &rep);
    const auto grid = log_grid(top, cfg.lambda_min_frac, cfg.lambda_max_frac, cfg.lambda_points);
    if (method == Method::OGLR) {
      auto make = [&](double lam) { return make_replicated_problem(inst.a, inst.y, lam, inst.repmap); };
      auto [best, pt] = detail::tune(grid, make, inst.theta, scfg,
                                     Vec::Zero(static_cast<Eigen::Index>(rep.total_replicas())), cfg.path_patience);
      detail::boundary_warning(out.warnings, "lambda", method, best, grid.size());
      out.lambda = grid[best];
      out.coefficients = std::move(pt.coefficients);
      out.iters = pt.iters;
    } else {
      // lambda path at the default tau, then tau path at the chosen lambda
      const auto taus = tau_grid(inst.a_norm_sq(), cfg.tau_step_exponent, cfg.tau_points);
      const double tau0 = taus[cfg.tau_default_index];
      const Vec start = Vec::Zero(n + static_cast<Eigen::Index>(rep.total_replicas()));
      auto make_l = [&](double lam) { return make_coupled_problem(inst.a, inst.y, lam, tau0, inst.repmap); };
      auto [best_l, pt_l] = detail::tune(grid, make_l, inst.theta, scfg, start, cfg.path_patience);
      detail::boundary_warning(out.warnings, "lambda", method, best_l, grid.size());
      const double lam = grid[best_l];
      auto make_t = [&](double tau) { return make_coupled_problem(inst.a, inst.y, lam, tau, inst.repmap); };
      auto [best_t, pt_t] = detail::tune(taus, make_t, inst.theta, scfg, pt_l.solution, cfg.path_patience);
      if (pt_l.err <= pt_t.err) {
        best_t = cfg.tau_default_index;
        pt_t = std::move(pt_l);
      }
      detail::boundary_warning(out.warnings, "tau", method, best_t, taus.size());
      out.lambda = lam;
      out.tau = taus[best_t];
      out.coefficients = std::move(pt_t.coefficients);
      out.iters = pt_t.iters;
    }
  }
  out.err_coeff = (out.coefficients - inst.theta).squaredNorm();
  // orthonormal synthesis: pixel MSE equals coefficient error per pixel
  out.mse_image = out.err_coeff / static_cast<double>(n);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

// --- Result aggregation -------------------------------------------------------

struct SummaryRow {
  std::string method;
  double sigma2 = 0.0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double mean_err_coeff = 0.0;
  double mean_mse_image = 0.0;
  double win_rate_vs_lasso = 0.0;  // fraction of paired trials with err_coeff below lasso's
  double mean_signal_energy = 0.0;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
  std::vector<std::string> warnings;
  std::vector<std::string> report;
  std::vector<std::pair<std::string, Tensor>> images;
  std::vector<std::pair<Scheme, PenaltyRatios>> ratios;
};

// Groups rows by (m, sigma2, method) in first-seen order.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows,
                                         const std::map<std::pair<std::size_t, std::size_t>, double>& energy = {}) {
  using Key = std::tuple<std::size_t, double, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ResultRow*>> by;
  std::map<std::tuple<std::size_t, double, std::size_t>, double> lasso_err;
  for (const ResultRow& r : rows) {
    const Key k{r.m, r.sigma2, r.method};
    if (!by.count(k)) order.push_back(k);
    by[k].push_back(&r);
    if (r.method == "L") lasso_err[{r.m, r.sigma2, r.trial}] = r.err_coeff;
  }
  std::vector<SummaryRow> out;
  for (const Key& k : order) {
    const auto& rs = by[k];
    SummaryRow s;
    s.m = std::get<0>(k);
    s.sigma2 = std::get<1>(k);
    s.method = std::get<2>(k);
    s.trials = rs.size();
    std::size_t paired = 0, wins = 0;
    double en = 0.0;
    for (const ResultRow* r : rs) {
      s.mean_err_coeff += r->err_coeff;
      s.mean_mse_image += r->mse_image;
      const auto it = lasso_err.find({r->m, r->sigma2, r->trial});
      if (it != lasso_err.end()) {
        ++paired;
        wins += r->err_coeff < it->second;
      }
      const auto e = energy.find({r->m, r->trial});
      if (e != energy.end()) en += e->second;
    }
    const auto cnt = static_cast<double>(rs.size());
    s.mean_err_coeff /= cnt;
    s.mean_mse_image /= cnt;
    s.mean_signal_energy = en / cnt;
    s.win_rate_vs_lasso = paired ? static_cast<double>(wins) / static_cast<double>(paired) : 0.0;
    out.push_back(s);
  }
  return out;
}

inline Table summary_table(const std::string& experiment, const std::vector<SummaryRow>& s) {
  Table t;
  t.header = {"experiment", "method", "sigma2", "m", "trials", "mean_err_coeff", "mean_mse_image", "win_rate_vs_L"};
  for (const SummaryRow& r : s) {
    t.rows.push_back({experiment, r.method, fmt(r.sigma2), std::to_string(r.m), std::to_string(r.trials),
                      fmt(r.mean_err_coeff), fmt(r.mean_mse_image), fmt(r.win_rate_vs_lasso)});
  }
  return t;
}

// --- Trial scheduling ---------------------------------------------------------

// Runs body(trial) for every trial on `threads` workers; results are
// returned in trial order so the output does not depend on scheduling.
template <typename T>
std::vector<T> run_trials(std::size_t trials, std::size_t threads, const std::function<T(std::size_t)>& body) {
  std::vector<T> results(trials);
  if (threads <= 1 || trials <= 1) {
    for (std::size_t t = 0; t < trials; ++t) results[t] = body(t);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(trials);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(threads, trials); ++w) {
    pool.emplace_back([&] {
      for (std::size_t t; (t = next.fetch_add(1)) < trials;) {
        try {
          results[t] = body(t);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

struct TrialOutput {
  std::vector<ResultRow> rows;
  std::vector<std::string> warnings;
};

inline ResultRow make_row(const ExperimentConfig& cfg, const MethodOutcome& o, double sigma2, std::size_t m,
                          std::size_t trial) {
  ResultRow r;
  r.experiment = to_string(cfg.experiment);
  r.method = to_string(o.method);
  r.sigma2 = sigma2;
  r.m = m;
  r.trial = trial;
  r.lambda = o.lambda;
  r.tau = o.tau;
  r.err_coeff = o.err_coeff;
  r.mse_image = o.mse_image;
  r.iters = o.iters;
  if (cfg.record_timing) r.seconds = o.seconds;
  return r;
}

inline void collect(ExperimentResult& res, std::vector<TrialOutput>& outs) {
  for (auto& o : outs) {
    res.rows.insert(res.rows.end(), o.rows.begin(), o.rows.end());
    res.warnings.insert(res.warnings.end(), o.warnings.begin(), o.warnings.end());
  }
}

// --- Instances ----------------------------------------------------------------

inline bool needs_groups(const ExperimentConfig& cfg) {
  return std::any_of(cfg.methods.begin(), cfg.methods.end(), [](Method m) { return m != Method::L; });
}

inline std::shared_ptr<const ReplicationMap> group_map(const CoeffLayout& layout, Scheme scheme) {
  return std::make_shared<const ReplicationMap>(make_replication_map(make_groups(layout, scheme)));
}

// Dense A = G W: row r of A is the Haar analysis of row r of G.
inline Matrix synthesis_matrix(const Matrix& g, const CoeffLayout& layout) {
  Matrix a(g.rows(), g.cols());
  Vec row;
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    row = g.row(r).transpose();
    forward_in_place(row, layout);
    a.row(r) = row.transpose();
  }
  return a;
}

inline Tensor load_image(const ExperimentConfig& cfg) {
  if (cfg.image.empty()) throw io_error("no image path configured");
  Tensor img = read_pgm(cfg.image);
  if (cfg.crop > 0) img = crop_center(img, cfg.crop, cfg.crop);
  return img;
}

inline CoeffLayout layout_for(const std::vector<std::size_t>& shape, int levels) {
  return levels < 0 ? CoeffLayout::full(shape) : CoeffLayout(shape, levels);
}

// --- Experiments --------------------------------------------------------------

// Image recovery from y = L x + noise for each configured method.
inline ExperimentResult run_image_recovery(const ExperimentConfig& cfg, const LinearOperator& observation,
                                           const Tensor& image, std::size_t m_reported) {
  ExperimentResult res;
  res.experiment = to_string(cfg.experiment);
  Instance inst{compose_with_synthesis(observation, layout_for(image.shape, cfg.levels)), {}, {},
                layout_for(image.shape, cfg.levels), nullptr, std::nullopt};
  inst.theta = forward(image, inst.layout.levels()).data;
  if (needs_groups(cfg)) inst.repmap = group_map(inst.layout, cfg.grouping);
  const Vec clean = observation.apply(image.data);
  inst.y = add_noise(clean, cfg.noise_variance, stream_seed(cfg.seed, kNoiseStream, 0));

  res.images.emplace_back("original", image);
  for (Method method : cfg.methods) {
    const MethodOutcome o = run_method(inst, method, cfg);
    res.rows.push_back(make_row(cfg, o, cfg.noise_variance, m_reported, 0));
    res.warnings.insert(res.warnings.end(), o.warnings.begin(), o.warnings.end());
    res.images.emplace_back(to_string(method), inverse(CoeffVector{o.coefficients, inst.layout}));
    res.report.push_back(std::string(to_string(method)) + " MSE = " + fmt(o.mse_image) + " (lambda " + fmt(o.lambda) +
                         (o.tau ? ", tau " + fmt(*o.tau) : std::string()) + ")");
  }
  res.summary = summarize(res.rows);
  return res;
}

inline ExperimentResult run_cs_image(const ExperimentConfig& cfg) {
  const Tensor image = load_image(cfg);
  const double scale = cfg.normalized_sensing ? 1.0 / std::sqrt(static_cast<double>(cfg.m_per_tile)) : 1.0;
  const LinearOperator l = tiled_gaussian_sensing(image.rows(), image.cols(), cfg.tile, cfg.m_per_tile,
                                                  stream_seed(cfg.seed, kSensingStream, 0), scale);
  return run_image_recovery(cfg, l, image, cfg.m_per_tile);
}

inline ExperimentResult run_deblur_image(const ExperimentConfig& cfg) {
  const Tensor image = load_image(cfg);
  const std::size_t radius =
      cfg.blur_radius < 0 ? default_blur_radius(cfg.blur_variance) : static_cast<std::size_t>(cfg.blur_radius);
  const LinearOperator l = radius == 0 ? identity_operator(image.size())
                                       : gaussian_blur(image.rows(), image.cols(), cfg.blur_variance, radius);
  return run_image_recovery(cfg, l, image, image.size());
}

// Compressed sensing of synthetic signals: noise sweep (fixed m, list of
// sigma2) and measurement sweep (fixed sigma2, list of m) share this.
inline ExperimentResult run_synthetic(const ExperimentConfig& cfg, const std::vector<std::size_t>& ms,
                                      const std::vector<double>& sigma2s) {
  ExperimentResult res;
  res.experiment = to_string(cfg.experiment);
  const bool two_d = cfg.experiment == Experiment::noise_sweep_2d;
  const std::vector<std::size_t> shape = two_d ? std::vector<std::size_t>{cfg.size, cfg.size}
                                               : std::vector<std::size_t>{cfg.size};
  const CoeffLayout layout = layout_for(shape, cfg.levels);
  const std::size_t n = layout.size();
  std::shared_ptr<const ReplicationMap> rep;
  if (needs_groups(cfg)) rep = group_map(layout, cfg.grouping);

  std::map<std::pair<std::size_t, std::size_t>, double> energy;
  std::function<std::pair<TrialOutput, std::vector<double>>(std::size_t)> body = [&](std::size_t trial) {
    TrialOutput out;
    std::vector<double> energies;
    const std::uint64_t sig_seed = stream_seed(cfg.seed, kSignalStream, trial);
    const Tensor x = two_d ? gen_toy_image(cfg.size, cfg.size, sig_seed, cfg.min_rects, cfg.max_rects)
                           : gen_piecewise_constant(cfg.size, cfg.max_jumps, sig_seed);
    const Vec theta = forward(x, layout.levels()).data;
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      const std::size_t m = ms[mi];
      const double scale = cfg.normalized_sensing ? 1.0 / std::sqrt(static_cast<double>(m)) : 1.0;
      const Matrix g = gaussian_matrix(m, n, stream_seed(cfg.seed, kSensingStream, trial, m), scale);
      auto a = std::make_shared<const Matrix>(synthesis_matrix(g, layout));
      const Vec clean = (*a) * theta;
      Instance inst{matrix_operator(a), {}, theta, layout, rep, std::nullopt};
      energies.push_back(theta.squaredNorm());
      for (std::size_t si = 0; si < sigma2s.size(); ++si) {
        inst.y = add_noise(clean, sigma2s[si], stream_seed(cfg.seed, kNoiseStream, trial, mi * 1000003 + si));
        for (Method method : cfg.methods) {
          const MethodOutcome o = run_method(inst, method, cfg);
          out.rows.push_back(make_row(cfg, o, sigma2s[si], m, trial));
          for (const auto& w : o.warnings) {
            out.warnings.push_back("trial " + std::to_string(trial) + ", m " + std::to_string(m) + ", sigma2 " +
                                   fmt(sigma2s[si]) + ": " + w);
          }
        }
      }
    }
    return std::make_pair(std::move(out), std::move(energies));
  };
  auto outs = run_trials(cfg.trials, cfg.threads, body);
  std::vector<TrialOutput> trial_outs;
  for (std::size_t t = 0; t < outs.size(); ++t) {
    for (std::size_t mi = 0; mi < ms.size(); ++mi) energy[{ms[mi], t}] = outs[t].second[mi];
    trial_outs.push_back(std::move(outs[t].first));
  }
  collect(res, trial_outs);
  res.summary = summarize(res.rows, energy);
  for (const SummaryRow& s : res.summary) {
    res.report.push_back(s.method + " sigma2=" + fmt(s.sigma2) + " m=" + std::to_string(s.m) + " mean err " +
                         fmt(s.mean_err_coeff) + " wins vs L " + fmt(s.win_rate_vs_lasso));
  }
  return res;
}

inline ExperimentResult run_noise_sweep(const ExperimentConfig& cfg) {
  return run_synthetic(cfg, {cfg.m}, cfg.sigma2_list);
}

// Smallest m whose mean error falls below frac * mean signal energy.
inline std::optional<std::size_t> threshold_m(const std::vector<SummaryRow>& s, const std::string& method, double frac) {
  std::optional<std::size_t> best;
  for (const SummaryRow& r : s) {
    if (r.method == method && r.mean_err_coeff < frac * r.mean_signal_energy && (!best || r.m < *best)) best = r.m;
  }
  return best;
}

inline ExperimentResult run_measurement_sweep(const ExperimentConfig& cfg) {
  ExperimentResult res = run_synthetic(cfg, cfg.m_list, {cfg.noise_variance});
  for (Method method : cfg.methods) {
    const auto m = threshold_m(res.summary, to_string(method), cfg.error_threshold_frac);
    res.report.push_back(std::string(to_string(method)) + " first m below " + fmt(cfg.error_threshold_frac) +
                         " of signal energy: " + (m ? std::to_string(*m) : std::string("none")));
  }
  return res;
}

inline ExperimentResult run_penalty_ratio(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.experiment = to_string(cfg.experiment);
  const Tensor image = load_image(cfg);
  const CoeffLayout layout = layout_for(image.shape, cfg.levels);
  const Vec theta = forward(image, layout.levels()).data;
  const ScrambleScope scope = parse_scramble_scope(cfg.scramble);
  for (Scheme scheme : cfg.ratio_schemes) {
    const GroupStructure gs = make_groups(layout, scheme);
    const ReplicationMap rep = make_replication_map(gs);
    PenaltyRatios mean{0.0, 0.0, 0.0};
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const Vec scrambled = scramble_details(theta, layout, stream_seed(cfg.seed, kScrambleStream, t), scope);
      const PenaltyRatios r = penalty_ratio(theta, scrambled, gs, rep);
      mean.l1 += r.l1;
      mean.group += r.group;
      mean.replication += r.replication;
    }
    const auto cnt = static_cast<double>(cfg.trials);
    // the l1 ratio of a permutation is exactly 1; averaging must not perturb it
    mean.l1 = mean.l1 == cnt ? 1.0 : mean.l1 / cnt;
    mean.group /= cnt;
    mean.replication /= cnt;
    res.ratios.emplace_back(scheme, mean);
    char line[160];
    std::snprintf(line, sizeof line, "%s: lasso %.2f  group lasso %.2f  group lasso with replication %.2f",
                  to_string(scheme), mean.l1, mean.group, mean.replication);
    res.report.push_back(line);
  }
  return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  switch (cfg.experiment) {
    case Experiment::cs_image: return run_cs_image(cfg);
    case Experiment::deblur_image: return run_deblur_image(cfg);
    case Experiment::noise_sweep_1d:
    case Experiment::noise_sweep_2d: return run_noise_sweep(cfg);
    case Experiment::measurement_sweep_1d: return run_measurement_sweep(cfg);
    case Experiment::penalty_ratio: return run_penalty_ratio(cfg);
  }
  throw parameter_error("unknown experiment");
}

// results.csv, summary.csv, ratios.csv and PGM images under `dir`.
inline void write_outputs(const ExperimentResult& res, const std::string& dir) {
  std::filesystem::create_directories(dir);
  if (!res.rows.empty()) write_results_csv(dir + "/results.csv", res.rows);
  if (!res.summary.empty()) write_table_csv(dir + "/summary.csv", summary_table(res.experiment, res.summary));
  if (!res.ratios.empty()) {
    Table t;
    t.header = {"scheme", "lasso", "group", "replication"};
    for (const auto& [scheme, r] : res.ratios) t.rows.push_back({to_string(scheme), fmt(r.l1), fmt(r.group), fmt(r.replication)});
    write_table_csv(dir + "/ratios.csv", t);
  }
  for (const auto& [name, img] : res.images) {
    if (img.ndim() == 2) write_pgm(dir + "/" + res.experiment + "_" + name + ".pgm", img);
  }
}

}  // namespace wavegroup::bench
