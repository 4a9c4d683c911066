#ifndef SPARSEBSS_EVALUATION_HPP
#define SPARSEBSS_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "sparsebss/core.hpp"
#include "sparsebss/separation.hpp"
#include "sparsebss/simgen.hpp"

namespace sparsebss {

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double len = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    mx += x[n];
    my += y[n];
  }
  mx /= len;
  my /= len;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double dx = x[n] - mx, dy = y[n] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct Association {
  std::vector<std::size_t> estimate_for_source;  // permutation
  std::vector<int> signs;
  std::vector<double> correlations;              // matched c_rs, signed
};

/// Greedy matching on |Pearson correlation|: take the largest remaining entry,
/// pair its source and estimate, drop both, repeat. Ties go to the lowest
/// (source, estimate) pair.
inline Association associate(const SignalMatrix& actual, const SignalMatrix& estimates) {
  const std::size_t n = actual.channels();
  if (estimates.channels() != n || estimates.samples() != actual.samples())
    throw BssError(ErrorCode::DimensionMismatch, "actual and estimated signals differ in shape");

  Matrix c(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = 0; s < n; ++s) c(r, s) = pearson(actual.channel(r), estimates.channel(s));

  Association a{std::vector<std::size_t>(n, 0), std::vector<int>(n, 1), std::vector<double>(n, 0.0)};
  std::vector<bool> row_used(n, false), col_used(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    double best = -1.0;
    std::size_t br = 0, bs = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (row_used[r]) continue;
      for (std::size_t s = 0; s < n; ++s) {
        if (col_used[s]) continue;
        if (std::abs(c(r, s)) > best) {
          best = std::abs(c(r, s));
          br = r;
          bs = s;
        }
      }
    }
    row_used[br] = col_used[bs] = true;
    a.estimate_for_source[br] = bs;
    a.correlations[br] = c(br, bs);
    a.signs[br] = c(br, bs) < 0.0 ? -1 : 1;
  }
  return a;
}

inline std::vector<double> pointwise_error(std::span<const double> actual, std::span<const double> estimate, int sign) {
  std::vector<double> e(actual.size());
  for (std::size_t n = 0; n < e.size(); ++n) e[n] = sign > 0 ? actual[n] - estimate[n] : actual[n] + estimate[n];
  return e;
}

struct RmsMetrics {
  std::vector<double> per_sample;  // RMS[n]
  double total = 0.0;              // RMS_tot
  double max = 0.0;                // RMS_max
};

/// Squared errors summed over Q runs for one source -> RMS[n], RMS_tot, RMS_max.
inline RmsMetrics rms_from_sum_sq(std::span<const double> sum_sq, std::size_t runs) {
  if (runs == 0) throw BssError(ErrorCode::InvalidArgument, "at least one run is required");
  RmsMetrics m;
  m.per_sample.resize(sum_sq.size());
  double acc = 0.0;
  for (std::size_t n = 0; n < sum_sq.size(); ++n) {
    m.per_sample[n] = std::sqrt(sum_sq[n] / static_cast<double>(runs));
    acc += m.per_sample[n] * m.per_sample[n];
    m.max = std::max(m.max, m.per_sample[n]);
  }
  m.total = sum_sq.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(sum_sq.size()));
  return m;
}

/// `errors` holds one error sequence per run for a single source.
inline RmsMetrics rms_metrics(const std::vector<std::vector<double>>& errors) {
  if (errors.empty()) throw BssError(ErrorCode::InvalidArgument, "at least one run is required");
  std::vector<double> sum_sq(errors.front().size(), 0.0);
  for (const auto& e : errors) {
    if (e.size() != sum_sq.size()) throw BssError(ErrorCode::DimensionMismatch, "error sequences differ in length");
    for (std::size_t n = 0; n < e.size(); ++n) sum_sq[n] += e[n] * e[n];
  }
  return rms_from_sum_sq(sum_sq, errors.size());
}

/// Known sources, mixing matrix and noise level of a synthetic experiment.
struct Scenario {
  SignalMatrix sources;
  Matrix mixing;
  double noise_sd = 0.0;
};

struct MonteCarloOptions {
  std::size_t sets = 10;
  std::size_t runs_per_set = 1000;
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;
};

struct SourceStats {
  double rms_tot_mean = 0.0, rms_tot_sd = 0.0;
  double rms_max_mean = 0.0, rms_max_sd = 0.0;
  std::vector<double> rms_tot_per_set, rms_max_per_set;
};

struct EvalReport {
  std::vector<SourceStats> sources;
  std::size_t total_runs = 0;
  std::size_t failed_runs = 0;
  std::string first_failure;

  double failure_rate() const { return total_runs ? static_cast<double>(failed_runs) / total_runs : 0.0; }
};

namespace detail {

struct RunOutcome {
  bool ok = false;
  std::string failure;
  Matrix squared_error;  // sources x samples
};

inline RunOutcome run_once(const Scenario& sc, const SignalMatrix& clean, const SignalMatrix& actual_norm,
                           const MethodParams& params, std::uint64_t seed) {
  RunOutcome out;
  try {
    const SignalMatrix noisy = add_noise(clean, NoiseSpec{sc.noise_sd, seed});
    const SeparationResult res = separate(noisy, params);
    const SignalMatrix est = normalize_rms(res.estimates);
    const Association a = associate(actual_norm, est);
    out.squared_error = Matrix(actual_norm.channels(), actual_norm.samples());
    for (std::size_t r = 0; r < actual_norm.channels(); ++r) {
      const auto e = pointwise_error(actual_norm.channel(r), est.channel(a.estimate_for_source[r]), a.signs[r]);
      auto row = out.squared_error.row(r);
      for (std::size_t n = 0; n < e.size(); ++n) row[n] = e[n] * e[n];
    }
    out.ok = true;
  } catch (const BssError& err) {
    out.failure = err.what();
  }
  return out;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population standard deviation across sets.
inline double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace detail

/**
 * Repeated noisy separation of a fixed scenario.
 *
 * Run q (counted across all sets) uses noise seed master_seed + q. Errors are
 * accumulated per actual source using each run's own association. Failed
 * runs are counted and left out of the RMS figures; a set with no successful
 * run contributes no per-set value. Per-run results are reduced in run order,
 * so the report does not depend on the thread count.
 */
inline EvalReport monte_carlo(const Scenario& scenario, const MethodParams& params, const MonteCarloOptions& opt) {
  if (opt.sets == 0 || opt.runs_per_set == 0) throw BssError(ErrorCode::InvalidArgument, "sets and runs must be >= 1");
  params.check();
  const SignalMatrix clean = mix(scenario.sources, scenario.mixing);
  const SignalMatrix actual_norm = normalize_rms(scenario.sources);
  const std::size_t n_src = actual_norm.channels();
  const std::size_t len = actual_norm.samples();
  const std::size_t threads = std::max<std::size_t>(1, opt.threads);

  EvalReport report;
  report.sources.resize(n_src);
  std::vector<detail::RunOutcome> outcomes(opt.runs_per_set);

  for (std::size_t set = 0; set < opt.sets; ++set) {
    const std::uint64_t base = opt.master_seed + static_cast<std::uint64_t>(set * opt.runs_per_set);
    auto worker = [&](std::size_t t) {
      for (std::size_t q = t; q < opt.runs_per_set; q += threads)
        outcomes[q] = detail::run_once(scenario, clean, actual_norm, params, base + q);
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    }

    Matrix sum_sq(n_src, len);
    std::size_t ok = 0;
    for (const auto& o : outcomes) {
      ++report.total_runs;
      if (!o.ok) {
        ++report.failed_runs;
        if (report.first_failure.empty()) report.first_failure = o.failure;
        continue;
      }
      ++ok;
      for (std::size_t r = 0; r < n_src; ++r) {
        auto acc = sum_sq.row(r);
        const auto sq = o.squared_error.row(r);
        for (std::size_t n = 0; n < len; ++n) acc[n] += sq[n];
      }
    }
    if (ok == 0) continue;
    for (std::size_t r = 0; r < n_src; ++r) {
      const RmsMetrics m = rms_from_sum_sq(sum_sq.row(r), ok);
      report.sources[r].rms_tot_per_set.push_back(m.total);
      report.sources[r].rms_max_per_set.push_back(m.max);
    }
  }

  if (report.failed_runs == report.total_runs)
    throw BssError(ErrorCode::AllRunsFailed, "every Monte Carlo run failed; first failure: " + report.first_failure);

  for (auto& s : report.sources) {
    s.rms_tot_mean = detail::mean_of(s.rms_tot_per_set);
    s.rms_tot_sd = detail::sd_of(s.rms_tot_per_set);
    s.rms_max_mean = detail::mean_of(s.rms_max_per_set);
    s.rms_max_sd = detail::sd_of(s.rms_max_per_set);
  }
  return report;
}

}  // namespace sparsebss

#endif  // SPARSEBSS_EVALUATION_HPP
