#ifndef SPARSEBSS_CLI_HPP
#define SPARSEBSS_CLI_HPP

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "sparsebss/clustering.hpp"
#include "sparsebss/evaluation.hpp"
#include "sparsebss/io.hpp"
#include "sparsebss/separation.hpp"
#include "sparsebss/whitening.hpp"

// Command implementations behind the `sparsebss` tool. Each returns the process
// exit code: 0 success, 1 processing failure, 2 usage error.

namespace sparsebss::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kThreadsEnv = "SPARSEBSS_THREADS";

/// Default worker count: $SPARSEBSS_THREADS when set to a positive integer,
/// otherwise the hardware concurrency.
inline std::size_t default_threads() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline std::optional<ScenarioConfig> preset(const std::string& name) {
  if (name == "two-pulse") return two_pulse_config();
  if (name == "shifted-uniform") return shifted_uniform_config();
  return std::nullopt;
}

/// Resolves a `--preset` name or a config file path.
inline ScenarioConfig resolve_config(const std::string& path, const std::string& preset_name) {
  if (!preset_name.empty()) {
    auto cfg = preset(preset_name);
    if (!cfg) throw BssError(ErrorCode::ParseError, "unknown preset '" + preset_name + "'");
    return *cfg;
  }
  return load_scenario(path);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw BssError(ErrorCode::ParseError, "cannot open " + path + " for writing");
  os << text;
}

inline int report_error(std::ostream& err, const BssError& e) {
  err << "error: " << e.what() << '\n';
  return kExitFailure;
}

// ---------------------------------------------------------------------------

/// Writes sources.csv and mixtures.csv (noise included) into `out_dir`.
inline int cmd_simulate(const ScenarioConfig& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  try {
    std::filesystem::create_directories(out_dir);
    const SignalMatrix sources = generate_sources(cfg);
    const SignalMatrix mixtures = add_noise(mix(sources, cfg.mixing), NoiseSpec{cfg.noise_sd, cfg.seed});
    const auto dir = std::filesystem::path(out_dir);
    write_csv_file((dir / "sources.csv").string(), sources, numbered_header("source", sources.channels()));
    write_csv_file((dir / "mixtures.csv").string(), mixtures, numbered_header("mixture", mixtures.channels()));
    out << "wrote " << mixtures.channels() << "x" << mixtures.samples() << " mixtures to " << out_dir << '\n';
    return kExitOk;
  } catch (const BssError& e) {
    return report_error(err, e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

struct SeparateOptions {
  std::string input;
  std::string output;       // estimates CSV
  std::string report;       // defaults to <output>.json
  MethodParams params;
  double sample_rate_hz = 1.0;
};

inline int cmd_separate(const SeparateOptions& opt, std::ostream& out, std::ostream& err) {
  CsvTable table;
  try {
    table = read_csv_file(opt.input, opt.sample_rate_hz);
  } catch (const BssError& e) {
    return report_error(err, e);
  }
  if (table.signal.channels() < 2) {
    err << "usage error: separation needs at least two input channels, got " << table.signal.channels() << '\n';
    return kExitUsage;
  }
  try {
    const SeparationResult res = separate(table.signal, opt.params);
    write_csv_file(opt.output, res.estimates, numbered_header("estimate", res.estimates.channels()));
    const std::string report = opt.report.empty() ? opt.output + ".json" : opt.report;
    write_text(report, separation_report(res, opt.params).dump(2) + "\n");
    out << "extracted " << res.estimates.channels() << " sources (" << to_string(opt.params.method) << ")\n";
    return kExitOk;
  } catch (const BssError& e) {
    if (e.iteration()) err << "error: separation failed at iteration " << *e.iteration() << '\n';
    return report_error(err, e);
  }
}

/// Writes `<report>` (JSON) and `<report>.txt` (table); the table also goes to `out`.
inline int cmd_evaluate(const std::string& actual_path, const std::string& estimates_path,
                        const std::string& report_path, std::ostream& out, std::ostream& err) {
  try {
    const auto actual = read_csv_file(actual_path);
    const auto estimates = read_csv_file(estimates_path);
    const SingleEvaluation ev = evaluate_once(actual.signal, estimates.signal);
    const std::string table = evaluation_table(ev);
    write_text(report_path, evaluation_report(ev).dump(2) + "\n");
    write_text(report_path + ".txt", table);
    out << table;
    return kExitOk;
  } catch (const BssError& e) {
    return report_error(err, e);
  }
}

struct MonteCarloCliOptions {
  Method method = Method::Global;
  std::vector<double> v_th{0.4};
  double alpha = 1.0;
  std::optional<double> noise_sd;  // overrides the config
  MonteCarloOptions mc;
  bool use_total = false;
  std::string report;
};

/// One row per v_th. Exits 1 if any row had every run fail (the row is still
/// reported with a 100% failure rate).
inline int cmd_montecarlo(const ScenarioConfig& cfg, const MonteCarloCliOptions& opt, std::ostream& out,
                          std::ostream& err) {
  try {
    Scenario sc = to_scenario(cfg);
    if (opt.noise_sd) sc.noise_sd = *opt.noise_sd;
    MonteCarloOptions mc = opt.mc;
    mc.master_seed = cfg.seed;

    std::vector<MonteCarloRow> rows;
    bool any_all_failed = false;
    for (double vth : opt.v_th) {
      MonteCarloRow row;
      row.params = MethodParams{vth, opt.alpha, opt.method};
      row.total_runs = mc.sets * mc.runs_per_set;
      try {
        EvalReport rep = monte_carlo(sc, row.params, mc);
        row.failed_runs = rep.failed_runs;
        row.failure = rep.first_failure;
        row.report = std::move(rep);
      } catch (const BssError& e) {
        if (e.code() != ErrorCode::AllRunsFailed) throw;
        row.failed_runs = row.total_runs;
        row.failure = e.what();
        any_all_failed = true;
        err << "error: " << e.what() << '\n';
      }
      rows.push_back(std::move(row));
    }
    const std::string table = montecarlo_table(rows, opt.use_total);
    if (!opt.report.empty()) {
      write_text(opt.report, montecarlo_report(rows, mc, opt.use_total).dump(2) + "\n");
      write_text(opt.report + ".txt", table);
    }
    out << table;
    return any_all_failed ? kExitFailure : kExitOk;
  } catch (const BssError& e) {
    return report_error(err, e);
  }
}

enum class PlotKind { Phase, SortedHeadings };

/// phase: whitened components e_1..e_N per sample.
/// sorted-headings: ascending |r_i| per component over all nonzero headings,
/// computed on the raw input unless `whiten` is set.
inline SignalMatrix plot_data(const SignalMatrix& input, PlotKind kind, bool whiten) {
  if (kind == PlotKind::Phase) return gram_schmidt_whiten(input).components;

  validate(input);
  const SignalMatrix data = whiten ? gram_schmidt_whiten(input).components : input;
  const auto normalized = normalize_headings(compute_velocities(data));
  std::vector<std::size_t> indices;
  for (std::size_t k = 0; k < normalized.zero.size(); ++k)
    if (!normalized.zero[k]) indices.push_back(k);
  if (indices.size() < 2) throw BssError(ErrorCode::TooFewHeadings, "input has fewer than two nonzero headings");
  SignalMatrix out(data.channels(), indices.size());
  for (std::size_t i = 0; i < data.channels(); ++i) {
    const auto sorted = sort_component(normalized.headings, indices, i);
    std::copy(sorted.values.begin(), sorted.values.end(), out.channel(i).begin());
  }
  return out;
}

inline int cmd_plotdata(const std::string& input, const std::string& kind, const std::string& output, bool whiten,
                        std::ostream& out, std::ostream& err) {
  PlotKind k;
  if (kind == "phase") {
    k = PlotKind::Phase;
  } else if (kind == "sorted-headings") {
    k = PlotKind::SortedHeadings;
  } else {
    err << "usage error: unknown plot kind '" << kind << "' (expected phase or sorted-headings)\n";
    return kExitUsage;
  }
  try {
    const auto table = read_csv_file(input);
    const SignalMatrix data = plot_data(table.signal, k, whiten);
    write_csv_file(output, data, numbered_header(k == PlotKind::Phase ? "e" : "sorted", data.channels()));
    out << "wrote " << data.samples() << " rows to " << output << '\n';
    return kExitOk;
  } catch (const BssError& e) {
    return report_error(err, e);
  }
}

}  // namespace sparsebss::cli

#endif  // SPARSEBSS_CLI_HPP
