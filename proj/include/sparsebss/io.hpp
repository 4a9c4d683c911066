#ifndef SPARSEBSS_IO_HPP
#define SPARSEBSS_IO_HPP

#include <charconv>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparsebss/core.hpp"
#include "sparsebss/evaluation.hpp"
#include "sparsebss/separation.hpp"
#include "sparsebss/simgen.hpp"

namespace sparsebss {

// ---------------------------------------------------------------------------
// CSV: one header row naming the channels, then one row per sample with one
// column per channel, values printed with 17 significant digits.

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

struct CsvTable {
  std::vector<std::string> header;
  SignalMatrix signal;
};

inline void write_csv(std::ostream& os, const SignalMatrix& signal, const std::vector<std::string>& header) {
  if (header.size() != signal.channels())
    throw BssError(ErrorCode::DimensionMismatch, "CSV header size differs from channel count");
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  for (std::size_t n = 0; n < signal.samples(); ++n) {
    for (std::size_t c = 0; c < signal.channels(); ++c) os << (c ? "," : "") << format_double(signal(c, n));
    os << '\n';
  }
}

inline std::vector<std::string> numbered_header(const std::string& prefix, std::size_t count) {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < count; ++i) h.push_back(prefix + "_" + std::to_string(i + 1));
  return h;
}

inline void write_csv_file(const std::string& path, const SignalMatrix& signal, const std::vector<std::string>& header) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw BssError(ErrorCode::ParseError, "cannot open " + path + " for writing");
  write_csv(os, signal, header);
  if (!os) throw BssError(ErrorCode::ParseError, "failed writing " + path);
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline CsvTable read_csv(std::istream& is, const std::string& name = "<csv>", double sample_rate_hz = 1.0) {
  std::string line;
  std::size_t line_no = 0;
  CsvTable table;
  while (std::getline(is, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) break;
  }
  if (line_no == 0 || detail::trim(line).empty()) throw BssError(ErrorCode::ParseError, name + ": empty file");
  for (auto& f : detail::split_fields(line)) table.header.push_back(detail::trim(f));
  const std::size_t n_ch = table.header.size();

  std::vector<std::vector<double>> columns(n_ch);
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != n_ch)
      throw BssError(ErrorCode::ParseError, name + ":" + std::to_string(line_no) + ": expected " +
                                                std::to_string(n_ch) + " fields, found " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < n_ch; ++c) {
      const std::string f = detail::trim(fields[c]);
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size())
        throw BssError(ErrorCode::ParseError, name + ":" + std::to_string(line_no) + ": invalid number '" + f + "'");
      columns[c].push_back(v);
    }
  }
  const std::size_t len = columns.empty() ? 0 : columns.front().size();
  table.signal = SignalMatrix(n_ch, len, sample_rate_hz);
  for (std::size_t c = 0; c < n_ch; ++c)
    std::copy(columns[c].begin(), columns[c].end(), table.signal.channel(c).begin());
  return table;
}

inline CsvTable read_csv_file(const std::string& path, double sample_rate_hz = 1.0) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw BssError(ErrorCode::ParseError, "cannot open " + path);
  return read_csv(is, path, sample_rate_hz);
}

// ---------------------------------------------------------------------------
// Scenario configuration (JSON).

enum class SourceKind { Gaussian, ShiftedUniform };

struct ScenarioConfig {
  std::string name;
  SourceKind kind = SourceKind::Gaussian;
  std::vector<GaussianSourceSpec> pulses;  // Gaussian
  std::size_t length = 100;                // ShiftedUniform
  std::size_t shift = 0;                   // ShiftedUniform
  std::uint64_t source_seed = 0;           // ShiftedUniform
  double sample_rate_hz = 1.0;
  double duration_s = 0.0;                 // Gaussian
  Matrix mixing;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;                  // noise seed / Monte Carlo master seed

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

inline nlohmann::ordered_json to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["name"] = cfg.name;
  nlohmann::ordered_json src;
  if (cfg.kind == SourceKind::Gaussian) {
    src["kind"] = "gaussian";
    src["pulses"] = nlohmann::ordered_json::array();
    for (const auto& p : cfg.pulses)
      src["pulses"].push_back({{"amplitude", p.amplitude}, {"center_s", p.center_s}, {"width_s", p.width_s}});
  } else {
    src["kind"] = "shifted_uniform";
    src["length"] = cfg.length;
    src["shift"] = cfg.shift;
    src["source_seed"] = cfg.source_seed;
  }
  j["sources"] = src;
  j["sample_rate_hz"] = cfg.sample_rate_hz;
  if (cfg.kind == SourceKind::Gaussian) j["duration_s"] = cfg.duration_s;
  j["mixing"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < cfg.mixing.rows(); ++r) {
    const auto row = cfg.mixing.row(r);
    j["mixing"].push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["noise_sd"] = cfg.noise_sd;
  j["seed"] = cfg.seed;
  return j;
}

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

template <class T>
T get_key(const nlohmann::json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw BssError(ErrorCode::ParseError, where + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw BssError(ErrorCode::ParseError, where + ": key '" + key + "' has the wrong type");
  }
}

template <class T>
T get_key_or(const nlohmann::json& obj, const std::string& key, T fallback, const std::string& where) {
  return obj.contains(key) ? get_key<T>(obj, key, where) : fallback;
}

}  // namespace detail

/// Parses a scenario document. Errors name the source and, for syntax errors,
/// the line and column.
inline ScenarioConfig parse_scenario(const std::string& text, const std::string& name = "<config>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw BssError(ErrorCode::ParseError, name + ":" + detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0) +
                                              ": syntax error: " + e.what());
  }
  if (!j.is_object()) throw BssError(ErrorCode::ParseError, name + ": top level must be an object");

  ScenarioConfig cfg;
  cfg.name = detail::get_key_or<std::string>(j, "name", "", name);
  const auto src = detail::get_key<nlohmann::json>(j, "sources", name);
  if (!src.is_object()) throw BssError(ErrorCode::ParseError, name + ": 'sources' must be an object");
  const auto kind = detail::get_key<std::string>(src, "kind", name + ": sources");
  if (kind == "gaussian") {
    cfg.kind = SourceKind::Gaussian;
    const auto pulses = detail::get_key<nlohmann::json>(src, "pulses", name + ": sources");
    if (!pulses.is_array() || pulses.empty())
      throw BssError(ErrorCode::ParseError, name + ": 'sources.pulses' must be a non-empty array");
    for (std::size_t i = 0; i < pulses.size(); ++i) {
      const std::string where = name + ": sources.pulses[" + std::to_string(i) + "]";
      GaussianSourceSpec p;
      p.amplitude = detail::get_key<double>(pulses[i], "amplitude", where);
      p.center_s = detail::get_key<double>(pulses[i], "center_s", where);
      p.width_s = detail::get_key<double>(pulses[i], "width_s", where);
      if (!(p.width_s > 0.0)) throw BssError(ErrorCode::ParseError, where + ": width_s must be positive");
      cfg.pulses.push_back(p);
    }
    cfg.duration_s = detail::get_key<double>(j, "duration_s", name);
    if (!(cfg.duration_s > 0.0)) throw BssError(ErrorCode::ParseError, name + ": duration_s must be positive");
  } else if (kind == "shifted_uniform") {
    cfg.kind = SourceKind::ShiftedUniform;
    cfg.length = detail::get_key<std::size_t>(src, "length", name + ": sources");
    cfg.shift = detail::get_key<std::size_t>(src, "shift", name + ": sources");
    cfg.source_seed = detail::get_key_or<std::uint64_t>(src, "source_seed", 0, name + ": sources");
    if (cfg.shift > cfg.length) throw BssError(ErrorCode::ParseError, name + ": sources.shift exceeds sources.length");
  } else {
    throw BssError(ErrorCode::ParseError, name + ": unknown source kind '" + kind + "'");
  }

  cfg.sample_rate_hz = detail::get_key_or<double>(j, "sample_rate_hz", 1.0, name);
  if (!(cfg.sample_rate_hz > 0.0)) throw BssError(ErrorCode::ParseError, name + ": sample_rate_hz must be positive");

  const auto rows = detail::get_key<std::vector<std::vector<double>>>(j, "mixing", name);
  const std::size_t n_src = cfg.kind == SourceKind::Gaussian ? cfg.pulses.size() : 2;
  if (rows.empty()) throw BssError(ErrorCode::ParseError, name + ": 'mixing' must not be empty");
  cfg.mixing = Matrix(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != n_src)
      throw BssError(ErrorCode::ParseError, name + ": mixing row " + std::to_string(r) + " must have " +
                                                std::to_string(n_src) + " entries");
    std::copy(rows[r].begin(), rows[r].end(), cfg.mixing.row(r).begin());
  }

  cfg.noise_sd = detail::get_key_or<double>(j, "noise_sd", 0.0, name);
  if (!(cfg.noise_sd >= 0.0)) throw BssError(ErrorCode::ParseError, name + ": noise_sd must be non-negative");
  cfg.seed = detail::get_key_or<std::uint64_t>(j, "seed", 0, name);
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw BssError(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str(), path);
}

inline ScenarioConfig two_pulse_config(double noise_sd = 0.0) {
  ScenarioConfig cfg;
  cfg.name = "two-pulse";
  cfg.kind = SourceKind::Gaussian;
  cfg.pulses = two_pulse_sources();
  cfg.sample_rate_hz = kTwoPulseSampleRate;
  cfg.duration_s = kTwoPulseDuration;
  cfg.mixing = two_pulse_mixing();
  cfg.noise_sd = noise_sd;
  cfg.seed = 1;
  return cfg;
}

inline ScenarioConfig shifted_uniform_config() {
  ScenarioConfig cfg;
  cfg.name = "shifted-uniform";
  cfg.kind = SourceKind::ShiftedUniform;
  cfg.length = 100;
  cfg.shift = 90;
  cfg.source_seed = 7;
  cfg.sample_rate_hz = 1.0;
  cfg.mixing = shifted_uniform_mixing();
  cfg.seed = 1;
  return cfg;
}

inline SignalMatrix generate_sources(const ScenarioConfig& cfg) {
  if (cfg.kind == SourceKind::Gaussian) return generate_gaussian_sources(cfg.pulses, cfg.sample_rate_hz, cfg.duration_s);
  SignalMatrix s = generate_shifted_uniform_sources(cfg.length, cfg.shift, cfg.source_seed);
  return SignalMatrix(s.matrix(), cfg.sample_rate_hz);
}

inline Scenario to_scenario(const ScenarioConfig& cfg) { return {generate_sources(cfg), cfg.mixing, cfg.noise_sd}; }

// ---------------------------------------------------------------------------
// Reports.

inline nlohmann::ordered_json separation_report(const SeparationResult& res, const MethodParams& params) {
  nlohmann::ordered_json j;
  j["method"] = to_string(params.method);
  j["v_th"] = params.v_th;
  j["alpha"] = params.alpha;
  j["directions"] = nlohmann::ordered_json::array();
  for (const auto& d : res.directions)
    j["directions"].push_back({{"unit_vector", d.unit_vector}, {"support_size", d.support_size}});
  j["iterations"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < res.iterations.size(); ++i) {
    const auto& it = res.iterations[i];
    j["iterations"].push_back({{"iteration", i + 1},
                               {"accepted_headings", it.accepted_headings},
                               {"cluster_size", it.cluster_size},
                               {"epsilon", it.epsilon},
                               {"residual_energy", it.residual_energy}});
  }
  j["whitening_transform"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < res.whitening_transform.rows(); ++r) {
    const auto row = res.whitening_transform.row(r);
    j["whitening_transform"].push_back(std::vector<double>(row.begin(), row.end()));
  }
  return j;
}

struct SingleEvaluation {
  Association association;
  std::vector<double> rms_tot;
  std::vector<double> rms_max;
};

/// Normalizes both sides to unit rms, associates and scores a single run.
inline SingleEvaluation evaluate_once(const SignalMatrix& actual, const SignalMatrix& estimates) {
  if (actual.channels() != estimates.channels() || actual.samples() != estimates.samples())
    throw BssError(ErrorCode::DimensionMismatch, "actual and estimated signals differ in shape");
  const SignalMatrix a = normalize_rms(actual);
  const SignalMatrix e = normalize_rms(estimates);
  SingleEvaluation out{associate(a, e), {}, {}};
  for (std::size_t r = 0; r < a.channels(); ++r) {
    const auto err = pointwise_error(a.channel(r), e.channel(out.association.estimate_for_source[r]),
                                     out.association.signs[r]);
    const RmsMetrics m = rms_metrics({err});
    out.rms_tot.push_back(m.total);
    out.rms_max.push_back(m.max);
  }
  return out;
}

inline nlohmann::ordered_json evaluation_report(const SingleEvaluation& ev) {
  nlohmann::ordered_json j;
  j["sources"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < ev.rms_tot.size(); ++r)
    j["sources"].push_back({{"source", r + 1},
                            {"estimate", ev.association.estimate_for_source[r] + 1},
                            {"sign", ev.association.signs[r]},
                            {"correlation", ev.association.correlations[r]},
                            {"rms_tot", ev.rms_tot[r]},
                            {"rms_max", ev.rms_max[r]}});
  return j;
}

inline std::string evaluation_table(const SingleEvaluation& ev) {
  std::ostringstream os;
  os << "source | estimate | sign | correlation | RMS_tot | RMS_max\n";
  for (std::size_t r = 0; r < ev.rms_tot.size(); ++r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%6zu | %8zu | %+4d | %11.8f | %.6g | %.6g\n", r + 1,
                  ev.association.estimate_for_source[r] + 1, ev.association.signs[r], ev.association.correlations[r],
                  ev.rms_tot[r], ev.rms_max[r]);
    os << buf;
  }
  return os.str();
}

/// One Monte Carlo table row; `report` is empty when every run failed.
struct MonteCarloRow {
  MethodParams params;
  std::size_t total_runs = 0;
  std::size_t failed_runs = 0;
  std::optional<EvalReport> report;
  std::string failure;
};

/// One line per method setting: "mean (sd)" per source, scaled by 1e3, then
/// the failure rate.
inline std::string montecarlo_table(const std::vector<MonteCarloRow>& rows, bool use_total) {
  std::ostringstream os;
  const std::size_t n_src = [&] {
    for (const auto& r : rows)
      if (r.report) return r.report->sources.size();
    return std::size_t{0};
  }();
  os << "Method";
  for (std::size_t s = 0; s < n_src; ++s) os << " | Source " << s + 1 << " (x10^3)";
  os << " | failures\n";
  for (const auto& r : rows) {
    char head[64];
    std::snprintf(head, sizeof head, "%s v_th = %g", r.params.method == Method::Global ? "Global" : "MHC",
                  r.params.v_th);
    os << head;
    for (std::size_t s = 0; s < n_src; ++s) {
      if (!r.report) {
        os << " | -";
        continue;
      }
      const auto& st = r.report->sources[s];
      char cell[64];
      std::snprintf(cell, sizeof cell, " | %.3g (%.3g)", 1e3 * (use_total ? st.rms_tot_mean : st.rms_max_mean),
                    1e3 * (use_total ? st.rms_tot_sd : st.rms_max_sd));
      os << cell;
    }
    char fail[32];
    std::snprintf(fail, sizeof fail, " | %.1f%%\n",
                  r.total_runs ? 100.0 * static_cast<double>(r.failed_runs) / r.total_runs : 0.0);
    os << fail;
  }
  return os.str();
}

inline nlohmann::ordered_json montecarlo_report(const std::vector<MonteCarloRow>& rows, const MonteCarloOptions& opt,
                                                bool use_total) {
  nlohmann::ordered_json j;
  j["sets"] = opt.sets;
  j["runs_per_set"] = opt.runs_per_set;
  j["master_seed"] = opt.master_seed;
  j["metric"] = use_total ? "rms_tot" : "rms_max";
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["method"] = to_string(r.params.method);
    row["v_th"] = r.params.v_th;
    row["alpha"] = r.params.alpha;
    row["total_runs"] = r.total_runs;
    row["failed_runs"] = r.failed_runs;
    row["failure_rate"] = r.total_runs ? static_cast<double>(r.failed_runs) / r.total_runs : 0.0;
    row["sources"] = nlohmann::ordered_json::array();
    if (r.report) {
      for (const auto& st : r.report->sources)
        row["sources"].push_back({{"rms_tot_mean", st.rms_tot_mean},
                                  {"rms_tot_sd", st.rms_tot_sd},
                                  {"rms_max_mean", st.rms_max_mean},
                                  {"rms_max_sd", st.rms_max_sd},
                                  {"rms_tot_per_set", st.rms_tot_per_set},
                                  {"rms_max_per_set", st.rms_max_per_set}});
    }
    if (!r.failure.empty()) row["first_failure"] = r.failure;
    j["rows"].push_back(row);
  }
  return j;
}

}  // namespace sparsebss

#endif  // SPARSEBSS_IO_HPP
