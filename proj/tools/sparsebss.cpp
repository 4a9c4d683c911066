// Command-line front end: simulate, separate, evaluate, montecarlo, plotdata.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sparsebss/cli.hpp"

namespace cli = sparsebss::cli;

namespace {

sparsebss::Method parse_method(const std::string& s) {
  return s == "mhc" ? sparsebss::Method::MHC : sparsebss::Method::Global;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-source blind separation by phase-space heading clustering"};
  app.require_subcommand(1);

  // simulate
  std::string sim_config, sim_preset, sim_out = ".";
  auto* sim = app.add_subcommand("simulate", "Generate sources.csv and mixtures.csv from a scenario");
  auto* sim_src = sim->add_option("config", sim_config, "Scenario JSON file");
  sim->add_option("--preset", sim_preset, "Bundled scenario: two-pulse | shifted-uniform")->excludes(sim_src);
  sim->add_option("-o,--out", sim_out, "Output directory");

  // separate
  cli::SeparateOptions sep;
  std::string sep_method = "global";
  auto* sepc = app.add_subcommand("separate", "Extract sources from a mixtures CSV");
  sepc->add_option("input", sep.input, "Mixtures CSV (one column per channel)")->required();
  sepc->add_option("-o,--out", sep.output, "Estimates CSV")->required();
  sepc->add_option("--report", sep.report, "Sidecar JSON report (default <out>.json)");
  sepc->add_option("--method", sep_method, "global | mhc")->check(CLI::IsMember({"global", "mhc"}));
  sepc->add_option("--vth", sep.params.v_th, "Velocity acceptance threshold in (0,1)");
  sepc->add_option("--alpha", sep.params.alpha, "Epsilon scale factor in (0,1]");
  sepc->add_option("--sample-rate", sep.sample_rate_hz, "Sample rate metadata in Hz");

  // evaluate
  std::string ev_actual, ev_est, ev_report;
  auto* evc = app.add_subcommand("evaluate", "Associate estimates with known sources and score them");
  evc->add_option("actual", ev_actual, "Actual sources CSV")->required();
  evc->add_option("estimates", ev_est, "Estimated sources CSV")->required();
  evc->add_option("-o,--report", ev_report, "JSON report path (a .txt table is written alongside)")->required();

  // montecarlo
  std::string mc_config, mc_preset, mc_method = "global";
  cli::MonteCarloCliOptions mc;
  mc.mc.threads = cli::default_threads();
  double mc_noise = -1.0;
  auto* mcc = app.add_subcommand("montecarlo", "Repeated noisy separation; RMS error table");
  auto* mc_src = mcc->add_option("config", mc_config, "Scenario JSON file");
  mcc->add_option("--preset", mc_preset, "Bundled scenario: two-pulse | shifted-uniform")->excludes(mc_src);
  mcc->add_option("--method", mc_method, "global | mhc")->check(CLI::IsMember({"global", "mhc"}));
  mcc->add_option("--vth", mc.v_th, "One or more velocity thresholds (one table row each)");
  mcc->add_option("--alpha", mc.alpha, "Epsilon scale factor in (0,1]");
  mcc->add_option("--noise-sd", mc_noise, "Override the scenario noise sd");
  mcc->add_option("--sets", mc.mc.sets, "Number of sets");
  mcc->add_option("--runs", mc.mc.runs_per_set, "Runs per set");
  mcc->add_option("--threads", mc.mc.threads, "Worker threads (default $SPARSEBSS_THREADS or all cores)");
  mcc->add_flag("--total", mc.use_total, "Tabulate RMS_tot instead of RMS_max");
  mcc->add_option("-o,--report", mc.report, "JSON report path (a .txt table is written alongside)");

  // plotdata
  std::string pd_input, pd_kind, pd_out;
  bool pd_whiten = false;
  auto* pdc = app.add_subcommand("plotdata", "Emit phase-plot or sorted-heading data as CSV");
  pdc->add_option("input", pd_input, "Input CSV")->required();
  pdc->add_option("--kind", pd_kind, "phase | sorted-headings")->required();
  pdc->add_option("-o,--out", pd_out, "Output CSV")->required();
  pdc->add_flag("--whiten", pd_whiten, "Whiten before computing sorted headings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  try {
    if (*sim) {
      if (sim_config.empty() && sim_preset.empty()) {
        std::cerr << "usage error: give a config file or --preset\n";
        return cli::kExitUsage;
      }
      return cli::cmd_simulate(cli::resolve_config(sim_config, sim_preset), sim_out, std::cout, std::cerr);
    }
    if (*sepc) {
      sep.params.method = parse_method(sep_method);
      return cli::cmd_separate(sep, std::cout, std::cerr);
    }
    if (*evc) return cli::cmd_evaluate(ev_actual, ev_est, ev_report, std::cout, std::cerr);
    if (*mcc) {
      if (mc_config.empty() && mc_preset.empty()) {
        std::cerr << "usage error: give a config file or --preset\n";
        return cli::kExitUsage;
      }
      mc.method = parse_method(mc_method);
      if (mc_noise >= 0.0) mc.noise_sd = mc_noise;
      return cli::cmd_montecarlo(cli::resolve_config(mc_config, mc_preset), mc, std::cout, std::cerr);
    }
    if (*pdc) return cli::cmd_plotdata(pd_input, pd_kind, pd_out, pd_whiten, std::cout, std::cerr);
  } catch (const sparsebss::BssError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitFailure;
  }
  return cli::kExitUsage;
}
