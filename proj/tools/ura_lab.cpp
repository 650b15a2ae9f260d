// Command-line front end: single trials with a full AMP trace, Monte Carlo
// sweeps, closed-form threshold reports, and potential-curve exports.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>

#include "CLI11.hpp"
#include "ura/amp.hpp"
#include "ura/config.hpp"
#include "ura/harness.hpp"
#include "ura/potential.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + dir + "/" + name);
  out << content;
}

json minimizer_json(const ura::MinimizerReport& r) {
  return json{{"eta_global", r.eta_global},
              {"value_global", r.value_global},
              {"eta_smallest_local", r.eta_smallest_local},
              {"value_smallest_local", r.value_smallest_local},
              {"is_unique", r.is_unique}};
}

json threshold_json(const ura::ThresholdReport& r) {
  return json{{"S_opt", r.S_opt},
              {"S_alg", r.S_alg},
              {"S_capacity", r.S_capacity},
              {"R_out_bound_finite", r.R_out_bound_finite},
              {"R_out_bound_asymptotic", r.R_out_bound_asymptotic},
              {"eta_bar", r.eta_bar}};
}

int run_simulate(const std::string& config_path, uint64_t seed, bool has_seed,
                 const std::string& out_dir) {
  ura::LoadedConfig loaded = ura::load_config_file(config_path);
  const ura::SystemConfig& cfg = loaded.system;

  ura::Dictionary dict = ura::Dictionary::generate(
      cfg.n, static_cast<int>(cfg.L), cfg.J, cfg.P,
      ura::cell_dict_seed(cfg.master_seed, 0, 0, false));
  ura::TreeCodeProfile profile = ura::build_profile(
      static_cast<int>(cfg.B), static_cast<int>(cfg.L), cfg.J,
      ura::cell_parity_seed(cfg.master_seed, 0), loaded.harness.allocation,
      loaded.harness.list_cap);

  ura::TrialContext ctx;
  ctx.config = cfg;
  ctx.dict = &dict;
  ctx.profile = &profile;
  ctx.amp = ura::make_amp_params(cfg);
  ctx.support_threshold = loaded.harness.support_threshold;
  ctx.amp.trace = [](int iter, double tau2, double mean_act, double max_act) {
    std::printf(
        "{\"iter\": %d, \"tau2\": %.10g, \"mean_activity\": %.10g, "
        "\"max_activity\": %.10g}\n",
        iter, tau2, mean_act, max_act);
  };

  uint64_t trial_seed =
      has_seed ? seed : ura::chain_seed(cfg.master_seed, 0, 0);
  ura::TrialReport report = ura::simulate_trial(ctx, trial_seed);
  std::string text = ura::trial_json(report);
  std::cout << text << "\n";
  if (!out_dir.empty()) write_file(out_dir, "trial.json", text);
  return kExitOk;
}

int run_sweep(const std::string& config_path, int64_t trials_override,
              uint64_t seed, bool has_seed, int parallel_override,
              const std::string& out_override,
              const std::string& format_override) {
  ura::LoadedConfig loaded = ura::load_config_file(config_path);
  ura::HarnessOptions options = loaded.harness;
  if (trials_override > 0) options.trials = trials_override;
  if (parallel_override > 0) options.parallelism = parallel_override;
  if (!out_override.empty()) options.out_dir = out_override;
  if (!format_override.empty()) options.format = format_override;
  uint64_t master = has_seed ? seed : loaded.system.master_seed;

  std::vector<ura::CellSpec> cells = ura::expand_sweep(loaded);
  ura::CampaignReport report = ura::run_campaign(cells, options, master);

  std::string csv = ura::campaign_csv(report);
  std::string js = ura::campaign_json(report);
  write_file(options.out_dir, "campaign.csv", csv);
  write_file(options.out_dir, "campaign.json", js);
  std::cout << (options.format == "json" ? js : csv);
  return kExitOk;
}

int run_thresholds(double alpha, double e_in, int64_t k_a, double snr, int j,
                   const std::string& out_dir) {
  ura::ThresholdReport report =
      ura::make_threshold_report(alpha, e_in, k_a, snr, j);
  std::string text = threshold_json(report).dump(2);
  std::cout << text << "\n";
  if (!out_dir.empty()) write_file(out_dir, "thresholds.json", text);
  return kExitOk;
}

int run_potential(const std::string& kind, int j, int64_t k_a, double s_in,
                  double e_in, double s, double alpha, int grid,
                  const std::string& out_dir) {
  ura::PotentialCurve curve;
  if (kind == "finite") {
    ura::FinitePotentialParams params;
    params.J = j;
    params.K_a = k_a;
    params.S_in = s_in;
    params.E_in = e_in;
    curve = ura::make_finite_curve(params, grid);
  } else if (kind == "limit") {
    curve = ura::make_limit_curve(s, e_in, alpha, grid);
  } else {
    throw ura::ConfigError("kind must be 'finite' or 'limit'");
  }

  std::string csv = "eta,value_bits,kind\n";
  const char* kind_name =
      curve.kind == ura::PotentialCurve::Kind::finite_J ? "finite" : "limit";
  for (size_t i = 0; i < curve.etas.size(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%s\n", curve.etas[i],
                  curve.values[i], kind_name);
    csv += buf;
  }
  ura::MinimizerReport mins = ura::find_minimizers(curve);
  std::string sidecar = minimizer_json(mins).dump(2);
  write_file(out_dir, "potential.csv", csv);
  write_file(out_dir, "minimizers.json", sidecar);
  std::cout << sidecar << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for concatenated unsourced random access"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format;
  uint64_t seed = 0;
  int64_t trials = 0;
  int parallel = 0;

  CLI::App* sim = app.add_subcommand("simulate", "one trial with AMP trace");
  sim->add_option("--config", config_path, "config file (JSON or TOML)")
      ->required();
  CLI::Option* sim_seed = sim->add_option("--seed", seed, "trial seed");
  sim->add_option("--out", out_dir, "output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo campaign");
  sweep->add_option("--config", config_path, "config file (JSON or TOML)")
      ->required();
  CLI::Option* sweep_seed = sweep->add_option("--seed", seed, "master seed");
  sweep->add_option("--trials", trials, "trials per cell");
  sweep->add_option("--parallel", parallel, "worker threads");
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--format", format, "stdout format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  double alpha = 2.0, e_in = 1.0, snr = 1.0, s_in = 1.0, s = 1.0;
  int64_t k_a = 100;
  int j = 16, grid = 10000;
  CLI::App* thr = app.add_subcommand("thresholds", "closed-form thresholds");
  thr->add_option("--alpha", alpha, "asymptotic ratio J/log2 K_a")->required();
  thr->add_option("--e-in", e_in, "inner energy per bit")->required();
  thr->add_option("--k-a", k_a, "active users (finite outer bound)");
  thr->add_option("--snr", snr, "per-user SNR (capacity bound)");
  thr->add_option("--j", j, "bits per section (finite outer bound)");
  thr->add_option("--out", out_dir, "output directory");

  std::string kind;
  CLI::App* pot = app.add_subcommand("potential", "potential curve export");
  pot->add_option("--kind", kind, "finite or limit")->required();
  pot->add_option("--j", j, "bits per section (finite)");
  pot->add_option("--k-a", k_a, "active users (finite)");
  pot->add_option("--s-in", s_in, "inner spectral efficiency (finite)");
  pot->add_option("--e-in", e_in, "inner energy per bit");
  pot->add_option("--s", s, "spectral efficiency (limit)");
  pot->add_option("--alpha", alpha, "asymptotic ratio (limit)");
  pot->add_option("--grid", grid, "grid points");
  pot->add_option("--out", out_dir, "output directory")->default_val(".");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      return run_simulate(config_path, seed, !sim_seed->empty(), out_dir);
    }
    if (sweep->parsed()) {
      return run_sweep(config_path, trials, seed, !sweep_seed->empty(),
                       parallel, out_dir, format);
    }
    if (thr->parsed()) {
      return run_thresholds(alpha, e_in, k_a, snr, j, out_dir);
    }
    if (pot->parsed()) {
      return run_potential(kind, j, k_a, s_in, e_in, s, alpha, grid, out_dir);
    }
  } catch (const ura::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::string what = e.what();
    std::cerr << "error: " << what << "\n";
    if (what.find("too large") != std::string::npos) return kExitResource;
    return 1;
  }
  return kExitOk;
}
