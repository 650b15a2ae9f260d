#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ura/amp.hpp"
#include "ura/config.hpp"
#include "ura/dictionary.hpp"
#include "ura/model.hpp"
#include "ura/rng.hpp"
#include "ura/tree_code.hpp"

namespace ura {

// y = x_sum + z, z iid N(0, N0_half); N0_half floored at 1e-30.
Eigen::VectorXd awgn_channel(const Eigen::VectorXd& x_sum, double N0_half,
                             Rng& rng);

struct PueBreakdown {
  double pue = 0.0;            // missing distinct messages / K_a
  int64_t miss_count = 0;      // |distinct sent \ decoded|
  int64_t false_alarm_count = 0;  // |decoded \ sent|
  int64_t distinct_sent = 0;
};

// sent holds one message per user (duplicates allowed; a delivered duplicate
// is satisfied once); pue divides by the user count, not the distinct count.
PueBreakdown compute_pue(const std::vector<MessageBits>& sent,
                         const std::vector<MessageBits>& decoded);

struct TrialReport {
  uint64_t trial_seed = 0;
  SystemConfig config;
  double pue = 1.0;
  int64_t miss_count = 0;
  int64_t false_alarm_count = 0;
  int64_t distinct_sent = 0;
  int amp_iters = 0;
  double tau2_final = 0.0;
  bool overflow = false;  // outer-decode frontier cap was hit
  double wall_time_ms = 0.0;
};

// Shared per-cell state: one dictionary and one parity profile reused by all
// of the cell's trials.
struct TrialContext {
  SystemConfig config;
  const Dictionary* dict = nullptr;
  const TreeCodeProfile* profile = nullptr;
  AmpParams amp;
  double support_threshold = 0.5;
};

// One end-to-end trial: draw K_a messages, outer- and inner-encode, pass the
// superposition through AWGN, AMP-decode, outer-decode, score.
// Throws "dictionary too large" / "divergence"; campaigns record these
// per-seed instead of aborting.
TrialReport simulate_trial(const TrialContext& ctx, uint64_t trial_seed);

// Convenience form that builds the dictionary and parity profile itself.
TrialReport simulate_trial(const SystemConfig& config, uint64_t trial_seed);

struct CellResult {
  int64_t cell_id = 0;
  SystemConfig config;
  double eb_n0_db = 0.0;
  int64_t trials = 0;          // requested count
  int64_t completed = 0;       // trials that produced a report
  double pue_mean = 0.0;
  double pue_stderr = 0.0;
  double miss_rate = 0.0;
  double fa_rate = 0.0;
  double amp_iters_mean = 0.0;
  double tau2_final_mean = 0.0;
  bool degraded = false;       // > 10% of trials failed
  std::vector<std::pair<uint64_t, std::string>> failures;  // (seed, error)
};

struct CampaignReport {
  uint64_t master_seed = 0;
  int64_t trials_per_cell = 0;
  std::vector<CellResult> cells;
};

// Runs trials_per_cell trials in every cell with seeds
// chain_seed(master_seed, cell_id, trial); results are aggregated by trial
// index, so the output is bit-identical for any parallelism degree.
CampaignReport run_campaign(const std::vector<CellSpec>& cells,
                            const HarnessOptions& options,
                            uint64_t master_seed);

// Fixed-column CSV; wall-clock times never appear in campaign outputs.
std::string campaign_csv(const CampaignReport& report);
std::string campaign_json(const CampaignReport& report);
std::string trial_json(const TrialReport& report);

// Dictionary / parity-profile seeds derived from the campaign master seed.
uint64_t cell_dict_seed(uint64_t master_seed, int64_t cell_id, int64_t trial,
                        bool fresh_per_trial);
uint64_t cell_parity_seed(uint64_t master_seed, int64_t cell_id);

}  // namespace ura
