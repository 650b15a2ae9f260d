#include "ura/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <thread>

namespace ura {

using nlohmann::json;

Eigen::VectorXd awgn_channel(const Eigen::VectorXd& x_sum, double N0_half,
                             Rng& rng) {
  double sd = std::sqrt(std::max(N0_half, 1e-30));
  Eigen::VectorXd y(x_sum.size());
  for (Eigen::Index i = 0; i < x_sum.size(); ++i) {
    y[i] = x_sum[i] + sd * rng.next_normal();
  }
  return y;
}

PueBreakdown compute_pue(const std::vector<MessageBits>& sent,
                         const std::vector<MessageBits>& decoded) {
  PueBreakdown out;
  std::set<MessageBits> sent_set(sent.begin(), sent.end());
  std::set<MessageBits> decoded_set(decoded.begin(), decoded.end());
  out.distinct_sent = static_cast<int64_t>(sent_set.size());
  for (const auto& m : sent_set) {
    if (!decoded_set.count(m)) ++out.miss_count;
  }
  for (const auto& m : decoded_set) {
    if (!sent_set.count(m)) ++out.false_alarm_count;
  }
  out.pue = sent.empty() ? 0.0
                         : static_cast<double>(out.miss_count) /
                               static_cast<double>(sent.size());
  return out;
}

uint64_t cell_dict_seed(uint64_t master_seed, int64_t cell_id, int64_t trial,
                        bool fresh_per_trial) {
  uint64_t base = substream_seed(master_seed, 0xD1C7ull);
  return chain_seed(base, static_cast<uint64_t>(cell_id),
                    fresh_per_trial ? static_cast<uint64_t>(trial) + 1 : 0);
}

uint64_t cell_parity_seed(uint64_t master_seed, int64_t cell_id) {
  uint64_t base = substream_seed(master_seed, 0x7EEull);
  return chain_seed(base, static_cast<uint64_t>(cell_id), 0);
}

TrialReport simulate_trial(const TrialContext& ctx, uint64_t trial_seed) {
  auto t0 = std::chrono::steady_clock::now();
  const SystemConfig& cfg = ctx.config;
  Rng rng(trial_seed);

  std::vector<MessageBits> sent(cfg.K_a);
  std::vector<IndexSequence> seqs(cfg.K_a);
  for (int64_t k = 0; k < cfg.K_a; ++k) {
    MessageBits m(cfg.B);
    for (int64_t b = 0; b < cfg.B; ++b) m[b] = rng.next_bit();
    seqs[k] = encode_outer(*ctx.profile, m);
    sent[k] = std::move(m);
  }

  SectionSparseSignal sig = superpose(
      std::span<const IndexSequence>(seqs.data(), seqs.size()),
      static_cast<int>(cfg.L), cfg.J);
  Eigen::VectorXd x_sum = Eigen::VectorXd::Zero(cfg.n);
  for (int l = 0; l < sig.L; ++l) {
    for (const auto& [index, mult] : sig.counts[l]) {
      x_sum += static_cast<double>(mult) * ctx.dict->column(l, index);
    }
  }

  Eigen::VectorXd y = awgn_channel(x_sum, cfg.N0_half, rng);
  // AMP operates on the noise-normalized observation.
  Eigen::VectorXd y_norm = y / std::sqrt(std::max(cfg.N0_half, 1e-30));

  AmpResult amp = run_amp(y_norm, *ctx.dict, ctx.amp);
  auto support = extract_support(amp, ctx.support_threshold);
  DecodedList decoded = decode_outer(*ctx.profile, support, cfg.K_a);
  PueBreakdown score = compute_pue(sent, decoded.messages);

  TrialReport report;
  report.trial_seed = trial_seed;
  report.config = cfg;
  report.pue = score.pue;
  report.miss_count = score.miss_count;
  report.false_alarm_count = score.false_alarm_count;
  report.distinct_sent = score.distinct_sent;
  report.amp_iters = amp.state.iter;
  report.tau2_final = amp.state.tau2;
  report.overflow = decoded.overflow;
  auto t1 = std::chrono::steady_clock::now();
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return report;
}

TrialReport simulate_trial(const SystemConfig& config, uint64_t trial_seed) {
  Dictionary dict = Dictionary::generate(
      config.n, static_cast<int>(config.L), config.J, config.P,
      cell_dict_seed(config.master_seed, 0, 0, false));
  TreeCodeProfile profile = build_profile(
      static_cast<int>(config.B), static_cast<int>(config.L), config.J,
      cell_parity_seed(config.master_seed, 0));
  TrialContext ctx;
  ctx.config = config;
  ctx.dict = &dict;
  ctx.profile = &profile;
  ctx.amp = make_amp_params(config);
  return simulate_trial(ctx, trial_seed);
}

namespace {

struct TrialSlot {
  std::optional<TrialReport> report;
  std::string error;
};

void aggregate_cell(const std::vector<TrialSlot>& slots, CellResult& cell) {
  std::vector<double> pues;
  double miss_sum = 0.0, fa_sum = 0.0, iter_sum = 0.0, tau2_sum = 0.0;
  for (const TrialSlot& slot : slots) {
    if (!slot.report) continue;
    const TrialReport& r = *slot.report;
    pues.push_back(r.pue);
    miss_sum += static_cast<double>(r.miss_count);
    fa_sum += static_cast<double>(r.false_alarm_count);
    iter_sum += r.amp_iters;
    tau2_sum += r.tau2_final;
  }
  cell.completed = static_cast<int64_t>(pues.size());
  double m = static_cast<double>(cell.completed);
  if (cell.completed > 0) {
    double mean = 0.0;
    for (double v : pues) mean += v;
    mean /= m;
    cell.pue_mean = mean;
    if (cell.completed > 1) {
      double ss = 0.0;
      for (double v : pues) ss += (v - mean) * (v - mean);
      cell.pue_stderr = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
    }
    double ka = static_cast<double>(cell.config.K_a);
    cell.miss_rate = miss_sum / (m * ka);
    cell.fa_rate = fa_sum / (m * ka);
    cell.amp_iters_mean = iter_sum / m;
    cell.tau2_final_mean = tau2_sum / m;
  }
  int64_t failed = cell.trials - cell.completed;
  cell.degraded = failed * 10 > cell.trials;
}

}  // namespace

CampaignReport run_campaign(const std::vector<CellSpec>& cells,
                            const HarnessOptions& options,
                            uint64_t master_seed) {
  CampaignReport report;
  report.master_seed = master_seed;
  report.trials_per_cell = options.trials;

  for (size_t ci = 0; ci < cells.size(); ++ci) {
    const CellSpec& spec = cells[ci];
    CellResult cell;
    cell.cell_id = static_cast<int64_t>(ci);
    cell.config = spec.config;
    cell.eb_n0_db = spec.eb_n0_db;
    cell.trials = options.trials;

    TreeCodeProfile profile;
    std::optional<Dictionary> shared_dict;
    std::string setup_error;
    try {
      profile = build_profile(
          static_cast<int>(spec.config.B), static_cast<int>(spec.config.L),
          spec.config.J, cell_parity_seed(master_seed, cell.cell_id),
          options.allocation, options.list_cap);
      if (!options.fresh_dict_per_trial) {
        shared_dict = Dictionary::generate(
            spec.config.n, static_cast<int>(spec.config.L), spec.config.J,
            spec.config.P,
            cell_dict_seed(master_seed, cell.cell_id, 0, false));
      }
    } catch (const std::exception& e) {
      setup_error = e.what();
    }

    std::vector<TrialSlot> slots(options.trials);
    if (!setup_error.empty()) {
      for (int64_t t = 0; t < options.trials; ++t) {
        slots[t].error = setup_error;
      }
    } else {
      AmpParams amp = make_amp_params(spec.config);
      auto run_one = [&](int64_t t) {
        uint64_t seed =
            chain_seed(master_seed, static_cast<uint64_t>(cell.cell_id),
                       static_cast<uint64_t>(t));
        try {
          TrialContext ctx;
          ctx.config = spec.config;
          ctx.profile = &profile;
          ctx.amp = amp;
          ctx.support_threshold = options.support_threshold;
          std::optional<Dictionary> fresh;
          if (options.fresh_dict_per_trial) {
            fresh = Dictionary::generate(
                spec.config.n, static_cast<int>(spec.config.L), spec.config.J,
                spec.config.P,
                cell_dict_seed(master_seed, cell.cell_id, t, true));
            ctx.dict = &*fresh;
          } else {
            ctx.dict = &*shared_dict;
          }
          slots[t].report = simulate_trial(ctx, seed);
        } catch (const std::exception& e) {
          slots[t].error = e.what();
        }
      };
      int workers = std::max(1, options.parallelism);
      if (workers == 1) {
        for (int64_t t = 0; t < options.trials; ++t) run_one(t);
      } else {
        std::atomic<int64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
          pool.emplace_back([&]() {
            for (;;) {
              int64_t t = next.fetch_add(1);
              if (t >= options.trials) break;
              run_one(t);
            }
          });
        }
        for (auto& th : pool) th.join();
      }
    }

    aggregate_cell(slots, cell);
    // Failures recorded with their trial seeds, in trial order, so any
    // failed trial can be replayed directly.
    for (int64_t t = 0; t < options.trials; ++t) {
      if (!slots[t].report) {
        cell.failures.emplace_back(
            chain_seed(master_seed, static_cast<uint64_t>(cell.cell_id),
                       static_cast<uint64_t>(t)),
            slots[t].error);
      }
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string campaign_csv(const CampaignReport& report) {
  std::string out =
      "cell_id,K_a,n,L,J,eb_n0_db,r_in,r_out,trials,pue_mean,pue_stderr,"
      "miss_rate,fa_rate,amp_iters_mean,tau2_final_mean\n";
  for (const CellResult& c : report.cells) {
    const SystemConfig& k = c.config;
    double r_in = static_cast<double>(k.L) * k.J / static_cast<double>(k.n);
    double r_out =
        static_cast<double>(k.B) / (static_cast<double>(k.L) * k.J);
    out += std::to_string(c.cell_id) + ',' + std::to_string(k.K_a) + ',' +
           std::to_string(k.n) + ',' + std::to_string(k.L) + ',' +
           std::to_string(k.J) + ',' + fmt_double(c.eb_n0_db) + ',' +
           fmt_double(r_in) + ',' + fmt_double(r_out) + ',' +
           std::to_string(c.trials) + ',' + fmt_double(c.pue_mean) + ',' +
           fmt_double(c.pue_stderr) + ',' + fmt_double(c.miss_rate) + ',' +
           fmt_double(c.fa_rate) + ',' + fmt_double(c.amp_iters_mean) + ',' +
           fmt_double(c.tau2_final_mean) + '\n';
  }
  return out;
}

std::string campaign_json(const CampaignReport& report) {
  json doc;
  doc["master_seed"] = report.master_seed;
  doc["trials_per_cell"] = report.trials_per_cell;
  doc["cells"] = json::array();
  for (const CellResult& c : report.cells) {
    json jc;
    jc["cell_id"] = c.cell_id;
    jc["K_a"] = c.config.K_a;
    jc["n"] = c.config.n;
    jc["L"] = c.config.L;
    jc["J"] = c.config.J;
    jc["B"] = c.config.B;
    jc["eb_n0_db"] = c.eb_n0_db;
    jc["trials"] = c.trials;
    jc["completed"] = c.completed;
    jc["pue_mean"] = c.pue_mean;
    jc["pue_stderr"] = c.pue_stderr;
    jc["miss_rate"] = c.miss_rate;
    jc["fa_rate"] = c.fa_rate;
    jc["amp_iters_mean"] = c.amp_iters_mean;
    jc["tau2_final_mean"] = c.tau2_final_mean;
    jc["degraded"] = c.degraded;
    jc["failures"] = json::array();
    for (const auto& [seed, msg] : c.failures) {
      jc["failures"].push_back({{"seed", seed}, {"error", msg}});
    }
    doc["cells"].push_back(std::move(jc));
  }
  return doc.dump(2);
}

std::string trial_json(const TrialReport& r) {
  json doc;
  doc["trial_seed"] = r.trial_seed;
  doc["config"] = {{"K_a", r.config.K_a}, {"n", r.config.n},
                   {"L", r.config.L},     {"J", r.config.J},
                   {"B", r.config.B},     {"N0_half", r.config.N0_half},
                   {"P", r.config.P},     {"master_seed", r.config.master_seed}};
  doc["pue"] = r.pue;
  doc["miss_count"] = r.miss_count;
  doc["false_alarm_count"] = r.false_alarm_count;
  doc["distinct_sent"] = r.distinct_sent;
  doc["amp_iters"] = r.amp_iters;
  doc["tau2_final"] = r.tau2_final;
  doc["overflow"] = r.overflow;
  doc["wall_time_ms"] = r.wall_time_ms;
  return doc.dump(2);
}

}  // namespace ura
