#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "ura/config.hpp"
#include "ura/harness.hpp"
#include "ura/rng.hpp"

using namespace ura;

namespace {

MessageBits bits_from_string(const std::string& s) {
  MessageBits m;
  for (char c : s) m.push_back(c == '1' ? 1 : 0);
  return m;
}

SystemConfig small_config() {
  SystemConfig config;
  config.K_a = 2;
  config.n = 256;
  config.L = 4;
  config.J = 6;
  config.B = 14;
  config.N0_half = 0.5;
  config.P = 0.625;  // P_hat = n (P / N0_half) / L = 80
  config.master_seed = 5;
  return config;
}

}  // namespace

TEST_CASE("channel noise is reproducible and calibrated") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(10000);
  Rng rng1(61), rng2(61);
  Eigen::VectorXd y1 = awgn_channel(x, 0.25, rng1);
  Eigen::VectorXd y2 = awgn_channel(x, 0.25, rng2);
  CHECK((y1 - y2).norm() == 0.0);
  const double var = y1.squaredNorm() / 10000.0;
  // var(chi^2 mean) = 2 sigma^4 / n -> sd about 0.0035
  CHECK(var == doctest::Approx(0.25).epsilon(3.0 * 0.015));

  Eigen::VectorXd offset = Eigen::VectorXd::Constant(100, 7.0);
  Rng rng3(62);
  Eigen::VectorXd y3 = awgn_channel(offset, 1e-40, rng3);
  CHECK((y3 - offset).cwiseAbs().maxCoeff() < 1e-10);  // floored variance
}

TEST_CASE("unrecovered-fraction accounting follows the contract") {
  auto m1 = bits_from_string("000");
  auto m2 = bits_from_string("001");
  auto m3 = bits_from_string("010");
  auto m4 = bits_from_string("011");

  PueBreakdown a = compute_pue({m1, m2, m3}, {m2, m3, m4});
  CHECK(a.miss_count == 1);
  CHECK(a.false_alarm_count == 1);
  CHECK(a.distinct_sent == 3);
  CHECK(a.pue == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // Decoding a superset satisfies everybody; extras count only as FAs.
  PueBreakdown b = compute_pue({m1, m2}, {m1, m2, m3, m4});
  CHECK(b.pue == 0.0);
  CHECK(b.false_alarm_count == 2);

  // Two users sending the same message are both satisfied by one delivery,
  // but pue still divides by the user count.
  PueBreakdown c = compute_pue({m1, m1, m2}, {m1});
  CHECK(c.distinct_sent == 2);
  CHECK(c.miss_count == 1);
  CHECK(c.pue == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  PueBreakdown d = compute_pue({m1, m1}, {m1});
  CHECK(d.pue == 0.0);
  CHECK(d.miss_count == 0);
}

TEST_CASE("misses plus deliveries conserve the distinct-sent count") {
  Rng rng(63);
  for (int t = 0; t < 200; ++t) {
    std::vector<MessageBits> sent, decoded;
    const int ns = 1 + int(rng.next_below(6));
    const int nd = int(rng.next_below(6));
    for (int i = 0; i < ns; ++i) {
      MessageBits m(4);
      for (auto& b : m) b = rng.next_bit();
      sent.push_back(m);
    }
    for (int i = 0; i < nd; ++i) {
      MessageBits m(4);
      for (auto& b : m) b = rng.next_bit();
      decoded.push_back(m);
    }
    PueBreakdown r = compute_pue(sent, decoded);
    int64_t delivered = 0;
    std::vector<MessageBits> seen;
    for (const auto& m : sent) {
      if (std::find(seen.begin(), seen.end(), m) != seen.end()) continue;
      seen.push_back(m);
      if (std::find(decoded.begin(), decoded.end(), m) != decoded.end())
        ++delivered;
    }
    CHECK(r.miss_count + delivered == r.distinct_sent);
    CHECK(r.pue >= 0.0);
    CHECK(r.pue <= 1.0);
  }
}

TEST_CASE("seed derivations separate dictionary, parity, and trials") {
  CHECK(cell_dict_seed(9, 0, 5, false) == cell_dict_seed(9, 0, 11, false));
  CHECK(cell_dict_seed(9, 0, 5, true) != cell_dict_seed(9, 0, 6, true));
  CHECK(cell_dict_seed(9, 0, 0, false) != cell_dict_seed(9, 1, 0, false));
  CHECK(cell_parity_seed(9, 0) != cell_parity_seed(9, 1));
  CHECK(cell_parity_seed(9, 0) != cell_dict_seed(9, 0, 0, false));
}

TEST_CASE("a clean high-SNR trial delivers every user") {
  SystemConfig config = small_config();
  int perfect = 0;
  for (int s = 0; s < 20; ++s) {
    TrialReport rep = simulate_trial(config, chain_seed(100, s, 0));
    if (rep.pue == 0.0 && rep.false_alarm_count == 0) ++perfect;
    CHECK(rep.distinct_sent >= 1);
    CHECK(rep.distinct_sent <= 2);
    CHECK(rep.amp_iters >= 1);
    CHECK(rep.wall_time_ms >= 0.0);
  }
  CHECK(perfect >= 19);
}

TEST_CASE("trial reports are deterministic in the seed") {
  SystemConfig config = small_config();
  TrialReport a = simulate_trial(config, 777);
  TrialReport b = simulate_trial(config, 777);
  CHECK(a.pue == b.pue);
  CHECK(a.miss_count == b.miss_count);
  CHECK(a.false_alarm_count == b.false_alarm_count);
  CHECK(a.tau2_final == b.tau2_final);
  CHECK(a.amp_iters == b.amp_iters);
  TrialReport c = simulate_trial(config, 778);
  CHECK(c.trial_seed != a.trial_seed);
}

TEST_CASE("campaigns aggregate identically at any parallelism") {
  LoadedConfig loaded = parse_config_json(
      R"({"K_a": 2, "n": 256, "L": 4, "J": 6, "B": 14, "N0_half": 0.5,
          "P": 0.3125, "master_seed": 17,
          "sweep": {"eb_n0_db": [8.0, 10.0]}})");
  std::vector<CellSpec> cells = expand_sweep(loaded);
  REQUIRE(cells.size() == 2);

  HarnessOptions serial;
  serial.trials = 6;
  serial.parallelism = 1;
  HarnessOptions wide = serial;
  wide.parallelism = 8;

  CampaignReport r1 = run_campaign(cells, serial, 17);
  CampaignReport r8 = run_campaign(cells, wide, 17);
  CHECK(campaign_csv(r1) == campaign_csv(r8));
  CHECK(campaign_json(r1) == campaign_json(r8));
  REQUIRE(r1.cells.size() == 2);
  CHECK(r1.cells[0].completed == 6);
  CHECK_FALSE(r1.cells[0].degraded);
}

TEST_CASE("campaign rows match standalone trials") {
  SystemConfig config = small_config();
  CellSpec cell;
  cell.config = config;
  cell.eb_n0_db = eb_n0_db_from_power(config);
  HarnessOptions options;
  options.trials = 4;

  CampaignReport campaign = run_campaign({cell}, options, config.master_seed);
  REQUIRE(campaign.cells.size() == 1);
  const CellResult& result = campaign.cells[0];

  // Re-run the same four trials by hand through the shared-context path.
  Dictionary dict = Dictionary::generate(
      config.n, int(config.L), int(config.J), config.P,
      cell_dict_seed(config.master_seed, 0, 0, false));
  TreeCodeProfile profile =
      build_profile(int(config.B), int(config.L), int(config.J),
                    cell_parity_seed(config.master_seed, 0));
  TrialContext ctx;
  ctx.config = config;
  ctx.dict = &dict;
  ctx.profile = &profile;
  ctx.amp = make_amp_params(config);
  double pue_sum = 0.0;
  for (int t = 0; t < 4; ++t) {
    TrialReport rep =
        simulate_trial(ctx, chain_seed(config.master_seed, 0, t));
    pue_sum += rep.pue;
  }
  CHECK(result.pue_mean == doctest::Approx(pue_sum / 4.0).epsilon(1e-14));
  CHECK(result.trials == 4);
  CHECK(result.completed == 4);
}

TEST_CASE("error rate falls as the channel improves") {
  LoadedConfig loaded = parse_config_json(
      R"({"K_a": 2, "n": 256, "L": 4, "J": 8, "B": 20, "N0_half": 0.5,
          "eb_n0_db": 2.0, "master_seed": 29,
          "sweep": {"eb_n0_db": [2.0, 5.0, 8.0, 11.0]}})");
  std::vector<CellSpec> cells = expand_sweep(loaded);
  HarnessOptions options;
  options.trials = 30;
  options.parallelism = 1;
  CampaignReport report = run_campaign(cells, options, 29);
  REQUIRE(report.cells.size() == 4);
  // Allow a two-stderr inversion between neighbors; require a clear drop
  // across the whole span.
  for (size_t i = 1; i < report.cells.size(); ++i) {
    const auto& prev = report.cells[i - 1];
    const auto& cur = report.cells[i];
    CHECK(cur.pue_mean <=
          prev.pue_mean + 2.0 * (prev.pue_stderr + cur.pue_stderr) + 1e-12);
  }
  CHECK(report.cells.front().pue_mean > report.cells.back().pue_mean);
  CHECK(report.cells.back().pue_mean < 0.05);
}

TEST_CASE("oversized dictionaries degrade the cell instead of aborting") {
  SystemConfig config;
  config.K_a = 2;
  config.n = int64_t(1) << 22;
  config.L = 32;
  config.J = 18;  // 32 * 2^18 * 2^22 * 8 bytes is far beyond the cap
  config.B = 100;
  config.P = 1.0;
  CellSpec cell;
  cell.config = config;
  cell.eb_n0_db = eb_n0_db_from_power(config);
  HarnessOptions options;
  options.trials = 3;
  CampaignReport report = run_campaign({cell}, options, 3);
  REQUIRE(report.cells.size() == 1);
  const CellResult& result = report.cells[0];
  CHECK(result.trials == 3);
  CHECK(result.completed == 0);
  CHECK(result.degraded);
  REQUIRE(result.failures.size() == 3);
  for (size_t t = 0; t < result.failures.size(); ++t) {
    CHECK(result.failures[t].second.find("dictionary too large") !=
          std::string::npos);
    CHECK(result.failures[t].first == chain_seed(3, 0, int64_t(t)));
  }
}

TEST_CASE("csv output is fixed-width and stable") {
  SystemConfig config = small_config();
  CellSpec cell;
  cell.config = config;
  cell.eb_n0_db = eb_n0_db_from_power(config);
  HarnessOptions options;
  options.trials = 2;
  CampaignReport report = run_campaign({cell}, options, 5);
  std::string csv = campaign_csv(report);

  // Header plus one row, 15 comma-separated columns each.
  size_t newline = csv.find('\n');
  REQUIRE(newline != std::string::npos);
  std::string header = csv.substr(0, newline);
  CHECK(std::count(header.begin(), header.end(), ',') == 14);
  std::string row = csv.substr(newline + 1);
  REQUIRE(!row.empty());
  CHECK(std::count(row.begin(), row.end(), ',') >= 14);
  CHECK(header.find("cell_id") == 0);
  CHECK(header.find("pue_mean") != std::string::npos);
  CHECK(header.find("wall") == std::string::npos);  // no timing columns
  CHECK(csv.find("nan") == std::string::npos);
}

TEST_CASE("trial JSON carries timing, campaign JSON does not") {
  SystemConfig config = small_config();
  TrialReport rep = simulate_trial(config, 99);
  std::string tj = trial_json(rep);
  CHECK(tj.find("wall_time_ms") != std::string::npos);
  CHECK(tj.find("pue") != std::string::npos);

  CellSpec cell;
  cell.config = config;
  cell.eb_n0_db = eb_n0_db_from_power(config);
  HarnessOptions options;
  options.trials = 1;
  CampaignReport report = run_campaign({cell}, options, 5);
  std::string cj = campaign_json(report);
  CHECK(cj.find("wall") == std::string::npos);
  CHECK(cj.find("pue_mean") != std::string::npos);
  CHECK(cj.find("degraded") != std::string::npos);
}
