#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ura/amp.hpp"
#include "ura/dictionary.hpp"
#include "ura/model.hpp"
#include "ura/quadrature.hpp"
#include "ura/rng.hpp"

using namespace ura;

namespace {

Eigen::VectorXd noisy_observation(const Dictionary& dict,
                                  const std::vector<IndexSequence>& seqs,
                                  double noise_sd, Rng& rng) {
  SectionSparseSignal sig =
      superpose(seqs, dict.sections(), dict.bits_per_section());
  Eigen::VectorXd y = dict.multiply(signal_vector(sig));
  for (int64_t i = 0; i < y.size(); ++i) y(i) += noise_sd * rng.next_normal();
  return y;
}

}  // namespace

TEST_CASE("denoiser saturates to the prior support endpoints") {
  const double P_hat = 9.0, tau2 = 0.5, p0 = 0.9;
  CHECK(denoise(1e6, tau2, P_hat, p0) == 3.0);
  CHECK(denoise(-1e6, tau2, P_hat, p0) == 0.0);
  CHECK(denoise_derivative(1e6, tau2, P_hat, p0) == 0.0);
  CHECK(denoise_derivative(-1e6, tau2, P_hat, p0) == 0.0);
}

TEST_CASE("denoiser midpoint sits at half amplitude") {
  // Posterior activity is exactly 1/2 where the prior log-odds balance the
  // likelihood ratio: x* = sqrt(P)/2 + (tau2/sqrt(P)) ln(p0/(1-p0)).
  const double P_hat = 4.0, tau2 = 0.7, p0 = 0.85;
  const double x_star =
      0.5 * std::sqrt(P_hat) +
      tau2 / std::sqrt(P_hat) * std::log(p0 / (1.0 - p0));
  CHECK(denoise(x_star, tau2, P_hat, p0) ==
        doctest::Approx(0.5 * std::sqrt(P_hat)).epsilon(1e-10));
  // and the response is strictly increasing through it
  CHECK(denoise(x_star - 0.1, tau2, P_hat, p0) <
        denoise(x_star, tau2, P_hat, p0));
  CHECK(denoise(x_star + 0.1, tau2, P_hat, p0) >
        denoise(x_star, tau2, P_hat, p0));
}

TEST_CASE("denoiser derivative matches finite differences") {
  Rng rng(41);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const double P_hat = 0.5 + 20.0 * rng.next_unit();
    const double tau2 = 0.05 + 3.0 * rng.next_unit();
    const double p0 = 0.05 + 0.9 * rng.next_unit();
    const double x = 12.0 * (rng.next_unit() - 0.5);
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    const double fd = (denoise(x + h, tau2, P_hat, p0) -
                       denoise(x - h, tau2, P_hat, p0)) /
                      (2.0 * h);
    const double an = denoise_derivative(x, tau2, P_hat, p0);
    if (std::abs(an) < 1e-12) continue;  // deep saturation: fd is 0/0 noise
    CHECK(an == doctest::Approx(fd).epsilon(1e-5));
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("denoiser derivative peaks at the midpoint") {
  const double P_hat = 6.0, tau2 = 0.4, p0 = 0.95;
  const double x_star =
      0.5 * std::sqrt(P_hat) +
      tau2 / std::sqrt(P_hat) * std::log(p0 / (1.0 - p0));
  const double peak = denoise_derivative(x_star, tau2, P_hat, p0);
  CHECK(peak == doctest::Approx(0.25 * P_hat / tau2).epsilon(1e-10));
  for (double dx : {-1.0, -0.3, 0.3, 1.0})
    CHECK(denoise_derivative(x_star + dx, tau2, P_hat, p0) < peak);
}

TEST_CASE("derived parameters feed the iteration correctly") {
  SystemConfig config;
  config.K_a = 8;
  config.n = 1000;
  config.L = 16;
  config.J = 10;
  config.B = 120;
  config.N0_half = 0.5;
  config.P = 2.0;
  AmpParams params = make_amp_params(config);
  CHECK(params.undersampling ==
        doctest::Approx(1024.0 * 16.0 / 1000.0).epsilon(1e-14));
  CHECK(params.noise_floor == 1.0);
  // P_hat = n snr / L with snr = P / N0_half
  CHECK(params.P_hat == doctest::Approx(1000.0 * 4.0 / 16.0).epsilon(1e-12));
  DerivedParams derived = derive_params(config);
  CHECK(params.P_hat == doctest::Approx(derived.P_hat).epsilon(1e-12));
  CHECK(params.p0 == doctest::Approx(derived.p0).epsilon(1e-14));
}

TEST_CASE("initial state mirrors the observation") {
  Eigen::VectorXd y(4);
  y << 1.0, -2.0, 0.5, 3.0;
  AmpState state = init_amp_state(y, 32);
  CHECK(state.rho_hat.size() == 32);
  CHECK(state.rho_hat.cwiseAbs().maxCoeff() == 0.0);
  CHECK((state.residual - y).norm() == 0.0);
  CHECK(state.tau2 == doctest::Approx(y.squaredNorm() / 4.0).epsilon(1e-14));
  REQUIRE(state.tau2_history.size() == 1);
  CHECK(state.tau2_history[0] == state.tau2);
}

TEST_CASE("pure noise with a near-one prior stays silent") {
  Dictionary dict = Dictionary::generate(64, 2, 4, 1.0, 7);
  Rng rng(8);
  Eigen::VectorXd y(64);
  for (int i = 0; i < 64; ++i) y(i) = 0.1 * rng.next_normal();
  AmpParams params;
  params.P_hat = 32.0;
  params.p0 = 1.0 - 1e-9;
  params.undersampling = 0.5;
  params.max_iters = 5;
  AmpResult result = run_amp(y, dict, params);
  CHECK(result.state.rho_hat.cwiseAbs().maxCoeff() < 1e-6);
  for (const auto& rank : result.ranking)
    for (double a : rank.activity) CHECK(a < 0.5);
}

TEST_CASE("single user at high SNR is recovered in one pass") {
  const int64_t n = 64;
  SystemConfig config;
  config.K_a = 1;
  config.n = n;
  config.L = 1;
  config.J = 2;
  config.B = 2;
  config.N0_half = 1.0;  // unit noise: raw observations are already normalized
  config.P = 50.0 / static_cast<double>(n);  // P_hat = 50
  Dictionary dict = Dictionary::generate(n, 1, 2, config.P, 11);
  Rng rng(42);
  Eigen::VectorXd y = noisy_observation(dict, {{2}}, 1.0, rng);
  AmpParams params = make_amp_params(config);
  AmpResult result = run_amp(y, dict, params);
  CHECK(result.converged);
  const double amp_hat = result.state.rho_hat(2) / std::sqrt(params.P_hat);
  CHECK(amp_hat > 0.99);
  CHECK(result.ranking[0].indices[0] == 2);
  auto support = extract_support(result);
  REQUIRE(support.size() == 1);
  CHECK(support[0] == std::vector<uint32_t>{2});
}

TEST_CASE("multi-section problem at high SNR decodes exactly") {
  const int64_t n = 192;
  const int L = 4, J = 6;
  SystemConfig config;
  config.K_a = 1;
  config.n = n;
  config.L = L;
  config.J = J;
  config.B = 24;
  config.N0_half = 1.0;
  config.P = 40.0 * L / static_cast<double>(n);  // P_hat = 40
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Dictionary dict =
        Dictionary::generate(n, L, J, config.P, 1000 + trial);
    Rng rng(2000 + trial);
    IndexSequence truth;
    for (int l = 0; l < L; ++l)
      truth.push_back(rng.next_below(uint32_t(1) << J));
    Eigen::VectorXd y = noisy_observation(dict, {truth}, 1.0, rng);
    AmpParams params = make_amp_params(config);
    AmpResult result = run_amp(y, dict, params);
    auto support = extract_support(result);
    bool ok = true;
    for (int l = 0; l < L; ++l)
      ok = ok && support[l] == std::vector<uint32_t>{truth[l]};
    if (ok) ++exact;
  }
  CHECK(exact >= 99);
}

TEST_CASE("residual variance settles near the noise floor") {
  const int64_t n = 512;
  SystemConfig config;
  config.K_a = 4;
  config.n = n;
  config.L = 8;
  config.J = 8;
  config.B = 40;
  config.N0_half = 1.0;
  config.P = 2.0 * 8.0 * 2.0 * 8.0 / static_cast<double>(n);  // E_in = 2
  Dictionary dict = Dictionary::generate(n, 8, 8, config.P, 55);
  Rng rng(56);
  std::vector<IndexSequence> seqs;
  for (int k = 0; k < 4; ++k) {
    IndexSequence seq;
    for (int l = 0; l < 8; ++l) seq.push_back(rng.next_below(256));
    seqs.push_back(seq);
  }
  Eigen::VectorXd y = noisy_observation(dict, seqs, 1.0, rng);
  AmpParams params = make_amp_params(config);
  AmpResult result = run_amp(y, dict, params);
  CHECK(result.converged);
  CHECK(result.state.tau2 < 1.3);
  CHECK(result.state.tau2 > 0.7);
  // After the transient the history never moves away from the floor.
  const auto& hist = result.state.tau2_history;
  for (size_t t = 2; t < hist.size(); ++t)
    CHECK(hist[t] <= hist[t - 1] * 1.05);
}

TEST_CASE("iterates are scale consistent") {
  // Scaling the dictionary power by c^2 and the observation by c multiplies
  // rho_hat by c and tau2 by c^2.
  const int64_t n = 128;
  const double c = 3.0;
  Dictionary base = Dictionary::generate(n, 2, 5, 1.0, 77);
  Dictionary scaled = Dictionary::generate(n, 2, 5, c * c, 77);
  Rng rng(78);
  Eigen::VectorXd y = noisy_observation(base, {{3, 17}}, 0.3, rng);

  AmpParams params;
  params.P_hat = 1.0 * n / 2.0;
  params.p0 = 1.0 - 1.0 / 32.0;
  params.undersampling = 64.0 / n;
  params.max_iters = 6;
  params.rel_tol = 0.0;
  AmpParams params_scaled = params;
  params_scaled.P_hat = params.P_hat * c * c;
  params_scaled.noise_floor = c * c;

  AmpState s1 = init_amp_state(y, 64);
  AmpState s2 = init_amp_state((c * y).eval(), 64);
  for (int t = 0; t < 4; ++t) {
    amp_iterate(y, base, s1, params);
    amp_iterate((c * y).eval(), scaled, s2, params_scaled);
  }
  CHECK(s2.tau2 == doctest::Approx(c * c * s1.tau2).epsilon(1e-9));
  for (int i = 0; i < 64; ++i)
    CHECK(s2.rho_hat(i) == doctest::Approx(c * s1.rho_hat(i))
                               .epsilon(1e-9)
                               .scale(std::sqrt(params_scaled.P_hat)));
}

TEST_CASE("divergence guard trips when the scales are inconsistent") {
  // An observation 10 orders of magnitude below the parameter scale starts
  // tau2 at 1e-20; the variance floor then exceeds 1e6 x that start.
  const int64_t n = 16;
  Dictionary dict = Dictionary::generate(n, 1, 3, 1.0, 9);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(n, 1e-10);
  AmpParams params;
  bool threw = false;
  try {
    run_amp(y, dict, params);
  } catch (const std::runtime_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("divergence") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("support extraction thresholds and fallback") {
  AmpResult result;
  result.ranking.resize(2);
  result.ranking[0].indices = {5, 1, 7};
  result.ranking[0].activity = {0.9, 0.6, 0.1};
  result.ranking[1].indices = {2, 0};
  result.ranking[1].activity = {0.3, 0.2};
  auto sup = extract_support(result, 0.5);
  REQUIRE(sup.size() == 2);
  CHECK(sup[0] == std::vector<uint32_t>{1, 5});  // ascending
  CHECK(sup[1] == std::vector<uint32_t>{2});     // fallback to the top entry
  auto all = extract_support(result, 0.05);
  CHECK(all[0] == std::vector<uint32_t>{1, 5, 7});
  CHECK(all[1] == std::vector<uint32_t>{0, 2});
}

TEST_CASE("scalar MMSE limits") {
  const double P_hat = 12.0;
  for (double p0 : {0.5, 0.9, 0.999}) {
    // Noiseless channel resolves the coefficient completely.
    CHECK(se_mmse(1e-12, P_hat, p0) < 1e-6);
    // Useless channel leaves the prior variance P_hat p0 (1 - p0).
    CHECK(se_mmse(1e12, P_hat, p0) ==
          doctest::Approx(P_hat * p0 * (1.0 - p0)).epsilon(1e-4));
    // In between it is positive and below the prior variance.
    const double mid = se_mmse(1.0, P_hat, p0);
    CHECK(mid > 0.0);
    CHECK(mid < P_hat * p0 * (1.0 - p0) + 1e-12);
  }
}

TEST_CASE("scalar MMSE matches a brute-force Bayes estimator") {
  const double P_hat = 9.0, tau2 = 1.7, p0 = 0.92;
  Rng rng(43);
  const int trials = 400000;
  double err = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double x0 = rng.next_unit() >= p0 ? std::sqrt(P_hat) : 0.0;
    const double obs = x0 + std::sqrt(tau2) * rng.next_normal();
    const double est = denoise(obs, tau2, P_hat, p0);
    err += (est - x0) * (est - x0);
  }
  err /= trials;
  const double predicted = se_mmse(tau2, P_hat, p0);
  CHECK(err == doctest::Approx(predicted).epsilon(0.02));
}

TEST_CASE("state evolution trajectory shape") {
  AmpParams params;
  params.P_hat = 40.0;
  params.p0 = 1.0 - 1.0 / 64.0;
  params.undersampling = 2.0;
  params.noise_floor = 1.0;
  auto traj = state_evolution(params, 12);
  REQUIRE(traj.size() == 13);
  CHECK(traj[0] ==
        doctest::Approx(1.0 + 2.0 * (1.0 / 64.0) * 40.0).epsilon(1e-12));
  for (size_t t = 1; t < traj.size(); ++t) {
    CHECK(traj[t] <= traj[t - 1] + 1e-12);  // contraction from above
    CHECK(traj[t] >= 1.0);
    CHECK(traj[t] ==
          doctest::Approx(1.0 + 2.0 * se_mmse(traj[t - 1], params.P_hat,
                                              params.p0))
              .epsilon(1e-10));
  }
}

TEST_CASE("state evolution collapses to the floor without users") {
  AmpParams params;
  params.P_hat = 20.0;
  params.p0 = 1.0;
  params.undersampling = 3.0;
  auto traj = state_evolution(params, 4);
  for (size_t t = 0; t < traj.size(); ++t)
    CHECK(traj[t] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("empirical residual tracks state evolution") {
  // Moderate size keeps this a smoke-level comparison; the acceptance suite
  // runs the full-scale version.
  const int64_t n = 1639;  // undersampling L 2^J / n about 5
  const int L = 8, J = 10;
  const int K_a = 4;
  SystemConfig config;
  config.K_a = K_a;
  config.n = n;
  config.L = L;
  config.J = J;
  config.B = 40;
  config.N0_half = 1.0;
  config.P = 2.0 * L * J * 2.0 / static_cast<double>(n);  // E_in = 2
  AmpParams params = make_amp_params(config);
  auto predicted = state_evolution(params, 12);

  const int seeds = 12;
  std::vector<double> mean_tau2(4, 0.0);
  for (int s = 0; s < seeds; ++s) {
    Dictionary dict =
        Dictionary::generate(n, L, J, config.P, 900 + s);
    Rng rng(chain_seed(44, s, 0));
    std::vector<IndexSequence> seqs;
    for (int k = 0; k < K_a; ++k) {
      IndexSequence seq;
      for (int l = 0; l < L; ++l) seq.push_back(rng.next_below(1u << J));
      seqs.push_back(seq);
    }
    Eigen::VectorXd y = noisy_observation(dict, seqs, 1.0, rng);
    AmpState state = init_amp_state(y, int64_t(L) << J);
    for (int t = 0; t < 3; ++t) {
      amp_iterate(y, dict, state, params);
      mean_tau2[t + 1] += state.tau2 / seeds;
    }
    mean_tau2[0] += state.tau2_history[0] / seeds;
  }
  for (int t = 0; t <= 3; ++t) {
    CHECK(mean_tau2[t] ==
          doctest::Approx(predicted[t]).epsilon(0.10));
  }
}
