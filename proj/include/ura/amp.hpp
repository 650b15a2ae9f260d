#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "ura/dictionary.hpp"
#include "ura/model.hpp"

namespace ura {

// Parameters of one AMP run over the noise-normalized observation
// y/sqrt(N0/2).  In those units the active-coefficient amplitude is
// sqrt(P_hat) with P_hat = n snr / L and the noise floor is 1.
struct AmpParams {
  double P_hat = 1.0;
  double p0 = 0.5;             // per-component inactivity prior
  double undersampling = 1.0;  // 2^J L / n, formed from exact integers
  double noise_floor = 1.0;    // residual variance with no signal
  int max_iters = 50;
  double rel_tol = 1e-6;       // stop on relative tau2 change
  bool onsager = true;         // test switch; disabling breaks the SE match
  // Optional per-iteration observer (iter, tau2, mean activity, max activity).
  std::function<void(int, double, double, double)> trace;
};

AmpParams make_amp_params(const SystemConfig& config);

// Posterior-mean denoiser for a {0, sqrt(P_hat)} scalar in Gaussian noise of
// variance tau2, evaluated in sigmoid form so large |x| saturates cleanly.
double denoise(double x, double tau2, double P_hat, double p0);
double denoise_derivative(double x, double tau2, double P_hat, double p0);
inline double denoise(double x, double tau2, const AmpParams& p) {
  return denoise(x, tau2, p.P_hat, p.p0);
}
inline double denoise_derivative(double x, double tau2, const AmpParams& p) {
  return denoise_derivative(x, tau2, p.P_hat, p.p0);
}

struct AmpState {
  Eigen::VectorXd rho_hat;   // length L 2^J
  Eigen::VectorXd residual;  // length n
  double tau2 = 0.0;
  int iter = 0;
  std::vector<double> tau2_history;  // tau2_history[t] = tau2 after t iterations
};

AmpState init_amp_state(const Eigen::VectorXd& y, int64_t cols);

// One synchronous update: effective observation, denoise, residual with the
// Onsager correction, tau2 = |residual|^2 / n.  Throws "divergence" when tau2
// exceeds 1e6 x its initial value.
void amp_iterate(const Eigen::VectorXd& y, const Dictionary& dict,
                 AmpState& state, const AmpParams& params);

struct SectionRanking {
  std::vector<uint32_t> indices;   // sorted by activity descending
  std::vector<double> activity;    // rho_hat / sqrt(P_hat), same order
};

struct AmpResult {
  AmpState state;
  bool converged = false;
  std::vector<SectionRanking> ranking;  // one entry per section
};

AmpResult run_amp(const Eigen::VectorXd& y, const Dictionary& dict,
                  const AmpParams& params);

// Per-section indices with activity >= threshold; an empty section falls back
// to its single top-ranked index.  Indices are sorted ascending.
std::vector<std::vector<uint32_t>> extract_support(const AmpResult& result,
                                                   double threshold = 0.5);

// Scalar MMSE of the {0, sqrt(P_hat)} prior observed through noise of
// variance tau2, by Gauss-Hermite quadrature.
double se_mmse(double tau2, double P_hat, double p0);

// Predicted tau2 trajectory (length T+1, t = 0..T):
//   tau2_0 = noise_floor + u (1-p0) P_hat,
//   tau2_{t+1} = noise_floor + u mmse(tau2_t).
std::vector<double> state_evolution(const AmpParams& params, int T);

}  // namespace ura
