#include "ura/amp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ura/quadrature.hpp"

namespace ura {

namespace {

double clamp_prior(double p0) {
  if (p0 < 1e-12) return 1e-12;
  if (p0 > 1.0 - 1e-12) return 1.0 - 1e-12;
  return p0;
}

// Sigmoid computed branch-wise so exp never overflows.
double sigmoid(double g) {
  if (g >= 0.0) {
    return 1.0 / (1.0 + std::exp(-std::min(g, 700.0)));
  }
  double e = std::exp(std::max(g, -700.0));
  return e / (1.0 + e);
}

}  // namespace

AmpParams make_amp_params(const SystemConfig& config) {
  DerivedParams d = derive_params(config);
  AmpParams p;
  p.P_hat = d.P_hat;
  p.p0 = clamp_prior(d.p0);
  int64_t cols = (int64_t{1} << config.J) * config.L;
  p.undersampling = static_cast<double>(cols) / static_cast<double>(config.n);
  p.noise_floor = 1.0;  // observations are normalized by sqrt(N0/2)
  return p;
}

double denoise(double x, double tau2, double P_hat, double p0) {
  p0 = clamp_prior(p0);
  double sp = std::sqrt(P_hat);
  double lambda = std::log(p0) - std::log1p(-p0);
  double g = (sp * x - 0.5 * P_hat) / tau2 - lambda;
  if (g > 700.0) return sp;
  if (g < -700.0) return 0.0;
  return sp * sigmoid(g);
}

double denoise_derivative(double x, double tau2, double P_hat, double p0) {
  p0 = clamp_prior(p0);
  double sp = std::sqrt(P_hat);
  double lambda = std::log(p0) - std::log1p(-p0);
  double g = (sp * x - 0.5 * P_hat) / tau2 - lambda;
  if (g > 700.0 || g < -700.0) return 0.0;
  double s = sigmoid(g);
  return (P_hat / tau2) * s * (1.0 - s);
}

AmpState init_amp_state(const Eigen::VectorXd& y, int64_t cols) {
  AmpState state;
  state.rho_hat = Eigen::VectorXd::Zero(cols);
  state.residual = y;
  state.tau2 = y.squaredNorm() / static_cast<double>(y.size());
  state.iter = 0;
  state.tau2_history = {state.tau2};
  return state;
}

void amp_iterate(const Eigen::VectorXd& y, const Dictionary& dict,
                 AmpState& state, const AmpParams& params) {
  const int64_t n = dict.rows();
  const int64_t cols = dict.cols();
  if (y.size() != n || state.rho_hat.size() != cols ||
      state.residual.size() != n) {
    throw std::invalid_argument("amp dimensions inconsistent");
  }
  if (dict.power() <= 0.0) {
    throw std::invalid_argument("dictionary power unknown");
  }
  // Column scale that makes dict columns unit-norm in expectation; the
  // amplitude sqrt(P_hat) then lives in rho_hat, not in the matrix.
  const double c_a = 1.0 / std::sqrt(static_cast<double>(n) * dict.power() /
                                     static_cast<double>(dict.sections()));
  const double tau2_floor = 1e-12 * params.P_hat;

  Eigen::VectorXd x_eff(cols);
  dict.multiply_transpose(state.residual, x_eff);
  x_eff = c_a * x_eff + state.rho_hat;

  double tau2 = std::max(state.tau2, tau2_floor);
  double deriv_sum = 0.0;
  for (int64_t i = 0; i < cols; ++i) {
    double xi = x_eff[i];
    state.rho_hat[i] = denoise(xi, tau2, params.P_hat, params.p0);
    deriv_sum += denoise_derivative(xi, tau2, params.P_hat, params.p0);
  }
  double mean_deriv = deriv_sum / static_cast<double>(cols);

  Eigen::VectorXd a_rho(n);
  dict.multiply(state.rho_hat, a_rho);
  Eigen::VectorXd new_residual = y - c_a * a_rho;
  if (params.onsager) {
    new_residual += (params.undersampling * mean_deriv) * state.residual;
  }
  state.residual = std::move(new_residual);
  state.tau2 = std::max(
      state.residual.squaredNorm() / static_cast<double>(n), tau2_floor);
  state.tau2_history.push_back(state.tau2);
  ++state.iter;

  if (!state.tau2_history.empty() &&
      state.tau2 > 1e6 * state.tau2_history.front()) {
    throw std::runtime_error("divergence");
  }
}

AmpResult run_amp(const Eigen::VectorXd& y, const Dictionary& dict,
                  const AmpParams& params) {
  AmpResult result;
  result.state = init_amp_state(y, dict.cols());
  const double sp = std::sqrt(params.P_hat);

  for (int t = 0; t < params.max_iters; ++t) {
    double prev = result.state.tau2;
    amp_iterate(y, dict, result.state, params);
    if (params.trace) {
      double mean_act = result.state.rho_hat.mean() / sp;
      double max_act = result.state.rho_hat.maxCoeff() / sp;
      params.trace(result.state.iter, result.state.tau2, mean_act, max_act);
    }
    if (std::abs(result.state.tau2 - prev) < params.rel_tol * result.state.tau2) {
      result.converged = true;
      break;
    }
  }

  const int64_t L = dict.sections();
  const int64_t m = dict.section_size();
  result.ranking.resize(L);
  for (int64_t l = 0; l < L; ++l) {
    SectionRanking& sec = result.ranking[l];
    std::vector<uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    const double* base = result.state.rho_hat.data() + l * m;
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
      if (base[a] != base[b]) return base[a] > base[b];
      return a < b;
    });
    sec.indices = std::move(order);
    sec.activity.resize(m);
    for (int64_t j = 0; j < m; ++j) {
      sec.activity[j] = base[sec.indices[j]] / sp;
    }
  }
  return result;
}

std::vector<std::vector<uint32_t>> extract_support(const AmpResult& result,
                                                   double threshold) {
  std::vector<std::vector<uint32_t>> support(result.ranking.size());
  for (size_t l = 0; l < result.ranking.size(); ++l) {
    const SectionRanking& sec = result.ranking[l];
    std::vector<uint32_t>& out = support[l];
    for (size_t j = 0; j < sec.indices.size(); ++j) {
      if (sec.activity[j] >= threshold) out.push_back(sec.indices[j]);
    }
    if (out.empty() && !sec.indices.empty()) {
      out.push_back(sec.indices[0]);
    }
    std::sort(out.begin(), out.end());
  }
  return support;
}

double se_mmse(double tau2, double P_hat, double p0) {
  p0 = clamp_prior(p0);
  double sp = std::sqrt(P_hat);
  double tau = std::sqrt(std::max(tau2, 1e-300));
  double active = gh_expect_std_normal([&](double z) {
    double e = sp - denoise(sp + tau * z, tau2, P_hat, p0);
    return e * e;
  });
  double inactive = gh_expect_std_normal([&](double z) {
    double e = denoise(tau * z, tau2, P_hat, p0);
    return e * e;
  });
  return (1.0 - p0) * active + p0 * inactive;
}

std::vector<double> state_evolution(const AmpParams& params, int T) {
  if (T < 1) throw std::invalid_argument("T must be at least 1");
  std::vector<double> tau2(T + 1);
  double p0 = clamp_prior(params.p0);
  tau2[0] = params.noise_floor +
            params.undersampling * (1.0 - p0) * params.P_hat;
  for (int t = 0; t < T; ++t) {
    tau2[t + 1] = params.noise_floor +
                  params.undersampling * se_mmse(tau2[t], params.P_hat, p0);
  }
  return tau2;
}

}  // namespace ura
