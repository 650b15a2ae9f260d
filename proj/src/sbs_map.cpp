#include "ura/sbs_map.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ura/special.hpp"

namespace ura {

double sbs_threshold(const DecoupledChannelSpec& spec) {
  const double s_eff = spec.eta * spec.P_hat;
  const double inf = std::numeric_limits<double>::infinity();
  if (s_eff <= 0.0) {
    // No signal: posterior activity is 1 - p0 regardless of r.
    return spec.p0 <= 0.5 ? -inf : inf;
  }
  const double a = std::sqrt(s_eff);
  return 0.5 * a + std::log(spec.p0 / (1.0 - spec.p0)) / a;
}

int scalar_sbs_map(double r, const DecoupledChannelSpec& spec) {
  const double s_eff = spec.eta * spec.P_hat;
  if (s_eff <= 0.0) {
    // Ties (p0 = 1/2 included) decide inactive.
    return spec.p0 < 0.5 ? 1 : 0;
  }
  return r > sbs_threshold(spec) ? 1 : 0;
}

std::pair<double, double> decoupled_error_rates(const DecoupledChannelSpec& spec) {
  const double s_eff = spec.eta * spec.P_hat;
  if (s_eff <= 0.0) {
    // Constant decision: miss everything or flag everything.
    return spec.p0 < 0.5 ? std::pair{0.0, 1.0} : std::pair{1.0, 0.0};
  }
  const double theta = sbs_threshold(spec);
  return {normal_cdf(theta - std::sqrt(s_eff)), q_func(theta)};
}

std::vector<double> enumerate_posterior(const Eigen::VectorXd& y,
                                        const Dictionary& dict, int64_t K_a,
                                        double N0_half) {
  return enumerate_posterior(y, dict.entries(), dict.sections(),
                             dict.bits_per_section(), K_a, N0_half);
}

std::vector<double> enumerate_posterior(const Eigen::VectorXd& y,
                                        const Eigen::MatrixXd& a, int L, int J,
                                        int64_t K_a, double N0_half) {
  const int64_t m = int64_t(1) << J;
  const int64_t picks = int64_t(L) * K_a;  // independent index choices
  // Combination count m^picks, guarded against overflow while comparing to
  // the cap.
  double log2_combos = static_cast<double>(picks) * J;
  if (log2_combos > 20.0) throw std::runtime_error("instance too large");
  const int64_t combos = int64_t(1) << static_cast<int64_t>(log2_combos);

  const int64_t n = a.rows();
  const int64_t cols = a.cols();
  if (cols != int64_t(L) * m) throw std::invalid_argument("matrix shape mismatch");
  if (y.size() != n) throw std::invalid_argument("y length mismatch");

  // Pass 1: log-likelihood of every combination (mixed-radix counter over
  // the picks); remember the maximum for stable normalization.
  std::vector<double> loglik(combos);
  std::vector<int64_t> digit(picks, 0);
  Eigen::VectorXd x(n);
  double max_ll = -std::numeric_limits<double>::infinity();
  for (int64_t c = 0; c < combos; ++c) {
    x.setZero();
    for (int64_t t = 0; t < picks; ++t) {
      const int64_t section = t % L;
      x += a.col(section * m + digit[t]);
    }
    const double ll = -(y - x).squaredNorm() / (2.0 * N0_half);
    loglik[c] = ll;
    if (ll > max_ll) max_ll = ll;
    // increment mixed-radix counter
    for (int64_t t = 0; t < picks; ++t) {
      if (++digit[t] < m) break;
      digit[t] = 0;
    }
  }

  // Pass 2: accumulate P(component active) per dictionary column.
  std::vector<double> num(cols, 0.0);
  double denom = 0.0;
  std::fill(digit.begin(), digit.end(), 0);
  std::vector<uint8_t> active(cols);
  for (int64_t c = 0; c < combos; ++c) {
    const double w = std::exp(loglik[c] - max_ll);
    denom += w;
    std::fill(active.begin(), active.end(), 0);
    for (int64_t t = 0; t < picks; ++t) {
      const int64_t section = t % L;
      active[section * m + digit[t]] = 1;
    }
    for (int64_t i = 0; i < cols; ++i) {
      if (active[i]) num[i] += w;
    }
    for (int64_t t = 0; t < picks; ++t) {
      if (++digit[t] < m) break;
      digit[t] = 0;
    }
  }
  for (int64_t i = 0; i < cols; ++i) num[i] /= denom;
  return num;
}

}  // namespace ura
