#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ura/dictionary.hpp"

namespace ura {

// Scalar channel r = sqrt(eta*P_hat) s + z, s in {0,1} with P(s=0) = p0,
// z ~ N(0,1): the per-component channel that describes posterior statistics
// of the vector problem in the large-system limit.
struct DecoupledChannelSpec {
  double eta = 1.0;
  double P_hat = 1.0;
  double p0 = 0.5;
};

// MAP decision threshold on r; +inf when the channel carries no information
// and the prior favors 0, -inf in the opposite degenerate case.
double sbs_threshold(const DecoupledChannelSpec& spec);

// 1 iff the posterior activity strictly exceeds 1/2 (ties decide 0).
int scalar_sbs_map(double r, const DecoupledChannelSpec& spec);

// (p_miss, p_false_alarm) of the MAP decision on the scalar channel.
std::pair<double, double> decoupled_error_rates(const DecoupledChannelSpec& spec);

// Exact per-component activity marginals P(s_i >= 1 | y, A) by exhaustive
// enumeration of all (2^J)^(L*K_a) user-message combinations, log-domain.
// Throws "instance too large" above the 2^20-combination cap.
std::vector<double> enumerate_posterior(const Eigen::VectorXd& y,
                                        const Dictionary& dict, int64_t K_a,
                                        double N0_half);

// Same computation on an explicit n x (L*2^J) matrix (columns grouped by
// section); lets oracles use hand-built matrices.
std::vector<double> enumerate_posterior(const Eigen::VectorXd& y,
                                        const Eigen::MatrixXd& a, int L, int J,
                                        int64_t K_a, double N0_half);

}  // namespace ura
