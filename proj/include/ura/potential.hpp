#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ura {

// True mutual information (bits) of the scalar channel y = sqrt(s_eff) x + z,
// x in {0,1} with P(x=0) = p0, z ~ N(0,1), by adaptive quadrature.
double mutual_info_binary_awgn(double s_eff, double p0);

// Parameters of the finite-J potential, given independently of any concrete
// blocklength: u = S_in 2^J/(K_a J) is the undersampling factor and
// P_hat = 2 J E_in the effective amplitude^2.
struct FinitePotentialParams {
  int J = 1;
  int64_t K_a = 1;
  double S_in = 1.0;
  double E_in = 1.0;

  double u() const {
    return S_in * std::exp2(static_cast<double>(J)) /
           (static_cast<double>(K_a) * static_cast<double>(J));
  }
  double P_hat() const { return 2.0 * J * E_in; }
  double p0() const {
    return std::exp(static_cast<double>(K_a) *
                    std::log1p(-std::exp2(-static_cast<double>(J))));
  }
};

// Finite-J potential in bits: u * I(eta P_hat) + (log2 e / 2)[(eta-1) - ln eta].
double rs_potential_finite(double eta, const FinitePotentialParams& params);

// Asymptotic potential as printed:
//   eta S E_in [1 - theta(eta - eta_bar)]
//   + (S/log2 e)(1 - 1/alpha) theta(eta - eta_bar)
//   + 1/2 [(eta - 1) - ln eta],   theta(0) = 1/2.
double rs_potential_limit(double eta, double S, double E_in, double alpha);

double eta_bar(double E_in, double alpha);          // (1 - 1/alpha)/(E_in log2 e)
double eta0_star(double S, double E_in);            // (1 + 2 S E_in)^-1

struct PotentialCurve {
  enum class Kind { finite_J, asymptotic, synthetic };
  Kind kind = Kind::synthetic;
  std::vector<double> etas;    // strictly increasing, in (0, 1]
  std::vector<double> values;  // potential at each grid point
  std::function<double(double)> eval;  // continuous evaluator for refinement
  std::string params;          // human-readable parameter snapshot
};

PotentialCurve make_finite_curve(const FinitePotentialParams& params,
                                 int grid_points = 10000);
PotentialCurve make_limit_curve(double S, double E_in, double alpha,
                                int grid_points = 10000);
PotentialCurve make_synthetic_curve(std::function<double(double)> f,
                                    double lo, double hi, int grid_points);

struct MinimizerReport {
  double eta_global = 1.0;
  double value_global = 0.0;
  double eta_smallest_local = 1.0;
  double value_smallest_local = 0.0;
  bool is_unique = true;
};

// Global minimizer (grid argmin + golden-section refinement to 1e-8) and the
// leftmost local minimizer, reported independently.  is_unique is true when
// the tabulated curve has a single basin: local minima only count when they
// are separated from their neighbors by a barrier of nonzero prominence, so
// plateaus and tabulation noise never split one minimum in two.
MinimizerReport find_minimizers(const PotentialCurve& curve);

// Unique S > 0 with S(1 - 1/alpha) = 1/2 log2(1 + 2 S E_in), or 0 in the
// degenerate regime where only S = 0 satisfies it.
double threshold_optimal(double alpha, double E_in);

// Closed form log2 e/(1 - 1/alpha) - 1/E_in, clamped below at 0.
double threshold_algorithmic(double alpha, double E_in);

// 1/2 log2(1 + K_a snr).
double capacity_symmetric(double K_a, double snr);

double outer_rate_bound_finite(int64_t K_a, int J);
double outer_rate_bound_asymptotic(double alpha);

struct ThresholdReport {
  double S_opt;
  double S_alg;
  double S_capacity;
  double R_out_bound_finite;
  double R_out_bound_asymptotic;
  double eta_bar;
};

ThresholdReport make_threshold_report(double alpha, double E_in, int64_t K_a,
                                      double snr, int J);

}  // namespace ura
