#include "ura/potential.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "ura/quadrature.hpp"
#include "ura/special.hpp"

namespace ura {

namespace {

constexpr double kMiAbsTol = 1e-11;

// Golden-section search for the minimum of f on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  constexpr double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double mutual_info_binary_awgn(double s_eff, double p0) {
  if (!(s_eff > 0.0)) return 0.0;
  if (p0 <= 0.0 || p0 >= 1.0) return 0.0;
  const double eps = 1.0 - p0;
  const double rs = std::sqrt(s_eff);
  const double ln_p0 = std::log(p0);
  const double ln_eps = std::log(eps);

  // I (nats) = eps s/2 - E_Y[ln G(Y)], G(y) = p0 + eps exp(rs y - s/2).
  auto neg_mixture_lnG = [&](double y) {
    double lnG = log_add(ln_p0, ln_eps + rs * y - 0.5 * s_eff);
    double density = p0 * normal_pdf(y) + eps * normal_pdf(y - rs);
    return -density * lnG;
  };

  // The mixture density has bumps at 0 and rs; integrate piecewise so the
  // adaptive rule sees each bump.
  const double lo = -40.0;
  const double hi = rs + 40.0;
  double integral = 0.0;
  if (rs > 1e-12) {
    integral += adaptive_simpson(neg_mixture_lnG, lo, 0.0, kMiAbsTol / 3.0);
    integral += adaptive_simpson(neg_mixture_lnG, 0.0, rs, kMiAbsTol / 3.0);
    integral += adaptive_simpson(neg_mixture_lnG, rs, hi, kMiAbsTol / 3.0);
  } else {
    integral += adaptive_simpson(neg_mixture_lnG, lo, hi, kMiAbsTol);
  }
  double nats = 0.5 * eps * s_eff + integral;
  if (nats < 0.0) nats = 0.0;  // guard against quadrature round-off at s ~ 0
  return nats * kLog2E;
}

double rs_potential_finite(double eta, const FinitePotentialParams& params) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  double mi = mutual_info_binary_awgn(eta * params.P_hat(), params.p0());
  return params.u() * mi + 0.5 * kLog2E * ((eta - 1.0) - std::log(eta));
}

double eta_bar(double E_in, double alpha) {
  return (1.0 - 1.0 / alpha) / (E_in * kLog2E);
}

double eta0_star(double S, double E_in) {
  return 1.0 / (1.0 + 2.0 * S * E_in);
}

double rs_potential_limit(double eta, double S, double E_in, double alpha) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  const double eb = eta_bar(E_in, alpha);
  double theta;
  if (eta > eb) {
    theta = 1.0;
  } else if (eta < eb) {
    theta = 0.0;
  } else {
    theta = 0.5;
  }
  return eta * S * E_in * (1.0 - theta) +
         (S / kLog2E) * (1.0 - 1.0 / alpha) * theta +
         0.5 * ((eta - 1.0) - std::log(eta));
}

namespace {

std::vector<double> log_grid_with_candidates(double lo, double hi,
                                             int grid_points,
                                             const std::vector<double>& extra) {
  std::vector<double> etas;
  etas.reserve(grid_points + extra.size());
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < grid_points; ++i) {
    double t = grid_points == 1
                   ? 0.0
                   : static_cast<double>(i) / (grid_points - 1);
    etas.push_back(std::exp(llo + t * (lhi - llo)));
  }
  for (double c : extra) {
    if (c > lo && c < hi) etas.push_back(c);
  }
  etas.push_back(hi);
  std::sort(etas.begin(), etas.end());
  etas.erase(std::unique(etas.begin(), etas.end()), etas.end());
  return etas;
}

PotentialCurve tabulate(PotentialCurve::Kind kind,
                        std::function<double(double)> f,
                        std::vector<double> etas, std::string params) {
  PotentialCurve curve;
  curve.kind = kind;
  curve.etas = std::move(etas);
  curve.values.reserve(curve.etas.size());
  for (double e : curve.etas) curve.values.push_back(f(e));
  curve.eval = std::move(f);
  curve.params = std::move(params);
  return curve;
}

}  // namespace

PotentialCurve make_finite_curve(const FinitePotentialParams& params,
                                 int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("grid too small");
  // Candidate stationary points of the asymptotic counterpart are injected so
  // the grid never straddles them.
  double S = params.S_in;
  double alpha = params.J / std::log2(static_cast<double>(
                                std::max<int64_t>(params.K_a, 2)));
  std::vector<double> extra = {eta0_star(S, params.E_in),
                               eta_bar(params.E_in, alpha)};
  auto etas = log_grid_with_candidates(1e-6, 1.0, grid_points, extra);
  FinitePotentialParams p = params;
  auto f = [p](double eta) { return rs_potential_finite(eta, p); };
  std::string desc = "finite J=" + std::to_string(params.J) +
                     " K_a=" + std::to_string(params.K_a) +
                     " S_in=" + std::to_string(params.S_in) +
                     " E_in=" + std::to_string(params.E_in);
  return tabulate(PotentialCurve::Kind::finite_J, f, std::move(etas),
                  std::move(desc));
}

PotentialCurve make_limit_curve(double S, double E_in, double alpha,
                                int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("grid too small");
  std::vector<double> extra = {eta0_star(S, E_in), eta_bar(E_in, alpha)};
  auto etas = log_grid_with_candidates(1e-6, 1.0, grid_points, extra);
  auto f = [S, E_in, alpha](double eta) {
    return rs_potential_limit(eta, S, E_in, alpha);
  };
  std::string desc = "limit S=" + std::to_string(S) +
                     " E_in=" + std::to_string(E_in) +
                     " alpha=" + std::to_string(alpha);
  return tabulate(PotentialCurve::Kind::asymptotic, f, std::move(etas),
                  std::move(desc));
}

PotentialCurve make_synthetic_curve(std::function<double(double)> f, double lo,
                                    double hi, int grid_points) {
  if (!(lo > 0.0) || !(hi > lo) || grid_points < 2)
    throw std::invalid_argument("bad synthetic curve domain");
  auto etas = log_grid_with_candidates(lo, hi, grid_points, {});
  return tabulate(PotentialCurve::Kind::synthetic, std::move(f),
                  std::move(etas), "synthetic");
}

MinimizerReport find_minimizers(const PotentialCurve& curve) {
  const auto& etas = curve.etas;
  const auto& vals = curve.values;
  const size_t m = etas.size();
  if (m < 2 || vals.size() != m || !curve.eval)
    throw std::invalid_argument("curve not tabulated");

  auto refine = [&](size_t i) {
    double a = etas[i == 0 ? 0 : i - 1];
    double b = etas[i + 1 >= m ? m - 1 : i + 1];
    if (b - a < 1e-8) return etas[i];
    return golden_min(curve.eval, a, b, 1e-8);
  };

  size_t gi = 0;
  double vmax = vals[0];
  for (size_t i = 1; i < m; ++i) {
    if (vals[i] < vals[gi]) gi = i;
    vmax = std::max(vmax, vals[i]);
  }

  // Count basins separated by barriers of nontrivial prominence, so that
  // tabulation noise and flat plateaus never split a single minimum in two.
  const double tol = 1e-9 * std::max(1.0, std::abs(vmax));
  size_t li = gi;
  size_t n_local = 0;
  bool descending = true;  // tracking an open basin
  size_t basin_idx = 0;
  double basin_min = vals[0];
  double peak = vals[0];
  for (size_t i = 1; i < m; ++i) {
    if (descending) {
      if (vals[i] < basin_min) {
        basin_min = vals[i];
        basin_idx = i;
      } else if (vals[i] > basin_min + tol) {
        if (n_local == 0) li = basin_idx;  // leftmost confirmed basin
        ++n_local;
        descending = false;
        peak = vals[i];
      }
    } else {
      peak = std::max(peak, vals[i]);
      if (vals[i] < peak - tol) {
        descending = true;
        basin_min = vals[i];
        basin_idx = i;
      }
    }
  }
  if (descending) {  // trailing basin ends at the right edge of the grid
    if (n_local == 0) li = basin_idx;
    ++n_local;
  }

  MinimizerReport report;
  report.eta_global = refine(gi);
  report.value_global = curve.eval(report.eta_global);
  if (vals[gi] < report.value_global) {
    report.eta_global = etas[gi];
    report.value_global = vals[gi];
  }
  report.eta_smallest_local = refine(li);
  report.value_smallest_local = curve.eval(report.eta_smallest_local);
  if (vals[li] < report.value_smallest_local) {
    report.eta_smallest_local = etas[li];
    report.value_smallest_local = vals[li];
  }
  report.is_unique = n_local <= 1;
  return report;
}

double threshold_optimal(double alpha, double E_in) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  if (!(E_in > 0.0)) throw std::invalid_argument("E_in must be positive");
  const double c = 1.0 - 1.0 / alpha;
  // g(S) = 0.5 log2(1 + 2 S E_in) - c S: g(0) = 0, g'(0) = E_in log2 e - c.
  // A positive root exists iff g'(0) > 0.
  if (E_in * kLog2E <= c) return 0.0;
  auto g = [&](double S) { return 0.5 * std::log2(1.0 + 2.0 * S * E_in) - c * S; };
  double hi = 1.0;
  while (g(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e12) return hi;  // pathological parameters; effectively unbounded
  }
  double lo = hi / 2.0;
  while (g(lo) <= 0.0) {
    lo /= 2.0;
    if (lo < 1e-300) return 0.0;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-10 * hi) break;
  }
  return 0.5 * (lo + hi);
}

double threshold_algorithmic(double alpha, double E_in) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  if (!(E_in > 0.0)) throw std::invalid_argument("E_in must be positive");
  double s = kLog2E / (1.0 - 1.0 / alpha) - 1.0 / E_in;
  return s > 0.0 ? s : 0.0;
}

double capacity_symmetric(double K_a, double snr) {
  return 0.5 * std::log2(1.0 + K_a * snr);
}

double outer_rate_bound_finite(int64_t K_a, int J) {
  double p0 = std::exp(static_cast<double>(K_a) *
                       std::log1p(-std::exp2(-static_cast<double>(J))));
  return std::exp2(static_cast<double>(J)) * binary_entropy_bits(p0) /
         (static_cast<double>(K_a) * static_cast<double>(J));
}

double outer_rate_bound_asymptotic(double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  return 1.0 - 1.0 / alpha;
}

ThresholdReport make_threshold_report(double alpha, double E_in, int64_t K_a,
                                      double snr, int J) {
  ThresholdReport r{};
  r.S_opt = threshold_optimal(alpha, E_in);
  r.S_alg = threshold_algorithmic(alpha, E_in);
  r.S_capacity = capacity_symmetric(static_cast<double>(K_a), snr);
  r.R_out_bound_finite = outer_rate_bound_finite(K_a, J);
  r.R_out_bound_asymptotic = outer_rate_bound_asymptotic(alpha);
  r.eta_bar = eta_bar(E_in, alpha);
  return r;
}

}  // namespace ura
