#include "ura/model.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace ura {

std::vector<Violation> validate_config(const SystemConfig& cfg) {
  std::vector<Violation> v;
  if (cfg.K_a < 1) v.push_back({"K_a", "K_a must be >= 1"});
  if (cfg.n < 1) v.push_back({"n", "n must be >= 1"});
  if (cfg.L < 1) v.push_back({"L", "L must be >= 1"});
  if (cfg.J < 1 || cfg.J > 30) v.push_back({"J", "J out of range [1, 30]"});
  if (cfg.B > cfg.L * cfg.J) v.push_back({"B", "B exceeds LJ"});
  if (cfg.B < 1) v.push_back({"B", "B must be >= 1"});
  if (!(cfg.P > 0.0)) v.push_back({"P", "P must be positive"});
  if (!(cfg.N0_half > 0.0)) v.push_back({"N0_half", "N0_half must be positive"});
  return v;
}

DerivedParams derive_params(const SystemConfig& cfg) {
  assert(validate_config(cfg).empty());
  DerivedParams d;
  d.snr = cfg.P / cfg.N0_half;  // 2P/N0 with N0 = 2*N0_half
  d.R_in = static_cast<double>(cfg.L * cfg.J) / static_cast<double>(cfg.n);
  d.R_out = static_cast<double>(cfg.B) / static_cast<double>(cfg.L * cfg.J);
  d.S_in = static_cast<double>(cfg.K_a) * d.R_in;
  d.E_in = d.snr / (2.0 * d.R_in);
  d.P_hat = static_cast<double>(cfg.n) * d.snr / static_cast<double>(cfg.L);
  // (1 - 2^-J)^K_a without cancellation: exp(K_a * log1p(-2^-J)).
  d.p0 = std::exp(static_cast<double>(cfg.K_a) * std::log1p(-std::exp2(-static_cast<double>(cfg.J))));
  d.beta = std::exp2(static_cast<double>(cfg.J)) * d.R_in / static_cast<double>(cfg.J);
  if (cfg.K_a > 1) {
    d.alpha = static_cast<double>(cfg.J) / std::log2(static_cast<double>(cfg.K_a));
    d.alpha_defined = true;
  } else {
    d.alpha = std::numeric_limits<double>::quiet_NaN();
    d.alpha_defined = false;
  }
  return d;
}

}  // namespace ura
