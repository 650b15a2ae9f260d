#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ura {

// Scalar system parameters. K_a users each transmit a B-bit message over n
// real channel uses; the inner code has L sections of 2^J columns; noise is
// iid N(0, N0_half) per real dimension and each codeword carries power
// ||x||^2 = n*P (in expectation under the iid matrix ensemble).
struct SystemConfig {
  int64_t K_a = 1;
  int64_t n = 1;
  int64_t L = 1;
  int64_t J = 1;
  int64_t B = 1;
  double N0_half = 1.0;
  double P = 1.0;
  uint64_t master_seed = 0;
};

struct Violation {
  std::string field;
  std::string message;
};

// Returns every violated invariant; empty means the config is valid.
std::vector<Violation> validate_config(const SystemConfig& cfg);

// Quantities derived from a valid SystemConfig. All rates are in bits per
// channel use; natural-log conversions happen inside the potential module
// only.
struct DerivedParams {
  double snr;     // 2P/N0
  double R_in;    // LJ/n
  double R_out;   // B/(LJ)
  double S_in;    // K_a * R_in
  double E_in;    // snr / (2 R_in)
  double P_hat;   // n * snr / L
  double p0;      // (1 - 2^-J)^K_a
  double beta;    // 2^J * R_in / J
  double alpha;   // J / log2(K_a); NaN when K_a = 1
  bool alpha_defined;
};

DerivedParams derive_params(const SystemConfig& cfg);

}  // namespace ura
