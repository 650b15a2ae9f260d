#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ura {

enum class DictNorm { iid_gaussian, exact_column_norm };

inline constexpr uint64_t kDefaultDictMemCap = 4ull << 30;  // 4 GiB

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// The n x (L*2^J) coding matrix, addressed as L sections of 2^J columns.
// Entries are iid N(0, P/L) before optional exact column renormalization.
// Generation is section-by-section from independent substreams of gen_seed,
// so any single section can be reproduced without the others.
class Dictionary {
 public:
  static Dictionary generate(int64_t n, int L, int J, double P, uint64_t seed,
                             DictNorm norm = DictNorm::iid_gaussian,
                             uint64_t mem_cap_bytes = kDefaultDictMemCap);

  int64_t rows() const { return n_; }
  int sections() const { return L_; }
  int bits_per_section() const { return J_; }
  int64_t section_size() const { return int64_t(1) << J_; }
  int64_t cols() const { return int64_t(L_) << J_; }
  double power() const { return P_; }
  uint64_t seed() const { return seed_; }
  DictNorm normalization() const { return norm_; }

  const RowMajorMatrix& entries() const { return a_; }
  Eigen::VectorXd column(int section, int64_t index) const;

  // y = A v (v dense over all columns); streams the matrix once.
  void multiply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;
  Eigen::VectorXd multiply(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out;
    multiply(v, out);
    return out;
  }
  // x = A^T v; streams the matrix once with deterministic accumulation order.
  void multiply_transpose(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;
  Eigen::VectorXd multiply_transpose(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out;
    multiply_transpose(v, out);
    return out;
  }

  // Regenerates one section's block into `out` (n x 2^J); bit-identical to
  // the corresponding block of entries() under iid_gaussian.
  void regenerate_section(int section, RowMajorMatrix& out) const;

  // Flat little-endian float64 export with a 32-byte header.
  void export_binary(const std::string& path) const;
  static Dictionary import_binary(const std::string& path);

 private:
  Dictionary() = default;
  int64_t n_ = 0;
  int L_ = 0;
  int J_ = 0;
  double P_ = 0.0;
  uint64_t seed_ = 0;
  DictNorm norm_ = DictNorm::iid_gaussian;
  RowMajorMatrix a_;
};

// One user's selection: L section indices, each in [0, 2^J).
using IndexSequence = std::vector<uint32_t>;

// The superposed integer signal s = sum_k m_k, stored sparsely per section.
struct SectionSparseSignal {
  int L = 0;
  int J = 0;
  int64_t K_a = 0;
  // Per section: sorted (index, multiplicity) pairs; multiplicities sum to K_a.
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> counts;
};

// Sum of the L selected columns. Throws on an out-of-range index.
Eigen::VectorXd encode_inner(const Dictionary& dict, const IndexSequence& seq);

SectionSparseSignal superpose(std::span<const IndexSequence> seqs, int L, int J);

// Per-section sorted lists of occupied indices (the support of s).
std::vector<std::vector<uint32_t>> support_of(const SectionSparseSignal& sig);

// Dense multiplicity vector of length L*2^J (for products A*s).
Eigen::VectorXd signal_vector(const SectionSparseSignal& sig);

}  // namespace ura
