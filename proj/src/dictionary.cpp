#include "ura/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "ura/rng.hpp"

namespace ura {

Dictionary Dictionary::generate(int64_t n, int L, int J, double P,
                                uint64_t seed, DictNorm norm,
                                uint64_t mem_cap_bytes) {
  if (n < 1 || L < 1 || J < 1 || J > 30 || !(P > 0.0)) {
    throw std::invalid_argument("invalid dictionary parameters");
  }
  const int64_t m = int64_t(1) << J;
  const int64_t cols = int64_t(L) * m;
  const uint64_t bytes = uint64_t(n) * uint64_t(cols) * sizeof(double);
  if (bytes > mem_cap_bytes) {
    throw std::runtime_error("dictionary too large");
  }

  Dictionary d;
  d.n_ = n;
  d.L_ = L;
  d.J_ = J;
  d.P_ = P;
  d.seed_ = seed;
  d.norm_ = norm;
  d.a_.resize(n, cols);

  const double sd = std::sqrt(P / L);
  for (int l = 0; l < L; ++l) {
    Rng rng(substream_seed(seed, static_cast<uint64_t>(l)));
    double* base = d.a_.data() + int64_t(l) * m;
    for (int64_t r = 0; r < n; ++r) {
      double* row = base + r * cols;
      for (int64_t i = 0; i < m; ++i) {
        row[i] = sd * rng.next_normal();
      }
    }
  }

  if (norm == DictNorm::exact_column_norm) {
    // Rescale every column to ||a||^2 = nP/L exactly.
    const double target = double(n) * P / L;
    Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(cols);
    for (int64_t r = 0; r < n; ++r) {
      const double* row = d.a_.data() + r * cols;
      for (int64_t c = 0; c < cols; ++c) sumsq[c] += row[c] * row[c];
    }
    Eigen::VectorXd scale(cols);
    for (int64_t c = 0; c < cols; ++c) scale[c] = std::sqrt(target / sumsq[c]);
    for (int64_t r = 0; r < n; ++r) {
      double* row = d.a_.data() + r * cols;
      for (int64_t c = 0; c < cols; ++c) row[c] *= scale[c];
    }
  }
  return d;
}

Eigen::VectorXd Dictionary::column(int section, int64_t index) const {
  if (section < 0 || section >= L_ || index < 0 || index >= section_size()) {
    throw std::out_of_range("invalid section index");
  }
  return a_.col(int64_t(section) * section_size() + index);
}

void Dictionary::multiply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  const int64_t cols = this->cols();
  out.resize(n_);
  for (int64_t r = 0; r < n_; ++r) {
    out[r] = Eigen::Map<const Eigen::VectorXd>(a_.data() + r * cols, cols).dot(v);
  }
}

void Dictionary::multiply_transpose(const Eigen::VectorXd& v,
                                    Eigen::VectorXd& out) const {
  const int64_t cols = this->cols();
  out.setZero(cols);
  for (int64_t r = 0; r < n_; ++r) {
    out += v[r] * Eigen::Map<const Eigen::VectorXd>(a_.data() + r * cols, cols);
  }
}

void Dictionary::regenerate_section(int section, RowMajorMatrix& out) const {
  const int64_t m = section_size();
  out.resize(n_, m);
  Rng rng(substream_seed(seed_, static_cast<uint64_t>(section)));
  const double sd = std::sqrt(P_ / L_);
  for (int64_t r = 0; r < n_; ++r) {
    double* row = out.data() + r * m;
    for (int64_t i = 0; i < m; ++i) row[i] = sd * rng.next_normal();
  }
}

namespace {
constexpr char kMagic[8] = {'S', 'P', 'A', 'R', 'C', 'D', 'I', 'C'};

void put_u32(std::ofstream& f, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xff;
  f.write(reinterpret_cast<char*>(b), 4);
}
void put_u64(std::ofstream& f, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
  f.write(reinterpret_cast<char*>(b), 8);
}
uint32_t get_u32(std::ifstream& f) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(b[i]) << (8 * i);
  return v;
}
uint64_t get_u64(std::ifstream& f) {
  unsigned char b[8];
  f.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
  return v;
}
}  // namespace

void Dictionary::export_binary(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open dictionary file for writing");
  f.write(kMagic, 8);
  put_u32(f, static_cast<uint32_t>(n_));
  put_u32(f, static_cast<uint32_t>(L_));
  put_u32(f, static_cast<uint32_t>(J_));
  put_u32(f, norm_ == DictNorm::exact_column_norm ? 1u : 0u);
  put_u64(f, seed_);
  // Entries are row-major float64, little-endian (matching in-memory layout
  // on this platform).
  f.write(reinterpret_cast<const char*>(a_.data()),
          std::streamsize(sizeof(double)) * n_ * cols());
  if (!f) throw std::runtime_error("dictionary export failed");
}

Dictionary Dictionary::import_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open dictionary file");
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kMagic, 8) != 0) {
    throw std::runtime_error("bad dictionary file magic");
  }
  Dictionary d;
  d.n_ = get_u32(f);
  d.L_ = static_cast<int>(get_u32(f));
  d.J_ = static_cast<int>(get_u32(f));
  d.norm_ = get_u32(f) ? DictNorm::exact_column_norm : DictNorm::iid_gaussian;
  d.seed_ = get_u64(f);
  d.P_ = 0.0;  // not stored; import is for matrix reuse, not re-derivation
  d.a_.resize(d.n_, d.cols());
  f.read(reinterpret_cast<char*>(d.a_.data()),
         std::streamsize(sizeof(double)) * d.n_ * d.cols());
  if (!f) throw std::runtime_error("dictionary file truncated");
  return d;
}

Eigen::VectorXd encode_inner(const Dictionary& dict, const IndexSequence& seq) {
  if (static_cast<int>(seq.size()) != dict.sections()) {
    throw std::out_of_range("invalid section index");
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dict.rows());
  for (int l = 0; l < dict.sections(); ++l) {
    if (seq[l] >= dict.section_size()) {
      throw std::out_of_range("invalid section index");
    }
    x += dict.column(l, seq[l]);
  }
  return x;
}

SectionSparseSignal superpose(std::span<const IndexSequence> seqs, int L, int J) {
  SectionSparseSignal sig;
  sig.L = L;
  sig.J = J;
  sig.K_a = static_cast<int64_t>(seqs.size());
  sig.counts.resize(L);
  const uint32_t m = uint32_t(1) << J;
  for (const auto& seq : seqs) {
    if (static_cast<int>(seq.size()) != L) {
      throw std::invalid_argument("index sequence length mismatch");
    }
    for (int l = 0; l < L; ++l) {
      if (seq[l] >= m) throw std::out_of_range("invalid section index");
    }
  }
  for (int l = 0; l < L; ++l) {
    std::vector<uint32_t> idx;
    idx.reserve(seqs.size());
    for (const auto& seq : seqs) idx.push_back(seq[l]);
    std::sort(idx.begin(), idx.end());
    auto& out = sig.counts[l];
    for (size_t i = 0; i < idx.size();) {
      size_t j = i;
      while (j < idx.size() && idx[j] == idx[i]) ++j;
      out.emplace_back(idx[i], static_cast<uint32_t>(j - i));
      i = j;
    }
  }
  return sig;
}

std::vector<std::vector<uint32_t>> support_of(const SectionSparseSignal& sig) {
  std::vector<std::vector<uint32_t>> sup(sig.L);
  for (int l = 0; l < sig.L; ++l) {
    sup[l].reserve(sig.counts[l].size());
    for (const auto& [idx, mult] : sig.counts[l]) {
      if (mult > 0) sup[l].push_back(idx);
    }
  }
  return sup;
}

Eigen::VectorXd signal_vector(const SectionSparseSignal& sig) {
  const int64_t m = int64_t(1) << sig.J;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(int64_t(sig.L) * m);
  for (int l = 0; l < sig.L; ++l) {
    for (const auto& [idx, mult] : sig.counts[l]) {
      s[int64_t(l) * m + idx] = static_cast<double>(mult);
    }
  }
  return s;
}

}  // namespace ura
