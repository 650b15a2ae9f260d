#include "ura/tree_code.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ura/rng.hpp"

namespace ura {

namespace {

// Parity masks for all sections, drawn from per-section substreams so a
// profile's masks never depend on L or the allocation of other sections.
std::vector<std::vector<std::vector<uint64_t>>> build_masks(
    const TreeCodeProfile& prof) {
  std::vector<std::vector<std::vector<uint64_t>>> masks(prof.L);
  for (int l = 0; l < prof.L; ++l) {
    const int D = prof.prefix_bits(l);
    const int words = (D + 63) / 64;
    Rng rng(substream_seed(prof.parity_seed, static_cast<uint64_t>(l)));
    masks[l].resize(prof.p[l]);
    for (int j = 0; j < prof.p[l]; ++j) {
      auto& m = masks[l][j];
      m.resize(words, 0);
      for (int w = 0; w < words; ++w) m[w] = rng.next_u64();
      if (D % 64 != 0 && words > 0) {
        m[words - 1] &= (uint64_t(1) << (D % 64)) - 1;
      }
    }
  }
  return masks;
}

int parity_bit(const std::vector<uint64_t>& mask,
               const std::vector<uint64_t>& data_words) {
  uint64_t acc = 0;
  for (size_t w = 0; w < mask.size(); ++w) acc ^= mask[w] & data_words[w];
  return std::popcount(acc) & 1;
}

}  // namespace

TreeCodeProfile build_profile(int B, int L, int J, uint64_t parity_seed,
                              ParityAllocation alloc, int64_t list_cap) {
  if (L < 1 || J < 1 || J > 30 || B < J || B > L * J) {
    throw std::runtime_error("infeasible allocation");
  }
  TreeCodeProfile prof;
  prof.L = L;
  prof.J = J;
  prof.B = B;
  prof.parity_seed = parity_seed;
  prof.list_cap = list_cap;
  prof.d.assign(L, 0);
  prof.p.assign(L, 0);
  prof.d[0] = J;  // first section is all data

  const int T = L * J - B;  // total parity bits over sections 2..L
  if (L > 1) {
    if (alloc == ParityAllocation::uniform_tail) {
      const int base = T / (L - 1);
      const int rem = T % (L - 1);
      for (int l = 1; l < L; ++l) {
        prof.p[l] = base + (l >= L - rem ? 1 : 0);
      }
    } else {
      // Geometric: target shares proportional to 2^(l-1), largest at the
      // tail; round by largest fractional part (ties to later sections),
      // capped at J per section.
      std::vector<double> target(L, 0.0);
      double wsum = 0.0;
      for (int l = 1; l < L; ++l) wsum += std::exp2(l - 1);
      int assigned = 0;
      for (int l = 1; l < L; ++l) {
        target[l] = T * std::exp2(l - 1) / wsum;
        prof.p[l] = std::min(J, static_cast<int>(target[l]));
        assigned += prof.p[l];
      }
      while (assigned < T) {
        int pick = -1;
        double best = -std::numeric_limits<double>::infinity();
        for (int l = 1; l < L; ++l) {
          if (prof.p[l] >= J) continue;
          const double frac = target[l] - prof.p[l];
          if (frac >= best) {  // >= so later sections win ties
            best = frac;
            pick = l;
          }
        }
        if (pick < 0) throw std::runtime_error("infeasible allocation");
        ++prof.p[pick];
        ++assigned;
      }
    }
  }
  int dsum = 0;
  for (int l = 0; l < L; ++l) {
    prof.d[l] = J - prof.p[l];
    if (prof.d[l] < 0) throw std::runtime_error("infeasible allocation");
    dsum += prof.d[l];
  }
  if (dsum != B) throw std::runtime_error("infeasible allocation");
  prof.masks = build_masks(prof);
  return prof;
}

IndexSequence encode_outer(const TreeCodeProfile& prof,
                           const MessageBits& message) {
  if (static_cast<int>(message.size()) != prof.B) {
    throw std::invalid_argument("message must have exactly B bits");
  }
  const int total_words = (prof.B + 63) / 64;
  std::vector<uint64_t> data_words(total_words, 0);
  IndexSequence seq(prof.L);
  int pos = 0;  // global data-bit cursor
  for (int l = 0; l < prof.L; ++l) {
    // Parity first: checks cover only the data bits of earlier sections.
    uint32_t parity = 0;
    for (int j = 0; j < prof.p[l]; ++j) {
      parity |= uint32_t(parity_bit(prof.masks[l][j], data_words))
                << (prof.p[l] - 1 - j);
    }
    uint32_t data = 0;
    for (int k = 0; k < prof.d[l]; ++k) {
      const int bit = message[pos] ? 1 : 0;
      data |= uint32_t(bit) << (prof.d[l] - 1 - k);
      if (bit) data_words[pos / 64] |= uint64_t(1) << (pos % 64);
      ++pos;
    }
    seq[l] = (data << prof.p[l]) | parity;
  }
  return seq;
}

DecodedList decode_outer(const TreeCodeProfile& prof,
                         const std::vector<std::vector<uint32_t>>& supports,
                         int64_t K_a) {
  if (static_cast<int>(supports.size()) != prof.L) {
    throw std::invalid_argument("need one support set per section");
  }
  DecodedList out;
  const int total_words = (prof.B + 63) / 64;

  // Frontier of partial messages, each a packed data-bit prefix.
  std::vector<std::vector<uint64_t>> frontier;
  frontier.emplace_back(total_words, 0);

  int pos = 0;
  for (int l = 0; l < prof.L; ++l) {
    std::vector<std::vector<uint64_t>> next;
    const uint32_t parity_mask = (uint32_t(1) << prof.p[l]) - 1;
    for (const auto& path : frontier) {
      uint32_t expected = 0;
      for (int j = 0; j < prof.p[l]; ++j) {
        expected |= uint32_t(parity_bit(prof.masks[l][j], path))
                    << (prof.p[l] - 1 - j);
      }
      for (uint32_t idx : supports[l]) {
        if ((idx & parity_mask) != expected) continue;
        if (static_cast<int64_t>(next.size()) >= prof.list_cap) {
          out.overflow = true;
          break;
        }
        auto ext = path;
        const uint32_t data = idx >> prof.p[l];
        for (int k = 0; k < prof.d[l]; ++k) {
          if ((data >> (prof.d[l] - 1 - k)) & 1u) {
            const int b = pos + k;
            ext[b / 64] |= uint64_t(1) << (b % 64);
          }
        }
        next.push_back(std::move(ext));
      }
      if (out.overflow) break;
    }
    pos += prof.d[l];
    frontier = std::move(next);
    if (frontier.empty()) break;
  }

  out.survivor_count = frontier.size();

  // Unpack, deduplicate, rank lexicographically, truncate to K_a.
  std::vector<MessageBits> msgs;
  msgs.reserve(frontier.size());
  for (const auto& path : frontier) {
    MessageBits m(prof.B);
    for (int b = 0; b < prof.B; ++b) {
      m[b] = static_cast<uint8_t>((path[b / 64] >> (b % 64)) & 1u);
    }
    msgs.push_back(std::move(m));
  }
  std::sort(msgs.begin(), msgs.end());
  msgs.erase(std::unique(msgs.begin(), msgs.end()), msgs.end());
  if (static_cast<int64_t>(msgs.size()) > K_a) {
    msgs.resize(K_a);
  }
  out.messages = std::move(msgs);
  return out;
}

std::string profile_to_json(const TreeCodeProfile& prof) {
  nlohmann::json j;
  j["L"] = prof.L;
  j["J"] = prof.J;
  j["B"] = prof.B;
  j["d"] = prof.d;
  j["p"] = prof.p;
  j["parity_seed"] = prof.parity_seed;
  j["list_cap"] = prof.list_cap;
  return j.dump();
}

TreeCodeProfile profile_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  TreeCodeProfile prof;
  prof.L = j.at("L").get<int>();
  prof.J = j.at("J").get<int>();
  prof.B = j.at("B").get<int>();
  prof.d = j.at("d").get<std::vector<int>>();
  prof.p = j.at("p").get<std::vector<int>>();
  prof.parity_seed = j.at("parity_seed").get<uint64_t>();
  prof.list_cap = j.at("list_cap").get<int64_t>();
  if (static_cast<int>(prof.d.size()) != prof.L ||
      static_cast<int>(prof.p.size()) != prof.L) {
    throw std::runtime_error("profile shape mismatch");
  }
  prof.masks = build_masks(prof);
  return prof;
}

}  // namespace ura
