#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ura/dictionary.hpp"

namespace ura {

enum class ParityAllocation { uniform_tail, geometric };

// Message bits as 0/1 bytes, data order = transmission order.
using MessageBits = std::vector<uint8_t>;

/// Outer code profile: section l carries d_l data bits and p_l parity bits
// (d_l + p_l = J). Each parity bit checks a fixed random subset of all data
// bits in earlier sections; masks are regenerated from parity_seed and never
// serialized.
struct TreeCodeProfile {
  int L = 0;
  int J = 0;
  int B = 0;
  std::vector<int> d;  // data bits per section
  std::vector<int> p;  // parity bits per section
  uint64_t parity_seed = 0;
  int64_t list_cap = int64_t(1) << 16;
  // masks[l][j] = bitmask words over the data bits of sections 1..l (global
  // data-bit order), one per parity bit j of section l+1... indexed from 0:
  // masks[l][j] covers data bits 0 .. prefix_bits(l)-1.
  std::vector<std::vector<std::vector<uint64_t>>> masks;
  // Number of data bits in sections before section l.
  int prefix_bits(int l) const {
    int s = 0;
    for (int i = 0; i < l; ++i) s += d[i];
    return s;
  }
};

// Deterministic allocation of B data bits over L sections of J bits each.
// uniform_tail spreads the LJ-B parity bits as evenly as possible over
// sections 2..L with later sections never lighter; geometric doubles the
// parity share section over section toward the tail. Throws "infeasible
// allocation" when the first section cannot hold J data bits or parity does
// not fit.
TreeCodeProfile build_profile(int B, int L, int J, uint64_t parity_seed,
                              ParityAllocation alloc = ParityAllocation::uniform_tail,
                              int64_t list_cap = int64_t(1) << 16);

// Section index = d_l data bits (MSB first) followed by p_l parity bits.
IndexSequence encode_outer(const TreeCodeProfile& profile,
                           const MessageBits& message);

struct DecodedList {
  std::vector<MessageBits> messages;  // deduplicated, lexicographic, <= K_a
  bool overflow = false;              // list_cap hit during the search
  uint64_t survivor_count = 0;        // full-depth survivors before dedup/truncation
};

/// Depth-first (breadth-per-section) search over per-section candidate sets:
// a partial message survives section l if some support index matches its
// next d_l data bits and all p_l parity checks against the already-decoded
// prefix.
DecodedList decode_outer(const TreeCodeProfile& profile,
                         const std::vector<std::vector<uint32_t>>& section_supports,
                         int64_t K_a);

// d_l, p_l and parity_seed only; masks are regenerated on load.
std::string profile_to_json(const TreeCodeProfile& profile);
TreeCodeProfile profile_from_json(const std::string& text);

}  // namespace ura
