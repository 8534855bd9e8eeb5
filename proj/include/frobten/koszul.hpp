#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace frobten {

// Sign of reordering a sequence of homogeneous elements with the given
// parities (0 even, 1 odd) by the permutation perm: element originally at
// position i moves to position perm[i].  Each transposition of two odd
// neighbours contributes -1.
inline int koszul_sign(const std::vector<int>& perm,
                       const std::vector<int>& parities) {
  int sign = 1;
  const size_t n = perm.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (perm[i] > perm[j] && (parities[i] & 1) && (parities[j] & 1))
        sign = -sign;
  return sign;
}

// Stable-sorts idx ascending and returns the Koszul sign of that reordering,
// where the parity of entry idx[i] is par(idx[i]).  Returns sign 0 when two
// equal odd entries occur (the symmetric value vanishes).
template <class ParityFn>
std::pair<std::vector<int>, int> sort_with_koszul_sign(std::vector<int> idx,
                                                       ParityFn par) {
  int sign = 1;
  // insertion sort; counts odd-odd inversions exactly
  for (size_t i = 1; i < idx.size(); ++i) {
    int v = idx[i];
    size_t j = i;
    while (j > 0 && idx[j - 1] > v) {
      idx[j] = idx[j - 1];
      if ((par(v) & 1) && (par(idx[j]) & 1)) sign = -sign;
      --j;
    }
    idx[j] = v;
  }
  for (size_t i = 0; i + 1 < idx.size(); ++i)
    if (idx[i] == idx[i + 1] && (par(idx[i]) & 1)) return {idx, 0};
  return {idx, sign};
}

// Koszul sign of unshuffling the sequence `all` into the subsequence picked by
// `take` (kept in order) followed by the rest (kept in order).
template <class ParityFn>
int unshuffle_sign(const std::vector<int>& all, const std::vector<bool>& take,
                   ParityFn par) {
  // each taken odd element moves left past every earlier untaken odd element
  int sign = 1;
  for (size_t i = 0; i < all.size(); ++i) {
    if (!take[i] || !(par(all[i]) & 1)) continue;
    for (size_t j = 0; j < i; ++j)
      if (!take[j] && (par(all[j]) & 1)) sign = -sign;
  }
  return sign;
}

}  // namespace frobten
