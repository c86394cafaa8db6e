#pragma once

#include <array>
#include <cstdint>

namespace cdms {

// Occurrence counts of bra/ket level pairs; components sum to the atom count.
struct MultiIndex {
  int n_uu = 0;
  int n_ud = 0;
  int n_du = 0;
  int n_dd = 0;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

// Returned by shift_index when the shifted tuple leaves the valid domain.
inline constexpr std::int64_t kOutOfDomain = -1;

// Number of valid tuples for N atoms: C(N+3,3). Throws std::domain_error for
// N < 1 and std::overflow_error when the count exceeds the index range.
std::int64_t state_count(int n_atoms);

// Zero-based position of m in the canonical enumeration (outer loop n_dd,
// then n_du, then n_ud; n_uu is the remainder). Throws std::domain_error on
// invalid tuples.
std::int64_t flat_index(const MultiIndex& m, int n_atoms);

// Inverse of flat_index. Throws std::domain_error when i is out of range.
MultiIndex multi_index(std::int64_t i, int n_atoms);

// flat_index(multi_index(i) + delta) if the shifted tuple is valid for
// n_atoms, kOutOfDomain otherwise. delta components are ordered
// (n_uu, n_ud, n_du, n_dd).
std::int64_t shift_index(std::int64_t i, const std::array<int, 4>& delta,
                         int n_atoms);

}  // namespace cdms
