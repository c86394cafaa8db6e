#include "cdms/indexing.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace cdms {
namespace {

// Exact integer binomials; arguments stay small enough that only C(n,3)
// needs an overflow guard.
std::int64_t binom2(std::int64_t n) {
  if (n < 2) return 0;
  return n * (n - 1) / 2;
}

std::int64_t binom3_checked(std::int64_t n) {
  if (n < 3) return 0;
  __int128 v = static_cast<__int128>(n) * (n - 1) * (n - 2) / 6;
  if (v > std::numeric_limits<std::int64_t>::max())
    throw std::overflow_error("state_count: C(N+3,3) exceeds the index range");
  return static_cast<std::int64_t>(v);
}

void check_tuple(const MultiIndex& m, int n_atoms) {
  if (m.n_uu < 0 || m.n_ud < 0 || m.n_du < 0 || m.n_dd < 0 ||
      m.n_uu + m.n_ud + m.n_du + m.n_dd != n_atoms)
    throw std::domain_error("flat_index: tuple invalid for N=" +
                            std::to_string(n_atoms));
}

// Offset of the n_dd sector: sum over i < n_dd of C(N-i+2, 2), telescoped.
std::int64_t sector_base(int n_dd, int n_atoms) {
  return binom3_checked(n_atoms + 3) - binom3_checked(n_atoms - n_dd + 3);
}

}  // namespace

std::int64_t state_count(int n_atoms) {
  if (n_atoms < 1) throw std::domain_error("state_count: N must be >= 1");
  return binom3_checked(static_cast<std::int64_t>(n_atoms) + 3);
}

std::int64_t flat_index(const MultiIndex& m, int n_atoms) {
  check_tuple(m, n_atoms);
  std::int64_t rest = n_atoms - m.n_dd;  // atoms left for (n_uu, n_ud, n_du)
  return sector_base(m.n_dd, n_atoms) +
         static_cast<std::int64_t>(m.n_du) * (rest + 1) -
         binom2(m.n_du) + m.n_ud;
}

MultiIndex multi_index(std::int64_t i, int n_atoms) {
  if (i < 0 || i >= state_count(n_atoms))
    throw std::domain_error("multi_index: index out of range");
  int n_dd = 0;
  while (sector_base(n_dd + 1, n_atoms) <= i) ++n_dd;
  std::int64_t r = i - sector_base(n_dd, n_atoms);
  std::int64_t rest = n_atoms - n_dd;
  int n_du = 0;
  while (static_cast<std::int64_t>(n_du + 1) * (rest + 1) - binom2(n_du + 1) <= r)
    ++n_du;
  std::int64_t r2 = r - (static_cast<std::int64_t>(n_du) * (rest + 1) - binom2(n_du));
  MultiIndex m;
  m.n_dd = n_dd;
  m.n_du = n_du;
  m.n_ud = static_cast<int>(r2);
  m.n_uu = static_cast<int>(rest - n_du - r2);
  return m;
}

std::int64_t shift_index(std::int64_t i, const std::array<int, 4>& delta,
                         int n_atoms) {
  MultiIndex m = multi_index(i, n_atoms);
  m.n_uu += delta[0];
  m.n_ud += delta[1];
  m.n_du += delta[2];
  m.n_dd += delta[3];
  if (m.n_uu < 0 || m.n_ud < 0 || m.n_du < 0 || m.n_dd < 0 ||
      m.n_uu + m.n_ud + m.n_du + m.n_dd != n_atoms)
    return kOutOfDomain;
  return flat_index(m, n_atoms);
}

}  // namespace cdms
