#include "cdms/state.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "cdms/internal/logsum.hpp"

namespace cdms {

CollectiveState css_init(double theta, double phi, int n_atoms) {
  const std::int64_t size = state_count(n_atoms);
  CollectiveState s;
  s.n_atoms = n_atoms;
  s.amp.resize(static_cast<std::size_t>(size));

  const double su = std::sin(0.5 * theta);  // |d_up|
  const double cd = std::cos(0.5 * theta);  // |d_dn|
  const bool log_space = n_atoms > 64;
  const double log_su = su > 0.0 ? std::log(su) : 0.0;
  const double log_cd = cd > 0.0 ? std::log(cd) : 0.0;

  std::int64_t i = 0;
  for (int n_dd = 0; n_dd <= n_atoms; ++n_dd)
    for (int n_du = 0; n_du <= n_atoms - n_dd; ++n_du)
      for (int n_ud = 0; n_ud <= n_atoms - n_dd - n_du; ++n_ud, ++i) {
        const int n_uu = n_atoms - n_dd - n_du - n_ud;
        const int pow_u = 2 * n_uu + n_ud + n_du;  // exponent on |d_up|
        const int pow_d = 2 * n_dd + n_ud + n_du;  // exponent on |d_dn|
        if ((su == 0.0 && pow_u > 0) || (cd == 0.0 && pow_d > 0)) {
          s.amp[i] = 0.0;
          continue;
        }
        double mag;
        if (log_space)
          mag = std::exp(pow_u * log_su + pow_d * log_cd);
        else
          mag = std::pow(su, pow_u) * std::pow(cd, pow_d);
        // conjugation pairs (n_ud <-> n_du) get phases of opposite sign and
        // the same magnitude, so hermiticity is exact by construction
        const double ph = (n_ud - n_du) * phi;
        s.amp[i] = {mag * std::cos(ph), mag * std::sin(ph)};
      }
  return s;
}

namespace {

// Diagonal reduction with the C(N,l) weights paired in log space.
std::complex<double> weighted_diagonal_sum(const CollectiveState& s) {
  const int n = s.n_atoms;
  std::complex<double> acc = 0.0;
  for (int l = 0; l <= n; ++l) {
    const std::int64_t i = flat_index({l, 0, 0, n - l}, n);
    acc += internal::scaled_by_log_binomial(s.amp[i], n, l);
  }
  return acc;
}

}  // namespace

double trace(const CollectiveState& s) { return weighted_diagonal_sum(s).real(); }

double trace_imag_residual(const CollectiveState& s) {
  return std::abs(weighted_diagonal_sum(s).imag());
}

void renormalize(CollectiveState& s) {
  const double t = trace(s);
  if (!std::isfinite(t) || t <= 0.0)
    throw std::runtime_error("renormalize: trace is " + std::to_string(t) +
                             "; integration failed, reduce dt");
  const double inv = 1.0 / t;
  for (auto& a : s.amp) a *= inv;
}

double hermitian_residual(const CollectiveState& s) {
  const int n = s.n_atoms;
  double worst = 0.0;
  std::int64_t i = 0;
  for (int n_dd = 0; n_dd <= n; ++n_dd)
    for (int n_du = 0; n_du <= n - n_dd; ++n_du)
      for (int n_ud = 0; n_ud <= n - n_dd - n_du; ++n_ud, ++i) {
        if (n_ud < n_du) continue;  // each pair once
        const std::int64_t j = flat_index(
            {n - n_dd - n_du - n_ud, n_du, n_ud, n_dd}, n);
        worst = std::max(worst, std::abs(s.amp[i] - std::conj(s.amp[j])));
      }
  return worst;
}

namespace {
constexpr char kMagic[4] = {'C', 'D', 'M', 'S'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::FILE* f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  if (std::fwrite(b, 1, 4, f) != 4) throw std::runtime_error("state dump: write failed");
}

std::uint32_t get_u32(std::FILE* f) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, f) != 4) throw std::runtime_error("state dump: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void save_state(const CollectiveState& s, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("save_state: cannot open " + path);
  std::fwrite(kMagic, 1, 4, f);
  put_u32(f, kVersion);
  put_u32(f, static_cast<std::uint32_t>(s.n_atoms));
  put_u32(f, 0);
  // this code only targets little-endian IEEE hosts; the pair layout below
  // is the file format, byte for byte
  static_assert(sizeof(double) == 8);
  for (const auto& a : s.amp) {
    const double re = a.real(), im = a.imag();
    if (std::fwrite(&re, 8, 1, f) != 1 || std::fwrite(&im, 8, 1, f) != 1) {
      std::fclose(f);
      throw std::runtime_error("save_state: write failed for " + path);
    }
  }
  std::fclose(f);
}

CollectiveState load_state(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("load_state: cannot open " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    std::fclose(f);
    throw std::runtime_error("load_state: bad magic in " + path);
  }
  const std::uint32_t version = get_u32(f);
  if (version != kVersion) {
    std::fclose(f);
    throw std::runtime_error("load_state: unsupported version in " + path);
  }
  const std::uint32_t n = get_u32(f);
  get_u32(f);  // reserved
  CollectiveState s;
  s.n_atoms = static_cast<int>(n);
  const std::int64_t size = state_count(s.n_atoms);
  s.amp.resize(static_cast<std::size_t>(size));
  for (auto& a : s.amp) {
    double re, im;
    if (std::fread(&re, 8, 1, f) != 1 || std::fread(&im, 8, 1, f) != 1) {
      std::fclose(f);
      throw std::runtime_error("load_state: truncated data in " + path);
    }
    a = {re, im};
  }
  std::fclose(f);
  return s;
}

}  // namespace cdms
