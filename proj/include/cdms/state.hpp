#pragma once

#include <complex>
#include <string>
#include <vector>

#include "cdms/indexing.hpp"

namespace cdms {

// Collective density matrix: element i holds the shared value of every
// product-basis matrix element whose bra/ket pair counts equal
// multi_index(i). Physical states keep the binomially weighted diagonal
// summing to one and are conjugate-symmetric under n_ud <-> n_du.
struct CollectiveState {
  int n_atoms = 0;
  std::vector<std::complex<double>> amp;
};

// Product state of N identical single-atom superpositions
// sin(theta/2) e^{i phi} |up> + cos(theta/2) |dn>.
// Magnitudes are evaluated in log space for N > 64 to dodge 2^-N underflow;
// 0^0 = 1 so the poles theta = 0, pi are exact.
CollectiveState css_init(double theta, double phi, int n_atoms);

// Binomially weighted diagonal sum, real part. The imaginary residue is a
// diagnostic available separately.
double trace(const CollectiveState& s);
double trace_imag_residual(const CollectiveState& s);

// Divides by trace(s); throws std::runtime_error when the trace is not a
// positive finite number (integration has failed, reduce dt).
void renormalize(CollectiveState& s);

// max |<n_uu,n_ud,n_du,n_dd> - conj <n_uu,n_du,n_ud,n_dd>| over all tuples.
double hermitian_residual(const CollectiveState& s);

// Binary dump: 16-byte header (magic "CDMS", version, N, reserved; u32
// little-endian) then (re, im) float64 pairs in flat-index order.
void save_state(const CollectiveState& s, const std::string& path);
CollectiveState load_state(const std::string& path);

}  // namespace cdms
