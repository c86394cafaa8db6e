#pragma once

#include <complex>
#include <vector>

#include "cdms/params.hpp"
#include "cdms/state.hpp"

namespace cdms {

struct SpinMoments {
  double jx = 0, jy = 0, jz = 0;     // first moments
  double jx2 = 0, jy2 = 0, jz2 = 0;  // second moments
  double dx = 0, dy = 0, dz = 0;     // uncertainties
};

enum class Axis { X, Y, Z };

struct SqueezingResult {
  double value = 0.0;
  bool defined = false;  // false when the transverse polarization vanishes
};

// First moments (jx, jy from the single-coherence sector, jz from the
// diagonal). State must be normalized.
void spin_expectations(const CollectiveState& s, double& jx, double& jy,
                       double& jz);

// Second moments from the four coherence sectors and the diagonal.
void spin_second_moments(const CollectiveState& s, double& jx2, double& jy2,
                         double& jz2);

SpinMoments spin_moments(const CollectiveState& s);

// N (dJ_n1)^2 / (<J_n2>^2 + <J_n3>^2). Degenerate denominator reports
// undefined (value NaN) rather than clamping or diverging silently.
SqueezingResult squeezing_parameter(const CollectiveState& s, Axis n1, Axis n2,
                                    Axis n3);
SqueezingResult squeezing_parameter(const CollectiveState& s);  // (z, x, y)

// <b_m> where the measured field couples xi_dn to the up population and
// xi_up to the down population; twice its real part is the homodyne mean.
std::complex<double> bm_expectation(const CollectiveState& s,
                                    const DerivedParams& d);

enum class SnapshotWeight { One, Centered, CenteredSq };

// weight(l) * <l,0;0,N-l> over l = 0..N; the bare element, no C(N,l) factor.
std::vector<double> distribution_snapshot(const CollectiveState& s,
                                          SnapshotWeight weight);

// All three weightings at once, tagged with the capture time.
struct DistributionSnapshot {
  double time = 0.0;
  std::vector<double> w1, wl, wl2;
};
DistributionSnapshot capture_snapshot(const CollectiveState& s, double time);

}  // namespace cdms
