#include "cdms/observables.hpp"

#include <cmath>
#include <limits>

#include "cdms/indexing.hpp"
#include "cdms/internal/logsum.hpp"

namespace cdms {

using internal::log_binomial;
using internal::scaled_by_log_binomial;

void spin_expectations(const CollectiveState& s, double& jx, double& jy,
                       double& jz) {
  const int n = s.n_atoms;
  std::complex<double> jplus = 0.0;
  double z = 0.0;
  for (int l = 0; l <= n; ++l) {
    const double lb = log_binomial(n, l);
    z += (2.0 * l - n) *
         scaled_by_log_binomial(s.amp[flat_index({l, 0, 0, n - l}, n)].real(), lb);
    if (l >= 1)
      jplus += static_cast<double>(l) *
               scaled_by_log_binomial(s.amp[flat_index({l - 1, 0, 1, n - l}, n)], lb);
  }
  jx = jplus.real();
  jy = -jplus.imag();
  jz = 0.5 * z;
}

void spin_second_moments(const CollectiveState& s, double& jx2, double& jy2,
                         double& jz2) {
  const int n = s.n_atoms;
  // four coherence-sector sums entering <Jx^2> and <Jy^2>
  std::complex<double> t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
  double z2 = 0.0;
  for (int l = 0; l <= n; ++l) {
    const double lb = log_binomial(n, l);
    const std::complex<double> diag = s.amp[flat_index({l, 0, 0, n - l}, n)];
    z2 += 0.25 * (2.0 * l - n) * (2.0 * l - n) *
          scaled_by_log_binomial(diag.real(), lb);
    t2 += static_cast<double>(n) * scaled_by_log_binomial(diag, lb);
    if (l >= 2)
      t1 += static_cast<double>(l) * (l - 1.0) *
            scaled_by_log_binomial(s.amp[flat_index({l - 2, 0, 2, n - l}, n)], lb);
    if (l >= 1 && l <= n - 1)
      t3 += 2.0 * l * (n - l) *
            scaled_by_log_binomial(s.amp[flat_index({l - 1, 1, 1, n - l - 1}, n)], lb);
    if (l <= n - 2)
      t4 += (n - l) * (n - l - 1.0) *
            scaled_by_log_binomial(s.amp[flat_index({l, 2, 0, n - l - 2}, n)], lb);
  }
  jx2 = 0.25 * (t1 + t2 + t3 + t4).real();
  jy2 = -0.25 * (t1 - t2 - t3 + t4).real();
  jz2 = z2;
}

SpinMoments spin_moments(const CollectiveState& s) {
  SpinMoments m;
  spin_expectations(s, m.jx, m.jy, m.jz);
  spin_second_moments(s, m.jx2, m.jy2, m.jz2);
  m.dx = std::sqrt(std::max(0.0, m.jx2 - m.jx * m.jx));
  m.dy = std::sqrt(std::max(0.0, m.jy2 - m.jy * m.jy));
  m.dz = std::sqrt(std::max(0.0, m.jz2 - m.jz * m.jz));
  return m;
}

namespace {

double pick(const SpinMoments& m, Axis a, bool second) {
  switch (a) {
    case Axis::X: return second ? m.jx2 : m.jx;
    case Axis::Y: return second ? m.jy2 : m.jy;
    default: return second ? m.jz2 : m.jz;
  }
}

}  // namespace

SqueezingResult squeezing_parameter(const CollectiveState& s, Axis n1, Axis n2,
                                    Axis n3) {
  const SpinMoments m = spin_moments(s);
  const double mean = pick(m, n1, false);
  const double var = pick(m, n1, true) - mean * mean;
  const double a = pick(m, n2, false);
  const double b = pick(m, n3, false);
  const double denom = a * a + b * b;
  // An analytically unpolarized transverse plane still leaves O(N*eps)
  // cancellation residue in the moment sums; a denominator at that scale
  // is noise, not signal.
  const double floor_ = 1e-12 * static_cast<double>(s.n_atoms);
  SqueezingResult r;
  if (!(denom > floor_ * floor_) || !std::isfinite(denom)) {
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.defined = false;
    return r;
  }
  r.value = s.n_atoms * var / denom;
  r.defined = true;
  return r;
}

SqueezingResult squeezing_parameter(const CollectiveState& s) {
  return squeezing_parameter(s, Axis::Z, Axis::X, Axis::Y);
}

std::complex<double> bm_expectation(const CollectiveState& s,
                                    const DerivedParams& d) {
  const int n = s.n_atoms;
  std::complex<double> acc = 0.0;
  for (int l = 0; l <= n; ++l) {
    const std::complex<double> w =
        d.xi_up * static_cast<double>(n - l) + d.xi_dn * static_cast<double>(l);
    acc += w * scaled_by_log_binomial(s.amp[flat_index({l, 0, 0, n - l}, n)],
                                      log_binomial(n, l));
  }
  return acc;
}

std::vector<double> distribution_snapshot(const CollectiveState& s,
                                          SnapshotWeight weight) {
  const int n = s.n_atoms;
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (int l = 0; l <= n; ++l) {
    const double el = s.amp[flat_index({l, 0, 0, n - l}, n)].real();
    const double c = l - 0.5 * n;
    switch (weight) {
      case SnapshotWeight::One: out[l] = el; break;
      case SnapshotWeight::Centered: out[l] = c * el; break;
      case SnapshotWeight::CenteredSq: out[l] = c * c * el; break;
    }
  }
  return out;
}

DistributionSnapshot capture_snapshot(const CollectiveState& s, double time) {
  DistributionSnapshot snap;
  snap.time = time;
  snap.w1 = distribution_snapshot(s, SnapshotWeight::One);
  snap.wl = distribution_snapshot(s, SnapshotWeight::Centered);
  snap.wl2 = distribution_snapshot(s, SnapshotWeight::CenteredSq);
  return snap;
}

}  // namespace cdms
