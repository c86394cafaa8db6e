#include "cdms/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#if defined(__x86_64__) || defined(_M_X64)
#include <xmmintrin.h>
#endif

#include "cdms/indexing.hpp"
#include "cdms/internal/logsum.hpp"

namespace cdms {

namespace {

// Decaying coherence sectors drain through the subnormal range on long runs
// and put the whole sweep on the slow FP path (measured ~5x). Amplitudes
// three hundred orders below the trace carry no physics, so flush them to
// zero while stepping; the caller's FP environment is restored on exit.
class FlushDenormals {
 public:
  FlushDenormals() {
#if defined(__x86_64__) || defined(_M_X64)
    csr_ = _mm_getcsr();
    _mm_setcsr(csr_ | 0x8040u);  // FTZ | DAZ
#endif
  }
  ~FlushDenormals() {
#if defined(__x86_64__) || defined(_M_X64)
    _mm_setcsr(csr_);
#endif
  }
  FlushDenormals(const FlushDenormals&) = delete;
  FlushDenormals& operator=(const FlushDenormals&) = delete;

 private:
  unsigned csr_ = 0;
};

struct StepScalars {
  double dt;
  double dW;
  double b_re, b_im;  // homodyne mean <b+b^dag> of the pre-step state
};

// Per-tuple coefficients: drift diagonal (decay + dephasing + phase) and
// measurement coupling.
struct TupleCoeffs {
  double cr, ci;
  double mre, mim;
};

// Shared by the trace pre-pass, the full sweep, and the test-support
// decompositions, so all of them see bitwise identical coefficients.
// The population-loss terms couple cross-wise (up loss scales with n_dd,
// down loss with n_uu) at exactly one third of the pump transfer rate,
// so the gains double as the loss prefactors.
inline TupleCoeffs tuple_coeffs(const CollectiveStepper::Rates& r, int n_uu,
                                int n_ud, int n_du, int n_dd) {
  const double half_coh = 0.5 * (n_ud + n_du);
  const double loss = r.lsum * half_coh + r.gain_up * n_dd + r.gain_dn * n_uu;
  const double dcoh = n_du - n_ud;
  TupleCoeffs c;
  c.cr = -(loss + r.deph * dcoh * dcoh);
  c.ci = -r.rot * dcoh;
  c.mre = r.x2dr * n_uu + r.x2ur * n_dd + r.xsum * (n_ud + n_du);
  c.mim = r.xid * dcoh;
  return c;
}

// Unrenormalized one-step update of element i, written once so the diagonal
// pre-pass (which fixes the new trace) and the full sweep produce bitwise
// identical values. Inputs are raw (re, im) pairs to keep the hot loop free
// of library complex-multiply calls.
template <bool kMeasurement>
inline void update_element(const double* s, std::int64_t i, std::int64_t ju,
                           std::int64_t jd, const TupleCoeffs& c, double gup,
                           double gdn, const StepScalars& k, double& out_re,
                           double& out_im) {
  const std::size_t i2 = 2 * static_cast<std::size_t>(i);
  const std::size_t u2 = 2 * static_cast<std::size_t>(ju);
  const std::size_t d2 = 2 * static_cast<std::size_t>(jd);
  const double a_re = s[i2], a_im = s[i2 + 1];
  const double d_re = c.cr * a_re - c.ci * a_im + gup * s[u2] + gdn * s[d2];
  const double d_im = c.cr * a_im + c.ci * a_re + gup * s[u2 + 1] + gdn * s[d2 + 1];
  out_re = a_re + k.dt * d_re;
  out_im = a_im + k.dt * d_im;
  if constexpr (kMeasurement) {
    const double f_re = k.dW * (c.mre - k.b_re);
    const double f_im = k.dW * (c.mim - k.b_im);
    out_re += f_re * a_re - f_im * a_im;
    out_im += f_re * a_im + f_im * a_re;
  }
}

// One full update sweep over the canonical enumeration. Neighbor indices are
// row pointers advanced alongside the inner loop: the pump source of
// (n_uu, n_ud, n_du, n_dd) sits at the same (n_du, n_ud) offset of the
// adjacent n_dd sector, whose rows are one element shorter (+1 deeper) or
// longer (-1 shallower). Returns the largest |component| written, so the
// caller can detect divergence the diagonal trace alone would miss.
template <bool kMeasurement>
double run_sweep(const double* sv, double* out, int n,
                 const CollectiveStepper::Rates& r, const StepScalars& k,
                 double inv_t) {
  double peak = 0.0;
  std::int64_t i = 0;
  std::int64_t base = 0;     // first flat index of the n_dd sector
  std::int64_t base_dn = 0;  // of the n_dd - 1 sector; meaningful for n_dd >= 1
  for (int n_dd = 0; n_dd <= n; ++n_dd) {
    const int rest = n - n_dd;
    const std::int64_t sz =
        static_cast<std::int64_t>(rest + 1) * (rest + 2) / 2;
    const std::int64_t base_up = base + sz;
    for (int n_du = 0; n_du <= rest; ++n_du) {
      const std::int64_t tri =
          static_cast<std::int64_t>(n_du) * (n_du - 1) / 2;
      const std::int64_t row_up = base_up + static_cast<std::int64_t>(n_du) * rest - tri;
      const std::int64_t row_dn = base_dn + static_cast<std::int64_t>(n_du) * (rest + 2) - tri;
      for (int n_ud = 0; n_ud <= rest - n_du; ++n_ud, ++i) {
        const int n_uu = rest - n_du - n_ud;
        const TupleCoeffs c = tuple_coeffs(r, n_uu, n_ud, n_du, n_dd);
        const double gup = r.gain_up * n_uu;
        const double gdn = r.gain_dn * n_dd;
        const std::int64_t ju = n_uu > 0 ? row_up + n_ud : i;
        const std::int64_t jd = n_dd > 0 ? row_dn + n_ud : i;
        double o_re, o_im;
        update_element<kMeasurement>(sv, i, ju, jd, c, gup, gdn, k, o_re, o_im);
        const std::size_t i2 = 2 * static_cast<std::size_t>(i);
        out[i2] = o_re * inv_t;
        out[i2 + 1] = o_im * inv_t;
        peak = std::max(peak, std::max(std::fabs(out[i2]), std::fabs(out[i2 + 1])));
      }
    }
    base_dn = base;
    base += sz;
  }
  return peak;
}

}  // namespace

CollectiveStepper::CollectiveStepper(const DerivedParams& d, const StepConfig& cfg)
    : dt_(cfg.dt),
      measurement_(cfg.measurement_on),
      renorm_every_(cfg.renormalize_every),
      sqrt_dt_(std::sqrt(cfg.dt)),
      n_(d.phys.n_atoms) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("step config: dt must be > 0");
  if (cfg.renormalize_every < 1)
    throw std::invalid_argument("step config: renormalize_every must be >= 1");

  const double frame = cfg.frame_shift_override.value_or(d.frame_shift);
  const double loss_up = d.phys.gamma * d.chi_up;
  const double loss_dn = d.phys.gamma * d.chi_dn;
  rates_.lsum = loss_up + loss_dn;
  rates_.deph = 2.0 * d.phys.g * d.phys.g / d.phys.kappa * (d.chi_up + d.chi_dn);
  rates_.rot =
      2.0 * (d.phys.delta_up * d.chi_up - d.phys.delta_dn * d.chi_dn) - frame;
  rates_.gain_up = loss_up / 3.0;
  rates_.gain_dn = loss_dn / 3.0;
  rates_.x2dr = 2.0 * d.xi_dn.real();
  rates_.x2ur = 2.0 * d.xi_up.real();
  rates_.xsum = d.xi_dn.real() + d.xi_up.real();
  rates_.xid = d.xi_up.imag() - d.xi_dn.imag();

  scratch_.resize(state_count(n_));

  diag_idx_.resize(n_ + 1);
  log_binom_.resize(n_ + 1);
  bm_weight_.resize(n_ + 1);
  for (int l = 0; l <= n_; ++l) {
    diag_idx_[l] = flat_index({l, 0, 0, n_ - l}, n_);
    log_binom_[l] = internal::log_binomial(n_, l);
    bm_weight_[l] = 2.0 * d.xi_up.real() * (n_ - l) + 2.0 * d.xi_dn.real() * l;
  }
}

void CollectiveStepper::step(CollectiveState& s, double z) {
  if (s.n_atoms != n_ || s.amp.size() != scratch_.size())
    throw std::invalid_argument("stepper: state does not match the configured N");

  const FlushDenormals fp_mode;
  StepScalars k{};
  k.dt = dt_;
  k.dW = measurement_ ? z * sqrt_dt_ : 0.0;

  const double* sv = reinterpret_cast<const double*>(s.amp.data());

  if (measurement_) {
    // homodyne mean of the pre-step state, binomial weights paired in log space
    std::complex<double> b = 0.0;
    for (int l = 0; l <= n_; ++l)
      b += bm_weight_[l] *
           internal::scaled_by_log_binomial(s.amp[diag_idx_[l]], log_binom_[l]);
    k.b_re = b.real();
    k.b_im = b.imag();
    last_hmean_ = b.real();
  }

  // New trace from the diagonal alone: its update only touches diagonal
  // neighbors, so the normalization of the full sweep is known up front.
  // Same coefficient helper as the sweep, so the two agree bitwise.
  double new_trace = 0.0;
  for (int l = 0; l <= n_; ++l) {
    const TupleCoeffs c = tuple_coeffs(rates_, l, 0, 0, n_ - l);
    const double gup = rates_.gain_up * l;
    const double gdn = rates_.gain_dn * (n_ - l);
    const std::int64_t i = diag_idx_[l];
    const std::int64_t ju = l > 0 ? diag_idx_[l - 1] : i;
    const std::int64_t jd = l < n_ ? diag_idx_[l + 1] : i;
    double o_re, o_im;
    if (measurement_)
      update_element<true>(sv, i, ju, jd, c, gup, gdn, k, o_re, o_im);
    else
      update_element<false>(sv, i, ju, jd, c, gup, gdn, k, o_re, o_im);
    new_trace += internal::scaled_by_log_binomial(o_re, log_binom_[l]);
  }
  last_trace_ = new_trace;
  if (!std::isfinite(new_trace) || new_trace <= 0.0)
    throw IntegrationFailure(
        "trace became " + std::to_string(new_trace) + "; reduce dt",
        steps_, steps_ * dt_);

  const bool renorm = (steps_ + 1) % renorm_every_ == 0;
  const double inv_t = renorm ? 1.0 / new_trace : 1.0;

  double* out = reinterpret_cast<double*>(scratch_.data());
  const double peak = measurement_
                          ? run_sweep<true>(sv, out, n_, rates_, k, inv_t)
                          : run_sweep<false>(sv, out, n_, rates_, k, inv_t);
  // The trace only sees the diagonal sector; coherences can overflow on
  // their own when dt is far too large. 1e150 leaves room for the squares
  // taken downstream by the observable sums.
  if (!(peak < 1e150))
    throw IntegrationFailure("state amplitude reached " + std::to_string(peak) +
                                 "; reduce dt",
                             steps_, steps_ * dt_);
  s.amp.swap(scratch_);
  ++steps_;
}

std::vector<std::complex<double>> drift_deterministic(const CollectiveState& s,
                                                      const DerivedParams& d) {
  StepConfig cfg;
  cfg.measurement_on = false;
  CollectiveStepper st(d, cfg);
  // same per-tuple coefficients as the stepper: derivative = drift increment / dt
  const int n = s.n_atoms;
  std::vector<std::complex<double>> deriv(s.amp.size());
  std::int64_t i = 0;
  std::int64_t base = 0, base_dn = 0;
  for (int n_dd = 0; n_dd <= n; ++n_dd) {
    const int rest = n - n_dd;
    const std::int64_t sz = static_cast<std::int64_t>(rest + 1) * (rest + 2) / 2;
    const std::int64_t base_up = base + sz;
    for (int n_du = 0; n_du <= rest; ++n_du) {
      const std::int64_t tri = static_cast<std::int64_t>(n_du) * (n_du - 1) / 2;
      const std::int64_t row_up = base_up + static_cast<std::int64_t>(n_du) * rest - tri;
      const std::int64_t row_dn = base_dn + static_cast<std::int64_t>(n_du) * (rest + 2) - tri;
      for (int n_ud = 0; n_ud <= rest - n_du; ++n_ud, ++i) {
        const int n_uu = rest - n_du - n_ud;
        const TupleCoeffs c = tuple_coeffs(st.rates_, n_uu, n_ud, n_du, n_dd);
        std::complex<double> v = std::complex<double>(c.cr, c.ci) * s.amp[i];
        if (n_uu > 0) v += st.rates_.gain_up * n_uu * s.amp[row_up + n_ud];
        if (n_dd > 0) v += st.rates_.gain_dn * n_dd * s.amp[row_dn + n_ud];
        deriv[i] = v;
      }
    }
    base_dn = base;
    base += sz;
  }
  return deriv;
}

std::vector<std::complex<double>> measurement_term(const CollectiveState& s,
                                                   const DerivedParams& d,
                                                   double dW, double dt) {
  (void)dt;  // the dt of the underlying derivative is absorbed into dW
  StepConfig cfg;
  CollectiveStepper st(d, cfg);
  std::complex<double> b = 0.0;
  for (int l = 0; l <= s.n_atoms; ++l)
    b += st.bm_weight_[l] *
         internal::scaled_by_log_binomial(s.amp[st.diag_idx_[l]], st.log_binom_[l]);
  const int n = s.n_atoms;
  std::vector<std::complex<double>> inc(s.amp.size());
  std::int64_t i = 0;
  for (int n_dd = 0; n_dd <= n; ++n_dd)
    for (int n_du = 0; n_du <= n - n_dd; ++n_du)
      for (int n_ud = 0; n_ud <= n - n_dd - n_du; ++n_ud, ++i) {
        const int n_uu = n - n_dd - n_du - n_ud;
        const TupleCoeffs c = tuple_coeffs(st.rates_, n_uu, n_ud, n_du, n_dd);
        inc[i] = dW * (std::complex<double>(c.mre, c.mim) - b) * s.amp[i];
      }
  return inc;
}

TrajectoryRecord run_trajectory(const PhysicalParams& p, const StepConfig& cfg,
                                const WienerPath& noise) {
  const DerivedParams d = derive_params(p);
  if (!(cfg.t_end >= cfg.dt))
    throw std::invalid_argument("step config: t_end must be >= dt");
  const std::int64_t steps = std::llround(cfg.t_end / cfg.dt);
  if (noise.draws().size() < static_cast<std::size_t>(steps))
    throw std::invalid_argument(
        "noise path provides " + std::to_string(noise.draws().size()) +
        " draws but the run needs " + std::to_string(steps));

  CollectiveState s = css_init(p.theta, p.phi, p.n_atoms);
  CollectiveStepper stepper(d, cfg);

  // snapshots land on the nearest step boundary of each requested time
  std::multimap<std::int64_t, double> snap_at;
  for (double ts : cfg.snapshot_times)
    snap_at.emplace(std::clamp<std::int64_t>(std::llround(ts / cfg.dt), 0, steps), ts);

  TrajectoryRecord rec;
  auto record_row = [&](double t, double current) {
    const SpinMoments m = spin_moments(s);
    const SqueezingResult xi = squeezing_parameter(s);
    rec.times.push_back(t);
    rec.jx.push_back(m.jx);
    rec.jy.push_back(m.jy);
    rec.jz.push_back(m.jz);
    rec.dx.push_back(m.dx);
    rec.dy.push_back(m.dy);
    rec.dz.push_back(m.dz);
    rec.xi2z.push_back(xi.value);
    rec.xi2z_defined.push_back(xi.defined ? 1 : 0);
    rec.photocurrent.push_back(current);
    rec.trace_err.push_back(std::abs(stepper.steps_taken() == 0
                                         ? trace(s) - 1.0
                                         : stepper.last_pre_renorm_trace() - 1.0));
    rec.herm_err.push_back(hermitian_residual(s));
  };

  for (auto [step0, ts] : snap_at)
    if (step0 == 0) rec.snapshots.push_back(capture_snapshot(s, ts));
  record_row(0.0, 2.0 * bm_expectation(s, d).real());

  for (std::int64_t k = 0; k < steps; ++k) {
    const double z = noise.draws()[k];
    stepper.step(s, z);  // throws IntegrationFailure on blow-up
    const double t = (k + 1) * cfg.dt;
    auto [lo, hi] = snap_at.equal_range(k + 1);
    for (auto it = lo; it != hi; ++it)
      rec.snapshots.push_back(capture_snapshot(s, it->second));
    if ((k + 1) % cfg.record_every == 0) {
      // I_k dt = <b + b^dag> dt + dW: the row at t_{k+1} carries the
      // current of the step that produced it.
      const double current = cfg.measurement_on
          ? stepper.last_homodyne_mean() + z * std::sqrt(cfg.dt) / cfg.dt
          : 2.0 * bm_expectation(s, d).real();
      record_row(t, current);
    }
  }
  rec.final_state = std::move(s);
  rec.steps_done = static_cast<int>(steps);
  return rec;
}

}  // namespace cdms
