#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdms/noise.hpp"
#include "cdms/observables.hpp"
#include "cdms/params.hpp"
#include "cdms/state.hpp"

namespace cdms {

struct StepConfig {
  double dt = 1e-4;           // us
  double t_end = 0.5;         // us
  int renormalize_every = 1;  // steps between trace renormalizations
  int record_every = 100;     // steps between recorded rows
  std::optional<double> frame_shift_override;  // rad/us
  std::vector<double> snapshot_times;          // us
  bool measurement_on = true;  // false: deterministic dissipative evolution
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> jx, jy, jz;
  std::vector<double> dx, dy, dz;
  std::vector<double> xi2z;          // NaN where undefined
  std::vector<char> xi2z_defined;
  std::vector<double> photocurrent;  // shot-noise sample of the step ending at the row
  std::vector<double> trace_err;     // |pre-renormalization trace - 1| at the row's step
  std::vector<double> herm_err;      // conjugate-pair residual of the recorded state
  std::vector<DistributionSnapshot> snapshots;
  CollectiveState final_state;
  int steps_done = 0;
};

// Raised when a step produces a non-finite or non-positive trace.
struct IntegrationFailure : std::runtime_error {
  IntegrationFailure(const std::string& what, int step, double time)
      : std::runtime_error(what), step(step), time(time) {}
  int step;
  double time;
};

// One Euler step of the deterministic part: the phase rotation left by the
// frame choice, individual dissipation (with its population-shift gains),
// and collective dephasing. Returns the time derivative, not the increment.
std::vector<std::complex<double>> drift_deterministic(const CollectiveState& s,
                                                      const DerivedParams& d);

// Measurement backaction increment for one step: dW * (coupling(n) - <homodyne mean>) * <n>.
std::vector<std::complex<double>> measurement_term(const CollectiveState& s,
                                                   const DerivedParams& d,
                                                   double dW, double dt);

// Fused per-step kernel. Coefficients are affine or quadratic in the tuple,
// so the sweep walks the canonical sector order and derives them from the
// loop counters instead of streaming precomputed tables; each step is one
// diagonal pass (new trace and homodyne mean) plus one full sweep writing
// the renormalized output.
class CollectiveStepper {
 public:
  // Scalar prefactors of the per-tuple update coefficients; everything the
  // sweep needs besides the loop counters themselves. Division-free so the
  // per-element cost stays at multiply-add level.
  struct Rates {
    double lsum = 0.0;                    // gamma * (chi_up + chi_dn)
    double deph = 0.0;                    // collective dephasing prefactor
    double rot = 0.0;                     // residual frame rotation
    double gain_up = 0.0, gain_dn = 0.0;  // gamma * chi / 3, pump transfer
    double x2dr = 0.0, x2ur = 0.0;        // 2 Re xi_dn, 2 Re xi_up
    double xsum = 0.0;                    // Re xi_dn + Re xi_up
    double xid = 0.0;                     // Im(xi_up - xi_dn)
  };

  CollectiveStepper(const DerivedParams& d, const StepConfig& cfg);

  // Advances s by one step using the given standard-normal draw.
  void step(CollectiveState& s, double z);

  double last_pre_renorm_trace() const { return last_trace_; }
  // <b + b^dag> of the state the last step acted on.
  double last_homodyne_mean() const { return last_hmean_; }
  int steps_taken() const { return steps_; }

 private:
  friend std::vector<std::complex<double>> drift_deterministic(
      const CollectiveState&, const DerivedParams&);
  friend std::vector<std::complex<double>> measurement_term(
      const CollectiveState&, const DerivedParams&, double, double);
  double dt_;
  bool measurement_;
  int renorm_every_;
  double sqrt_dt_;
  int n_;
  Rates rates_;
  std::vector<std::int64_t> diag_idx_;
  std::vector<double> log_binom_, bm_weight_;
  std::vector<std::complex<double>> scratch_;
  double last_trace_ = 1.0;
  double last_hmean_ = 0.0;
  int steps_ = 0;
};

/// Full run: CSS initialization, one draw per step, records every
// record_every steps (plus t = 0) and snapshots at the requested times.
TrajectoryRecord run_trajectory(const PhysicalParams& p, const StepConfig& cfg,
                                const WienerPath& noise);

}  // namespace cdms
