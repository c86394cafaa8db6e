#pragma once

#include <complex>
#include <string>
#include <vector>

namespace cdms {

// Physical inputs. All angular frequencies in rad/us; time unit is us.
// A quantity quoted as "2pi x 3.0 MHz" enters as 2*pi*3.0.
struct PhysicalParams {
  double omega_ud = 0.0;  // hyperfine splitting (metadata; does not drive dynamics)
  double delta_up = 0.0;
  double delta_dn = 0.0;
  double kappa = 0.0;
  double g = 0.0;
  double gamma = 0.0;
  double eta = 0.0;      // detector efficiency in [0,1]
  double beta_in = 0.0;  // probe amplitude, real >= 0
  double vartheta = 0.0; // polarization angle (rad)
  int n_atoms = 1;
  double theta = 0.0;    // initial CSS polar angle (rad)
  double phi = 0.0;      // initial CSS azimuth (rad)

  // The simulation defaults (N = 100, probe on the pi-polarized axis).
  static PhysicalParams defaults();
};

struct DerivedParams {
  double beta_up = 0.0, beta_dn = 0.0;  // intra-mode amplitudes (real)
  double chi_up = 0.0, chi_dn = 0.0;    // saturation parameters
  std::complex<double> xi_up, xi_dn;    // measurement couplings, (rad/us)^(1/2)
  double rate_pump = 0.0;               // (1/3) gamma chi_up
  double rate_decay = 0.0;              // (1/3) gamma chi_dn
  double rate_deph_ind_up = 0.0, rate_deph_ind_dn = 0.0;    // (2/3) gamma chi_a
  double rate_deph_coll_up = 0.0, rate_deph_coll_dn = 0.0;  // (4g^2/kappa) chi_a
  double coop = 0.0;    // single-atom cooperativity 4g^2/(kappa gamma)
  double n_coop = 0.0;  // N * coop
  double frame_shift = 0.0;  // default cancels the residual phase rotation
  std::vector<std::string> warnings;  // validity diagnostics, non-fatal
  PhysicalParams phys;  // inputs carried along for the integrator
};

// Computes every derived coefficient. Throws std::invalid_argument when the
// input invariants are violated (kappa <= 0, eta outside [0,1], ...).
// A saturation parameter >= 0.1 only appends a warning: the equations stay
// well defined, the adiabatic elimination behind them degrades.
DerivedParams derive_params(const PhysicalParams& p);

}  // namespace cdms
