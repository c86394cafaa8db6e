#include "cdms/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cdms {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

PhysicalParams PhysicalParams::defaults() {
  PhysicalParams p;
  p.omega_ud = kTwoPi * 1560.0;
  p.delta_up = kTwoPi * 1000.0;
  p.delta_dn = kTwoPi * 1000.0;
  p.kappa = kTwoPi * 3.0;
  p.g = kTwoPi * 1.5;
  p.gamma = kTwoPi * 4.9;
  p.eta = 0.6;
  p.beta_in = 120.0;
  p.vartheta = 0.0;
  p.n_atoms = 100;
  p.theta = 0.5 * std::numbers::pi;
  p.phi = 0.0;
  return p;
}

DerivedParams derive_params(const PhysicalParams& p) {
  if (!(p.kappa > 0.0))
    throw std::invalid_argument("derive_params: kappa must be > 0");
  if (!(p.gamma >= 0.0))
    throw std::invalid_argument("derive_params: gamma must be >= 0");
  if (!(p.g >= 0.0)) throw std::invalid_argument("derive_params: g must be >= 0");
  if (!(p.eta >= 0.0 && p.eta <= 1.0))
    throw std::invalid_argument("derive_params: eta must lie in [0,1]");
  if (!(p.beta_in >= 0.0))
    throw std::invalid_argument("derive_params: beta_in must be >= 0");
  if (p.n_atoms < 1)
    throw std::invalid_argument("derive_params: n_atoms must be >= 1");

  DerivedParams d;
  d.phys = p;

  // Power split between the two circular components. cos(2*vartheta) is
  // snapped to zero near vartheta = pi/4 so the balanced point yields
  // xi_dn - xi_up = 0 exactly, as the null there is structural, not a
  // rounding accident.
  double c2 = std::cos(2.0 * p.vartheta);
  if (std::abs(c2) < 8e-16) c2 = 0.0;
  const double w_up = 0.5 * (1.0 + c2);
  const double w_dn = 0.5 * (1.0 - c2);
  const double b_in2 = p.beta_in * p.beta_in;
  const double b_up2 = w_up * b_in2;
  const double b_dn2 = w_dn * b_in2;
  d.beta_up = std::sqrt(b_up2);
  d.beta_dn = std::sqrt(b_dn2);

  const double g2 = p.g * p.g;
  const double gam_half2 = 0.25 * p.gamma * p.gamma;
  d.chi_up = g2 * b_up2 / (p.delta_up * p.delta_up + gam_half2);
  d.chi_dn = g2 * b_dn2 / (p.delta_dn * p.delta_dn + gam_half2);

  const std::complex<double> half_width(0.0, 0.5 * p.gamma);
  const double mcoup = std::sqrt(p.eta * p.kappa) * (2.0 * g2 / p.kappa);
  if (p.beta_in > 0.0) {
    d.xi_up = (b_up2 / p.beta_in) * mcoup /
              (std::complex<double>(p.delta_up, 0.0) - half_width);
    d.xi_dn = (b_dn2 / p.beta_in) * mcoup /
              (std::complex<double>(p.delta_dn, 0.0) - half_width);
  }  // beta_in = 0: no probe, no measurement coupling

  d.rate_pump = p.gamma * d.chi_up / 3.0;
  d.rate_decay = p.gamma * d.chi_dn / 3.0;
  d.rate_deph_ind_up = 2.0 * p.gamma * d.chi_up / 3.0;
  d.rate_deph_ind_dn = 2.0 * p.gamma * d.chi_dn / 3.0;
  const double coll = 4.0 * g2 / p.kappa;
  d.rate_deph_coll_up = coll * d.chi_up;
  d.rate_deph_coll_dn = coll * d.chi_dn;
  d.coop = p.gamma > 0.0 ? coll / p.gamma : 0.0;
  d.n_coop = d.coop * p.n_atoms;
  d.frame_shift = 2.0 * (p.delta_up * d.chi_up - p.delta_dn * d.chi_dn);

  if (d.chi_up >= 0.1 || d.chi_dn >= 0.1)
    d.warnings.push_back(
        "saturation parameter >= 0.1: the adiabatic elimination behind the "
        "effective equations is marginal at these drive strengths");
  return d;
}

}  // namespace cdms
