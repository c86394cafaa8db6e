#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "cdms/observables.hpp"
#include "cdms/params.hpp"
#include "cdms/state.hpp"

namespace cdms {

// Brute-force reference representation: the full 2^N x 2^N density matrix
// over product states, row-major, basis index bit N-1-k giving atom k's
// level (0 = up, 1 = dn). Deliberately ignorant of the collective mapping.
struct FullDensityMatrix {
  int n_atoms = 0;
  std::vector<std::complex<double>> rho;  // dim * dim, dim = 2^n_atoms

  int dim() const { return 1 << n_atoms; }
};

inline constexpr int kOracleMaxAtoms = 4;

FullDensityMatrix oracle_css(double theta, double phi, int n_atoms);

// One Euler step of the unreduced equation of motion followed by trace
// renormalization, built from explicit per-atom operator matrices. The same
// integrator, frame handling, and normalization policy as the collective
// solver, so any disagreement isolates the mapping algebra.
class OracleStepper {
 public:
  explicit OracleStepper(const DerivedParams& d,
                         std::optional<double> frame_shift_override = {});
  void step(FullDensityMatrix& rho, double dt, double dW) const;

 private:
  struct Channel {
    double rate;
    std::vector<std::complex<double>> op;    // dense
    std::vector<std::complex<double>> dag;   // its adjoint
    std::vector<std::complex<double>> diag;  // nonempty when op is diagonal
  };
  int n_ = 0;
  std::vector<Channel> channels_;                // recycling terms o rho o^dag
  std::vector<std::complex<double>> k_diag_;     // -iH - (1/2) sum rate o^dag o
  std::vector<std::complex<double>> b_diag_;     // measured-field operator
  bool measurement_ = false;
};

// Convenience wrapper building the stepper per call.
void full_sme_step(FullDensityMatrix& rho, const DerivedParams& d, double dt,
                   double dW);

// Copies one representative product-basis element per tuple after checking
// that every permutation-equivalent element agrees within 1e-10; throws
// std::runtime_error past the tolerance.
CollectiveState collective_projection(const FullDensityMatrix& rho);

// Largest disagreement among permutation-equivalent elements.
double oracle_symmetry_residual(const FullDensityMatrix& rho);

SpinMoments oracle_observables(const FullDensityMatrix& rho);

std::complex<double> oracle_bm_expectation(const FullDensityMatrix& rho,
                                           const DerivedParams& d);

double oracle_trace(const FullDensityMatrix& rho);
double oracle_hermitian_residual(const FullDensityMatrix& rho);

// Smallest eigenvalue (Jacobi on the hermitized matrix); the positivity
// diagnostic. O(dim^3) per sweep, intended for N <= 3 in routine tests.
double oracle_min_eigenvalue(const FullDensityMatrix& rho);

}  // namespace cdms
