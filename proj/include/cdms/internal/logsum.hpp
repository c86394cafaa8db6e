#pragma once

#include <cmath>
#include <complex>

namespace cdms::internal {

inline double log_binomial(int n, int l) {
  return std::lgamma(n + 1.0) - std::lgamma(l + 1.0) -
         std::lgamma(n - l + 1.0);
}

// C(n,l) * x evaluated as exp(log C + log |x|) * phase(x). The pairing is
// mandatory: at large N either factor alone overflows or underflows while
// the product stays O(1).
inline std::complex<double> scaled_by_log_binomial(const std::complex<double>& x,
                                                   double log_binom) {
  const double m = std::abs(x);
  if (m == 0.0) return {0.0, 0.0};
  return (x / m) * std::exp(log_binom + std::log(m));
}

inline double scaled_by_log_binomial(double x, double log_binom) {
  if (x == 0.0) return 0.0;
  const double s = std::exp(log_binom + std::log(std::abs(x)));
  return x < 0.0 ? -s : s;
}

inline std::complex<double> scaled_by_log_binomial(const std::complex<double>& x,
                                                   int n, int l) {
  return scaled_by_log_binomial(x, log_binomial(n, l));
}

inline double scaled_by_log_binomial(double x, int n, int l) {
  return scaled_by_log_binomial(x, log_binomial(n, l));
}

}  // namespace cdms::internal
