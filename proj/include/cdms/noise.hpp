#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cdms {

// Standard-normal draw k of a counter-based stream: the same (seed, k) gives
// the same value on every platform, with no generator state to carry.
double normal_draw(std::uint64_t seed, std::uint64_t k);

// Inverse standard-normal CDF on (0,1), Wichura's PPND16 rational
// approximations; the deterministic core of normal_draw.
double inverse_normal_cdf(double p);

// A concrete sequence of standard-normal draws. dW_k = draws[k] * sqrt(dt);
// the step size is supplied by the integrator, not stored here.
class WienerPath {
 public:
  static WienerPath seeded(std::uint64_t seed, std::size_t count);
  static WienerPath from_file(const std::string& path);

  const std::vector<double>& draws() const { return draws_; }
  std::uint64_t seed() const { return seed_; }

  // Text format, one draw per line after the header
  // "# wiener v1 count=<K> seed=<S>", 17 significant digits.
  void save(const std::string& path) const;

 private:
  std::vector<double> draws_;
  std::uint64_t seed_ = 0;
};

}  // namespace cdms
