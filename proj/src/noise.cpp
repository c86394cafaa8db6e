#include "cdms/noise.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cdms {
namespace {

// SplitMix64 finalizer over seed + counter: well mixed, stateless, and
// identical everywhere 64-bit integers behave.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// open-interval uniform from the top 53 bits, offset so 0 and 1 are excluded
double to_unit_open(std::uint64_t x) {
  return (x >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

}  // namespace

double inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                   6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
               1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return q < 0.0 ? -val : val;
}

double normal_draw(std::uint64_t seed, std::uint64_t k) {
  return inverse_normal_cdf(to_unit_open(mix64(seed + k * 0x9E3779B97F4A7C15ull)));
}

WienerPath WienerPath::seeded(std::uint64_t seed, std::size_t count) {
  WienerPath w;
  w.seed_ = seed;
  w.draws_.resize(count);
  for (std::size_t k = 0; k < count; ++k)
    w.draws_[k] = normal_draw(seed, k);
  return w;
}

WienerPath WienerPath::from_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("noise file: cannot open " + path);
  char header[256];
  if (!std::fgets(header, sizeof header, f)) {
    std::fclose(f);
    throw std::runtime_error("noise file: empty file " + path);
  }
  std::uint64_t count = 0, seed = 0;
  if (std::sscanf(header, "# wiener v1 count=%" SCNu64 " seed=%" SCNu64,
                  &count, &seed) != 2) {
    std::fclose(f);
    throw std::runtime_error("noise file: bad header in " + path);
  }
  WienerPath w;
  w.seed_ = seed;
  w.draws_.resize(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    double v;
    if (std::fscanf(f, "%lf", &v) != 1) {
      std::fclose(f);
      throw std::runtime_error("noise file: expected " + std::to_string(count) +
                               " draws, got " + std::to_string(k) + " in " + path);
    }
    w.draws_[k] = v;
  }
  std::fclose(f);
  return w;
}

void WienerPath::save(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("noise file: cannot open " + path + " for writing");
  std::fprintf(f, "# wiener v1 count=%zu seed=%" PRIu64 "\n", draws_.size(), seed_);
  for (double v : draws_) std::fprintf(f, "%.17g\n", v);
  std::fclose(f);
}

}  // namespace cdms
