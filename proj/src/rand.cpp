#include "pf/rand.hpp"

#include <cmath>
#include <limits>

namespace pf {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Prng Prng::stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Prng(splitmix64(splitmix64(seed) ^ splitmix64(~stream_id)));
}

real Prng::uniform01() {
  constexpr int mantissa_bits = std::numeric_limits<real>::digits;
  const std::uint64_t bits = engine_() >> (64 - mantissa_bits);
  return static_cast<real>(bits) * std::ldexp(real{1}, -mantissa_bits);
}

real Prng::std_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // 1 - u lies in (0, 1], so the logarithm is finite.
  const real u1 = real{1} - uniform01();
  const real u2 = uniform01();
  const real radius = std::sqrt(real{-2} * std::log(u1));
  const real angle = 2 * std::numbers::pi_v<real> * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

real log_norm_pdf(real x, real mean, real sd) {
  if (!(sd > 0) || !std::isfinite(sd)) {
    throw InvalidScale("normal density needs a finite positive standard deviation");
  }
  const real z = (x - mean) / sd;
  return real{-0.5} * std::log(2 * std::numbers::pi_v<real>) - std::log(sd) - real{0.5} * z * z;
}

}  // namespace pf
