#include "histq/random.hpp"

#include <cmath>
#include <numbers>

namespace histq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::string_view name)
    : seed_(seed), key_(fnv1a(name)), engine_(splitmix64(seed ^ splitmix64(fnv1a(name)))) {}

RandomStream RandomStream::split(std::string_view child) const {
  RandomStream out(seed_, "");
  out.key_ = fnv1a(child, fnv1a("/", key_));
  out.engine_.seed(splitmix64(seed_ ^ splitmix64(out.key_)));
  return out;
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

complex RandomStream::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::size_t RandomStream::index(std::size_t n) {
  if (n == 0) return 0;
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

}  // namespace histq
