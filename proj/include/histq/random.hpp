#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "histq/matrix.hpp"

namespace histq {

// Recorded in output metadata so reruns can be matched to the generator.
inline constexpr std::string_view kPrngVersion = "mt19937_64+splitmix64-v1";

/// One named random stream derived from a master seed. Streams with different
/// names are independent; the same (seed, name) always yields the same draws.
/// Floating-point draws are built from raw engine output so results do not
/// depend on the standard library's distribution implementations.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::string_view name);

  /// The child stream "<name>/<child>".
  RandomStream split(std::string_view child) const;

  double uniform();         // [0, 1)
  double normal();          // standard normal
  complex complex_normal(); // (N + iN) / sqrt(2)
  std::size_t index(std::size_t n);  // uniform in [0, n)

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace histq
