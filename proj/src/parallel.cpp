#include "histq/parallel.hpp"

#include <cstdlib>
#include <string>

namespace histq {

std::size_t worker_count() {
  if (const char* env = std::getenv("HISTQ_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
      // ignore malformed values
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

complex tree_sum(std::span<const complex> values) {
  if (values.empty()) return {};
  if (values.size() <= 8) {
    complex acc{};
    for (const auto& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return tree_sum(values.first(half)) + tree_sum(values.subspan(half));
}

}  // namespace histq
