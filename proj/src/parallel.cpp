#include "formidex/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace formidex {

std::size_t worker_count(std::size_t n_items) {
  if (n_items == 0) return 1;
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FORMIDEX_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) cap = static_cast<std::size_t>(v);
    } catch (...) {
      // ignore malformed values
    }
  }
  return std::min(cap, n_items);
}

}  // namespace formidex
