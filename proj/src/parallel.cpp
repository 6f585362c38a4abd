#include "mdbg/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace mdbg {

unsigned thread_count(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MDBG_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      // Unparseable values leave the count alone.
    }
  }
  return n;
}

}  // namespace mdbg
