#include "bcsl/parallel.hpp"

#include <cstdlib>
#include <string>

#include "bcsl/error.hpp"

namespace bcsl {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const char* env = std::getenv("BCSL_THREADS");
  if (!env || !*env) return 1;
  try {
    std::size_t used = 0;
    int v = std::stoi(env, &used);
    if (used != std::string(env).size() || v < 1) throw std::invalid_argument("range");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string("BCSL_THREADS must be a positive integer, got '") + env + "'");
  }
}

}  // namespace bcsl
