#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "adac/kernels.hpp"

namespace adac::kernels {

bool avx2_available() {
#if defined(ADAC_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

#if !defined(ADAC_HAVE_AVX2)
const Table& avx2_table() {
  throw std::runtime_error("kernels: avx2 variant not compiled in");
}
#endif

const Table& active() {
  static const Table* chosen = [] {
    const char* force = std::getenv("ADAC_KERNELS");
    if (force != nullptr) {
      if (std::strcmp(force, "scalar") == 0) return &scalar_table();
      if (std::strcmp(force, "avx2") == 0) {
        if (!avx2_available())
          throw std::runtime_error("ADAC_KERNELS=avx2 but AVX2/FMA unavailable");
        return &avx2_table();
      }
      throw std::runtime_error("ADAC_KERNELS must be 'scalar' or 'avx2'");
    }
    return avx2_available() ? &avx2_table() : &scalar_table();
  }();
  return *chosen;
}

}  // namespace adac::kernels
