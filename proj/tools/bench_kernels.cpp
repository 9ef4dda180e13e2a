// Quick matmul throughput check for sizing experiment configs.

#include <chrono>
#include <cstdio>
#include <vector>

#include "adac/kernels.hpp"
#include "adac/rng.hpp"

int main() {
  using namespace adac;
  const auto& K = kernels::active();
  std::printf("active kernel table: %s\n", K.name);

  Rng rng(0);
  struct Case {
    std::size_t m, k, n;
  };
  const Case cases[] = {{512, 20, 256}, {512, 256, 256}, {64, 256, 256},
                        {256, 256, 512}, {64, 5, 256}};
  for (const auto& c : cases) {
    std::vector<double> A(c.m * c.k), B(c.k * c.n), C(c.m * c.n);
    for (auto& v : A) v = rng.uniform(-1, 1);
    for (auto& v : B) v = rng.uniform(-1, 1);
    const int reps = static_cast<int>(2e9 / (2.0 * c.m * c.k * c.n)) + 1;
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r)
      K.matmul_nn(A.data(), B.data(), C.data(), c.m, c.k, c.n, false);
    const auto t1 = std::chrono::steady_clock::now();
    const double sec = std::chrono::duration<double>(t1 - t0).count();
    const double gflops = 2.0 * c.m * c.k * c.n * reps / sec / 1e9;
    std::printf("matmul_nn %4zu x %3zu x %3zu: %6.2f GFLOP/s (%d reps, %.3fs)\n",
                c.m, c.k, c.n, gflops, reps, sec);
  }
  return 0;
}
