#pragma once

#include <cstddef>

// Dense inner-loop kernels behind the autodiff engine. Every operation has a
// scalar reference implementation and, on x86-64 with AVX2+FMA, a vectorized
// variant selected once at startup. The two are equivalence-tested: bit-exact
// for elementwise ops, tight-tolerance for reductions and matmul (different
// accumulation order). Transcendentals (tanh, exp) are not dispatched; they
// call libm scalar code on every path.
//
// Set ADAC_KERNELS=scalar or ADAC_KERNELS=avx2 to force a path.

namespace adac::kernels {

struct Table {
  // C (m x n) = A (m x k) * B (k x n); accumulates into C when acc is set.
  void (*matmul_nn)(const double* A, const double* B, double* C, std::size_t m,
                    std::size_t k, std::size_t n, bool acc);
  // C (m x n) = A (m x k) * B^T with B stored n x k.
  void (*matmul_nt)(const double* A, const double* B, double* C, std::size_t m,
                    std::size_t k, std::size_t n, bool acc);
  // C (m x n) = A^T * B with A stored k x m, B stored k x n.
  void (*matmul_tn)(const double* A, const double* B, double* C, std::size_t m,
                    std::size_t k, std::size_t n, bool acc);

  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*madd)(const double* a, const double* b, double* out, std::size_t n);  // out += a*b
  void (*scale)(const double* a, double alpha, double* out, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);  // y += alpha*x
  void (*relu)(const double* x, double* out, std::size_t n);
  void (*relu_bwd)(const double* x, const double* dy, double* dx, std::size_t n);  // dx += dy*(x>0)
  double (*sum)(const double* x, std::size_t n);

  const char* name;
};

const Table& scalar_table();

// Compiled in only on x86-64; check avx2_available() before use.
const Table& avx2_table();
bool avx2_available();

// Active table: forced by ADAC_KERNELS if set, otherwise best available.
const Table& active();

}  // namespace adac::kernels
