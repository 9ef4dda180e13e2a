// AVX2+FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime cpuid check (see dispatch.cpp).

#include <immintrin.h>

#include "adac/kernels.hpp"

namespace adac::kernels {
namespace {

// 4x16 register-blocked microkernel: 4 rows of A against 16 columns of B,
// accumulated in 16 ymm registers across the full k extent.
void mm_block_4x16(const double* A, const double* B, double* C, std::size_t k,
                   std::size_t n, std::size_t i, std::size_t j, bool acc) {
  __m256d c[4][4];
  for (int r = 0; r < 4; ++r)
    for (int v = 0; v < 4; ++v)
      c[r][v] = acc ? _mm256_loadu_pd(C + (i + r) * n + j + 4 * v)
                    : _mm256_setzero_pd();
  for (std::size_t p = 0; p < k; ++p) {
    const double* b = B + p * n + j;
    const __m256d b0 = _mm256_loadu_pd(b);
    const __m256d b1 = _mm256_loadu_pd(b + 4);
    const __m256d b2 = _mm256_loadu_pd(b + 8);
    const __m256d b3 = _mm256_loadu_pd(b + 12);
    for (int r = 0; r < 4; ++r) {
      const __m256d a = _mm256_set1_pd(A[(i + r) * k + p]);
      c[r][0] = _mm256_fmadd_pd(a, b0, c[r][0]);
      c[r][1] = _mm256_fmadd_pd(a, b1, c[r][1]);
      c[r][2] = _mm256_fmadd_pd(a, b2, c[r][2]);
      c[r][3] = _mm256_fmadd_pd(a, b3, c[r][3]);
    }
  }
  for (int r = 0; r < 4; ++r)
    for (int v = 0; v < 4; ++v)
      _mm256_storeu_pd(C + (i + r) * n + j + 4 * v, c[r][v]);
}

// Rows i..i+rows against one 4-wide column strip.
void mm_block_rx4(const double* A, const double* B, double* C, std::size_t k,
                  std::size_t n, std::size_t i, std::size_t rows,
                  std::size_t j, bool acc) {
  for (std::size_t r = 0; r < rows; ++r) {
    __m256d c0 = acc ? _mm256_loadu_pd(C + (i + r) * n + j) : _mm256_setzero_pd();
    const double* a = A + (i + r) * k;
    for (std::size_t p = 0; p < k; ++p)
      c0 = _mm256_fmadd_pd(_mm256_set1_pd(a[p]), _mm256_loadu_pd(B + p * n + j), c0);
    _mm256_storeu_pd(C + (i + r) * n + j, c0);
  }
}

void v_matmul_nn(const double* A, const double* B, double* C, std::size_t m,
                 std::size_t k, std::size_t n, bool acc) {
  const std::size_t n16 = n - n % 16;
  const std::size_t n4 = n - n % 4;
  const std::size_t m4 = m - m % 4;
  for (std::size_t i = 0; i < m4; i += 4) {
    for (std::size_t j = 0; j < n16; j += 16) mm_block_4x16(A, B, C, k, n, i, j, acc);
    for (std::size_t j = n16; j < n4; j += 4) mm_block_rx4(A, B, C, k, n, i, 4, j, acc);
    for (std::size_t j = n4; j < n; ++j)
      for (std::size_t r = 0; r < 4; ++r) {
        double s = acc ? C[(i + r) * n + j] : 0.0;
        for (std::size_t p = 0; p < k; ++p) s += A[(i + r) * k + p] * B[p * n + j];
        C[(i + r) * n + j] = s;
      }
  }
  for (std::size_t i = m4; i < m; ++i) {
    for (std::size_t j = 0; j < n4; j += 4) mm_block_rx4(A, B, C, k, n, i, 1, j, acc);
    for (std::size_t j = n4; j < n; ++j) {
      double s = acc ? C[i * n + j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) s += A[i * k + p] * B[p * n + j];
      C[i * n + j] = s;
    }
  }
}

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void v_matmul_nt(const double* A, const double* B, double* C, std::size_t m,
                 std::size_t k, std::size_t n, bool acc) {
  const std::size_t k4 = k - k % 4;
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* b = B + j * k;
      __m256d acc0 = _mm256_setzero_pd();
      __m256d acc1 = _mm256_setzero_pd();
      std::size_t p = 0;
      for (; p + 8 <= k; p += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p), _mm256_loadu_pd(b + p), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p + 4), _mm256_loadu_pd(b + p + 4), acc1);
      }
      for (; p < k4; p += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p), _mm256_loadu_pd(b + p), acc0);
      double s = hsum(_mm256_add_pd(acc0, acc1));
      for (; p < k; ++p) s += a[p] * b[p];
      C[i * n + j] = acc ? C[i * n + j] + s : s;
    }
  }
}

void v_matmul_tn(const double* A, const double* B, double* C, std::size_t m,
                 std::size_t k, std::size_t n, bool acc) {
  if (!acc)
    for (std::size_t q = 0; q < m * n; ++q) C[q] = 0.0;
  const std::size_t n4 = n - n % 4;
  for (std::size_t p = 0; p < k; ++p) {
    const double* a = A + p * m;
    const double* b = B + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const __m256d av = _mm256_set1_pd(a[i]);
      double* c = C + i * n;
      std::size_t j = 0;
      for (; j < n4; j += 4)
        _mm256_storeu_pd(c + j, _mm256_fmadd_pd(av, _mm256_loadu_pd(b + j),
                                                _mm256_loadu_pd(c + j)));
      for (; j < n; ++j) c[j] += a[i] * b[j];
    }
  }
}

void v_add(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void v_sub(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void v_mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void v_madd(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                                              _mm256_loadu_pd(out + i)));
  for (; i < n; ++i) out[i] += a[i] * b[i];
}

void v_scale(const double* a, double alpha, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(a + i)));
  for (; i < n; ++i) out[i] = alpha * a[i];
}

void v_axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void v_relu(const double* x, double* out, std::size_t n) {
  const __m256d z = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_max_pd(z, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void v_relu_bwd(const double* x, const double* dy, double* dx, std::size_t n) {
  const __m256d z = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), z, _CMP_GT_OQ);
    const __m256d g = _mm256_and_pd(mask, _mm256_loadu_pd(dy + i));
    _mm256_storeu_pd(dx + i, _mm256_add_pd(_mm256_loadu_pd(dx + i), g));
  }
  for (; i < n; ++i)
    if (x[i] > 0.0) dx[i] += dy[i];
}

double v_sum(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

}  // namespace

const Table& avx2_table() {
  static const Table t = {v_matmul_nn, v_matmul_nt, v_matmul_tn,
                          v_add,       v_sub,       v_mul,
                          v_madd,      v_scale,     v_axpy,
                          v_relu,      v_relu_bwd,  v_sum,
                          "avx2"};
  return t;
}

}  // namespace adac::kernels
