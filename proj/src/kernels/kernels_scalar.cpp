#include "adac/kernels.hpp"

namespace adac::kernels {
namespace {

void s_matmul_nn(const double* A, const double* B, double* C, std::size_t m,
                 std::size_t k, std::size_t n, bool acc) {
  for (std::size_t i = 0; i < m; ++i) {
    double* c = C + i * n;
    if (!acc)
      for (std::size_t j = 0; j < n; ++j) c[j] = 0.0;
    const double* a = A + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[p];
      const double* b = B + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

void s_matmul_nt(const double* A, const double* B, double* C, std::size_t m,
                 std::size_t k, std::size_t n, bool acc) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * k;
    double* c = C + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* b = B + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[p] * b[p];
      if (acc)
        c[j] += s;
      else
        c[j] = s;
    }
  }
}

void s_matmul_tn(const double* A, const double* B, double* C, std::size_t m,
                 std::size_t k, std::size_t n, bool acc) {
  if (!acc)
    for (std::size_t q = 0; q < m * n; ++q) C[q] = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    const double* a = A + p * m;
    const double* b = B + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = a[i];
      double* c = C + i * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

void s_add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void s_sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void s_mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void s_madd(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += a[i] * b[i];
}

void s_scale(const double* a, double alpha, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = alpha * a[i];
}

void s_axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void s_relu(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void s_relu_bwd(const double* x, const double* dy, double* dx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > 0.0) dx[i] += dy[i];
}

double s_sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

}  // namespace

const Table& scalar_table() {
  static const Table t = {s_matmul_nn, s_matmul_nt, s_matmul_tn,
                          s_add,       s_sub,       s_mul,
                          s_madd,      s_scale,     s_axpy,
                          s_relu,      s_relu_bwd,  s_sum,
                          "scalar"};
  return t;
}

}  // namespace adac::kernels
