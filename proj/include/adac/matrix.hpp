#pragma once

#include <cstddef>
#include <vector>

namespace adac {

// Dense row-major matrix of doubles. Row vectors are 1 x n.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), a(r * c, fill) {}

  static Matrix from_row(const std::vector<double>& v) {
    Matrix m(1, v.size());
    m.a = v;
    return m;
  }

  double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

  double* row(std::size_t r) { return a.data() + r * cols; }
  const double* row(std::size_t r) const { return a.data() + r * cols; }

  std::size_t size() const { return a.size(); }
  void fill(double v) { std::fill(a.begin(), a.end(), v); }
};

}  // namespace adac
