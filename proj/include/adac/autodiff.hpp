#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "adac/matrix.hpp"

namespace adac::ad {

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A long-lived value: network parameters and other leaves. Gradients
// accumulate into `grad` across backward calls until zero_grad().
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;
  bool requires_grad = false;

  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, bool requires = true)
      : shape{rows, cols}, data(rows * cols, 0.0), requires_grad(requires) {
    if (requires) grad.assign(rows * cols, 0.0);
  }

  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  std::size_t numel() const { return data.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

class Graph;

// Handle to a node in a Graph. Cheap to copy; invalidated by Graph::clear().
struct Var {
  Graph* g = nullptr;
  int id = -1;

  std::size_t rows() const;
  std::size_t cols() const;
  const double* data() const;
  Matrix value() const;
};

// Dynamic tape over dense 2-D arrays. Nodes are stored in insertion order,
// which is also the topological order; backward walks it in reverse.
class Graph {
 public:
  Var param(Tensor& t);
  Var constant(const Matrix& m);
  Var constant(std::size_t rows, std::size_t cols, const double* data);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);           // same shape
  Var sub(Var a, Var b);           // same shape
  Var mul(Var a, Var b);           // elementwise, same shape
  Var squared_diff(Var a, Var b);  // (a - b)^2 elementwise
  Var add_bias(Var x, Var b);      // (m x n) + (1 x n), broadcast over rows
  Var mul_row(Var x, Var r);       // (m x n) * (1 x n), broadcast over rows
  Var scale(Var a, double alpha);
  Var tanh(Var a);
  Var relu(Var a);
  Var exp(Var a);
  Var sum(Var a);   // 1 x 1
  Var mean(Var a);  // 1 x 1
  Var concat_cols(Var a, Var b);

  // Reverse pass from a scalar loss; accumulates into parameter grads.
  void backward(Var loss);

  // Reverse pass seeded with an explicit cotangent (same shape as `out`);
  // accumulates into parameter grads.
  void backward_seeded(Var out, const Matrix& seed);

  // d sum(out) / d in, evaluated without touching any parameter grad.
  Matrix grad_wrt_input(Var out, Var in);

  void clear();
  std::size_t size() const { return nodes_.size(); }

 private:
  friend struct Var;

  enum class Op {
    kParam, kConst, kMatMul, kAdd, kSub, kMul, kSqDiff, kAddBias, kMulRow,
    kScale, kTanh, kRelu, kExp, kSum, kMean, kConcat
  };

  struct Node {
    Op op;
    int p0 = -1, p1 = -1;
    std::size_t rows = 0, cols = 0;
    std::vector<double> val;   // unused for kParam (backed by the Tensor)
    std::vector<double> grad;  // allocated during a reverse pass
    Tensor* tensor = nullptr;  // kParam only
    double alpha = 0.0;        // kScale payload

    std::size_t numel() const { return rows * cols; }
    const double* data() const { return tensor ? tensor->data.data() : val.data(); }
  };

  int push(Node n);
  Var make(Op op, std::size_t rows, std::size_t cols, int p0, int p1 = -1);
  const Node& at(int id) const { return nodes_[id]; }
  void check_same_shape(const char* prim, Var a, Var b) const;

  // Core VJP. target < 0 propagates into parameters, otherwise only along
  // paths reaching `target` (parameter grads untouched).
  void run_backward(int root, const double* seed, int target);

  std::vector<Node> nodes_;
};

}  // namespace adac::ad
