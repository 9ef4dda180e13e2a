#include "adac/autodiff.hpp"

#include <cmath>
#include <cstring>

#include "adac/kernels.hpp"

namespace adac::ad {

namespace {
std::string shape_str(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}
}  // namespace

std::size_t Var::rows() const { return g->at(id).rows; }
std::size_t Var::cols() const { return g->at(id).cols; }
const double* Var::data() const { return g->at(id).data(); }

Matrix Var::value() const {
  const auto& n = g->at(id);
  Matrix m(n.rows, n.cols);
  std::memcpy(m.a.data(), n.data(), n.numel() * sizeof(double));
  return m;
}

int Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Var Graph::make(Op op, std::size_t rows, std::size_t cols, int p0, int p1) {
  Node n;
  n.op = op;
  n.p0 = p0;
  n.p1 = p1;
  n.rows = rows;
  n.cols = cols;
  n.val.resize(rows * cols);
  return Var{this, push(std::move(n))};
}

void Graph::check_same_shape(const char* prim, Var a, Var b) const {
  const auto& x = at(a.id);
  const auto& y = at(b.id);
  if (x.rows != y.rows || x.cols != y.cols)
    throw ShapeError(std::string(prim) + ": shape mismatch " +
                     shape_str(x.rows, x.cols) + " vs " + shape_str(y.rows, y.cols));
}

Var Graph::param(Tensor& t) {
  Node n;
  n.op = Op::kParam;
  n.rows = t.rows();
  n.cols = t.cols();
  n.tensor = &t;
  return Var{this, push(std::move(n))};
}

Var Graph::constant(const Matrix& m) { return constant(m.rows, m.cols, m.a.data()); }

Var Graph::constant(std::size_t rows, std::size_t cols, const double* data) {
  Node n;
  n.op = Op::kConst;
  n.rows = rows;
  n.cols = cols;
  n.val.assign(data, data + rows * cols);
  return Var{this, push(std::move(n))};
}

Var Graph::matmul(Var a, Var b) {
  const auto& x = at(a.id);
  const auto& y = at(b.id);
  if (x.cols != y.rows)
    throw ShapeError("matmul: shape mismatch " + shape_str(x.rows, x.cols) +
                     " vs " + shape_str(y.rows, y.cols));
  Var out = make(Op::kMatMul, x.rows, y.cols, a.id, b.id);
  kernels::active().matmul_nn(x.data(), y.data(), nodes_[out.id].val.data(),
                              x.rows, x.cols, y.cols, false);
  return out;
}

Var Graph::add(Var a, Var b) {
  check_same_shape("add", a, b);
  Var out = make(Op::kAdd, a.rows(), a.cols(), a.id, b.id);
  kernels::active().add(at(a.id).data(), at(b.id).data(),
                        nodes_[out.id].val.data(), at(a.id).numel());
  return out;
}

Var Graph::sub(Var a, Var b) {
  check_same_shape("sub", a, b);
  Var out = make(Op::kSub, a.rows(), a.cols(), a.id, b.id);
  kernels::active().sub(at(a.id).data(), at(b.id).data(),
                        nodes_[out.id].val.data(), at(a.id).numel());
  return out;
}

Var Graph::mul(Var a, Var b) {
  check_same_shape("mul", a, b);
  Var out = make(Op::kMul, a.rows(), a.cols(), a.id, b.id);
  kernels::active().mul(at(a.id).data(), at(b.id).data(),
                        nodes_[out.id].val.data(), at(a.id).numel());
  return out;
}

Var Graph::squared_diff(Var a, Var b) {
  check_same_shape("squared_diff", a, b);
  Var out = make(Op::kSqDiff, a.rows(), a.cols(), a.id, b.id);
  const double* xa = at(a.id).data();
  const double* xb = at(b.id).data();
  double* o = nodes_[out.id].val.data();
  for (std::size_t i = 0; i < at(a.id).numel(); ++i) {
    const double d = xa[i] - xb[i];
    o[i] = d * d;
  }
  return out;
}

Var Graph::add_bias(Var x, Var b) {
  const auto& xx = at(x.id);
  const auto& bb = at(b.id);
  if (bb.rows != 1 || bb.cols != xx.cols)
    throw ShapeError("add_bias: shape mismatch " + shape_str(xx.rows, xx.cols) +
                     " vs " + shape_str(bb.rows, bb.cols));
  Var out = make(Op::kAddBias, xx.rows, xx.cols, x.id, b.id);
  double* o = nodes_[out.id].val.data();
  for (std::size_t r = 0; r < xx.rows; ++r)
    kernels::active().add(xx.data() + r * xx.cols, bb.data(), o + r * xx.cols, xx.cols);
  return out;
}

Var Graph::mul_row(Var x, Var r) {
  const auto& xx = at(x.id);
  const auto& rr = at(r.id);
  if (rr.rows != 1 || rr.cols != xx.cols)
    throw ShapeError("mul_row: shape mismatch " + shape_str(xx.rows, xx.cols) +
                     " vs " + shape_str(rr.rows, rr.cols));
  Var out = make(Op::kMulRow, xx.rows, xx.cols, x.id, r.id);
  double* o = nodes_[out.id].val.data();
  for (std::size_t row = 0; row < xx.rows; ++row)
    kernels::active().mul(xx.data() + row * xx.cols, rr.data(), o + row * xx.cols, xx.cols);
  return out;
}

Var Graph::scale(Var a, double alpha) {
  Var out = make(Op::kScale, a.rows(), a.cols(), a.id);
  nodes_[out.id].alpha = alpha;
  kernels::active().scale(at(a.id).data(), alpha, nodes_[out.id].val.data(),
                          at(a.id).numel());
  return out;
}

Var Graph::tanh(Var a) {
  Var out = make(Op::kTanh, a.rows(), a.cols(), a.id);
  const double* x = at(a.id).data();
  double* o = nodes_[out.id].val.data();
  for (std::size_t i = 0; i < at(a.id).numel(); ++i) o[i] = std::tanh(x[i]);
  return out;
}

Var Graph::relu(Var a) {
  Var out = make(Op::kRelu, a.rows(), a.cols(), a.id);
  kernels::active().relu(at(a.id).data(), nodes_[out.id].val.data(), at(a.id).numel());
  return out;
}

Var Graph::exp(Var a) {
  Var out = make(Op::kExp, a.rows(), a.cols(), a.id);
  const double* x = at(a.id).data();
  double* o = nodes_[out.id].val.data();
  for (std::size_t i = 0; i < at(a.id).numel(); ++i) o[i] = std::exp(x[i]);
  return out;
}

Var Graph::sum(Var a) {
  Var out = make(Op::kSum, 1, 1, a.id);
  nodes_[out.id].val[0] = kernels::active().sum(at(a.id).data(), at(a.id).numel());
  return out;
}

Var Graph::mean(Var a) {
  Var out = make(Op::kMean, 1, 1, a.id);
  nodes_[out.id].val[0] =
      kernels::active().sum(at(a.id).data(), at(a.id).numel()) /
      static_cast<double>(at(a.id).numel());
  return out;
}

Var Graph::concat_cols(Var a, Var b) {
  const auto& x = at(a.id);
  const auto& y = at(b.id);
  if (x.rows != y.rows)
    throw ShapeError("concat_cols: shape mismatch " + shape_str(x.rows, x.cols) +
                     " vs " + shape_str(y.rows, y.cols));
  Var out = make(Op::kConcat, x.rows, x.cols + y.cols, a.id, b.id);
  double* o = nodes_[out.id].val.data();
  for (std::size_t r = 0; r < x.rows; ++r) {
    std::memcpy(o + r * (x.cols + y.cols), x.data() + r * x.cols, x.cols * sizeof(double));
    std::memcpy(o + r * (x.cols + y.cols) + x.cols, y.data() + r * y.cols,
                y.cols * sizeof(double));
  }
  return out;
}

void Graph::backward(Var loss) {
  const auto& n = at(loss.id);
  if (n.numel() != 1)
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                shape_str(n.rows, n.cols));
  run_backward(loss.id, nullptr, -1);
}

void Graph::backward_seeded(Var out, const Matrix& seed) {
  const auto& n = at(out.id);
  if (seed.rows != n.rows || seed.cols != n.cols)
    throw ShapeError("backward_seeded: shape mismatch " + shape_str(n.rows, n.cols) +
                     " vs " + shape_str(seed.rows, seed.cols));
  run_backward(out.id, seed.a.data(), -1);
}

Matrix Graph::grad_wrt_input(Var out, Var in) {
  if (in.g != this || in.id < 0 || in.id >= static_cast<int>(nodes_.size()))
    throw std::invalid_argument("grad_wrt_input: input is not in this graph");
  run_backward(out.id, nullptr, in.id);
  const auto& n = at(in.id);
  Matrix g(n.rows, n.cols);
  if (!n.grad.empty()) std::memcpy(g.a.data(), n.grad.data(), n.numel() * sizeof(double));
  return g;
}

void Graph::clear() { nodes_.clear(); }

void Graph::run_backward(int root, const double* seed, int target) {
  const auto& K = kernels::active();
  const int count = static_cast<int>(nodes_.size());

  // Propagation mask: when target >= 0, nodes that can reach the target;
  // otherwise nodes that contain a trainable parameter. Parents precede
  // children, so one forward scan suffices.
  std::vector<unsigned char> need(count, 0);
  for (int i = 0; i < count; ++i) {
    const Node& n = nodes_[i];
    if (target >= 0)
      need[i] = (i == target) || (n.p0 >= 0 && need[n.p0]) || (n.p1 >= 0 && need[n.p1]);
    else
      need[i] = (n.op == Op::kParam && n.tensor->requires_grad) ||
                (n.p0 >= 0 && need[n.p0]) || (n.p1 >= 0 && need[n.p1]);
  }
  if (!need[root] && target >= 0)
    throw std::invalid_argument("grad_wrt_input: input does not feed the output");

  for (int i = 0; i <= root; ++i) {
    Node& n = nodes_[i];
    if (need[i] || i == root)
      n.grad.assign(n.numel(), 0.0);
    else
      n.grad.clear();
  }

  if (seed)
    std::memcpy(nodes_[root].grad.data(), seed, nodes_[root].numel() * sizeof(double));
  else
    std::fill(nodes_[root].grad.begin(), nodes_[root].grad.end(), 1.0);

  auto want = [&](int id) { return id >= 0 && need[id]; };

  for (int i = root; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.grad.empty() || (!need[i] && i != root)) continue;
    const double* g = n.grad.data();
    Node* a = n.p0 >= 0 ? &nodes_[n.p0] : nullptr;
    Node* b = n.p1 >= 0 ? &nodes_[n.p1] : nullptr;
    switch (n.op) {
      case Op::kParam:
      case Op::kConst:
        break;
      case Op::kMatMul:
        if (want(n.p0))
          K.matmul_nt(g, b->data(), a->grad.data(), n.rows, n.cols, a->cols, true);
        if (want(n.p1))
          K.matmul_tn(a->data(), g, b->grad.data(), b->rows, n.rows, n.cols, true);
        break;
      case Op::kAdd:
        if (want(n.p0)) K.axpy(1.0, g, a->grad.data(), n.numel());
        if (want(n.p1)) K.axpy(1.0, g, b->grad.data(), n.numel());
        break;
      case Op::kSub:
        if (want(n.p0)) K.axpy(1.0, g, a->grad.data(), n.numel());
        if (want(n.p1)) K.axpy(-1.0, g, b->grad.data(), n.numel());
        break;
      case Op::kMul:
        if (want(n.p0)) K.madd(g, b->data(), a->grad.data(), n.numel());
        if (want(n.p1)) K.madd(g, a->data(), b->grad.data(), n.numel());
        break;
      case Op::kSqDiff: {
        const double* xa = a->data();
        const double* xb = b->data();
        for (std::size_t q = 0; q < n.numel(); ++q) {
          const double d = 2.0 * g[q] * (xa[q] - xb[q]);
          if (want(n.p0)) a->grad[q] += d;
          if (want(n.p1)) b->grad[q] -= d;
        }
        break;
      }
      case Op::kAddBias:
        if (want(n.p0)) K.axpy(1.0, g, a->grad.data(), n.numel());
        if (want(n.p1))
          for (std::size_t r = 0; r < n.rows; ++r)
            K.axpy(1.0, g + r * n.cols, b->grad.data(), n.cols);
        break;
      case Op::kMulRow:
        if (want(n.p0))
          for (std::size_t r = 0; r < n.rows; ++r)
            K.madd(g + r * n.cols, b->data(), a->grad.data() + r * n.cols, n.cols);
        if (want(n.p1))
          for (std::size_t r = 0; r < n.rows; ++r)
            K.madd(g + r * n.cols, a->data() + r * n.cols, b->grad.data(), n.cols);
        break;
      case Op::kScale:
        if (want(n.p0)) K.axpy(n.alpha, g, a->grad.data(), n.numel());
        break;
      case Op::kTanh:
        if (want(n.p0)) {
          const double* y = n.val.data();
          for (std::size_t q = 0; q < n.numel(); ++q)
            a->grad[q] += g[q] * (1.0 - y[q] * y[q]);
        }
        break;
      case Op::kRelu:
        if (want(n.p0)) K.relu_bwd(a->data(), g, a->grad.data(), n.numel());
        break;
      case Op::kExp:
        if (want(n.p0)) K.madd(g, n.val.data(), a->grad.data(), n.numel());
        break;
      case Op::kSum:
        if (want(n.p0)) {
          const double g0 = g[0];
          for (std::size_t q = 0; q < a->numel(); ++q) a->grad[q] += g0;
        }
        break;
      case Op::kMean:
        if (want(n.p0)) {
          const double g0 = g[0] / static_cast<double>(a->numel());
          for (std::size_t q = 0; q < a->numel(); ++q) a->grad[q] += g0;
        }
        break;
      case Op::kConcat:
        for (std::size_t r = 0; r < n.rows; ++r) {
          if (want(n.p0))
            K.axpy(1.0, g + r * n.cols, a->grad.data() + r * a->cols, a->cols);
          if (want(n.p1))
            K.axpy(1.0, g + r * n.cols + a->cols, b->grad.data() + r * b->cols, b->cols);
        }
        break;
    }
  }

  if (target < 0) {
    for (int i = 0; i <= root; ++i) {
      Node& n = nodes_[i];
      if (n.op == Op::kParam && need[i] && !n.grad.empty())
        K.axpy(1.0, n.grad.data(), n.tensor->grad.data(), n.numel());
    }
  }
}

}  // namespace adac::ad
