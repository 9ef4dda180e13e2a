#include "adac/nn.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace adac::nn {

void Linear::init(std::size_t in, std::size_t out, Rng& rng, double limit) {
  if (limit <= 0.0) limit = 1.0 / std::sqrt(static_cast<double>(in));
  W = ad::Tensor(in, out);
  b = ad::Tensor(1, out);
  for (auto& w : W.data) w = rng.uniform(-limit, limit);
  for (auto& v : b.data) v = rng.uniform(-limit, limit);
}

ad::Var Linear::forward(ad::Graph& g, ad::Var x) {
  return g.add_bias(g.matmul(x, g.param(W)), g.param(b));
}

namespace {
constexpr double kHeadInitLimit = 3e-3;
}

PolicyNet::PolicyNet(int state_dim, int action_dim, int noise_dim,
                     const std::vector<int>& hidden, const std::vector<double>& low,
                     const std::vector<double>& high, Rng& rng)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      noise_dim_(noise_dim),
      low_(low),
      high_(high) {
  if (static_cast<int>(low.size()) != action_dim ||
      static_cast<int>(high.size()) != action_dim)
    throw std::invalid_argument("PolicyNet: action bounds size mismatch");
  half_ = Matrix(1, action_dim);
  center_ = Matrix(1, action_dim);
  for (int i = 0; i < action_dim; ++i) {
    half_(0, i) = 0.5 * (high[i] - low[i]);
    center_(0, i) = 0.5 * (high[i] + low[i]);
  }
  int in = state_dim + noise_dim;
  layers_.resize(hidden.size() + 1);
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    layers_[l].init(in, hidden[l], rng);
    in = hidden[l];
  }
  layers_.back().init(in, action_dim, rng, kHeadInitLimit);
}

ad::Var PolicyNet::forward(ad::Graph& g, ad::Var states, ad::Var xi) {
  if (static_cast<int>(states.cols()) != state_dim_)
    throw ad::ShapeError("policy_forward: state dim " + std::to_string(states.cols()) +
                         ", expected " + std::to_string(state_dim_));
  ad::Var x = states;
  if (noise_dim_ > 0) {
    if (static_cast<int>(xi.cols()) != noise_dim_ || xi.rows() != states.rows())
      throw ad::ShapeError("policy_forward: xi " + std::to_string(xi.rows()) + "x" +
                           std::to_string(xi.cols()) + ", expected " +
                           std::to_string(states.rows()) + "x" +
                           std::to_string(noise_dim_));
    x = state_dim_ > 0 ? g.concat_cols(states, xi) : xi;
  }
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l)
    x = g.relu(layers_[l].forward(g, x));
  ad::Var head = g.tanh(layers_.back().forward(g, x));
  return g.add_bias(g.mul_row(head, g.constant(half_)), g.constant(center_));
}

ad::Var PolicyNet::forward_det(ad::Graph& g, ad::Var states) {
  if (noise_dim_ == 0) return forward(g, states, states);
  Matrix zeros(states.rows(), noise_dim_);
  return forward(g, states, g.constant(zeros));
}

Matrix PolicyNet::act(const Matrix& states, const Matrix& xi) {
  ad::Graph g;
  return forward(g, g.constant(states), g.constant(xi)).value();
}

Matrix PolicyNet::act_det(const Matrix& states) {
  ad::Graph g;
  return forward_det(g, g.constant(states)).value();
}

std::vector<ad::Tensor*> PolicyNet::params() {
  std::vector<ad::Tensor*> out;
  for (auto& l : layers_) {
    out.push_back(&l.W);
    out.push_back(&l.b);
  }
  return out;
}

void PolicyNet::zero_grad() {
  for (auto* t : params()) t->zero_grad();
}

CriticNet::CriticNet(int state_dim, int action_dim, const std::vector<int>& hidden,
                     Rng& rng)
    : state_dim_(state_dim), action_dim_(action_dim) {
  int in = state_dim + action_dim;
  layers_.resize(hidden.size() + 1);
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    layers_[l].init(in, hidden[l], rng);
    in = hidden[l];
  }
  layers_.back().init(in, 1, rng, kHeadInitLimit);
}

ad::Var CriticNet::forward(ad::Graph& g, ad::Var states, ad::Var actions) {
  if (static_cast<int>(states.cols()) != state_dim_ ||
      static_cast<int>(actions.cols()) != action_dim_ ||
      states.rows() != actions.rows())
    throw ad::ShapeError("critic_forward: states " + std::to_string(states.rows()) +
                         "x" + std::to_string(states.cols()) + " vs actions " +
                         std::to_string(actions.rows()) + "x" +
                         std::to_string(actions.cols()));
  ad::Var x = g.concat_cols(states, actions);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l)
    x = g.relu(layers_[l].forward(g, x));
  return layers_.back().forward(g, x);
}

Matrix CriticNet::value(const Matrix& states, const Matrix& actions) {
  ad::Graph g;
  return forward(g, g.constant(states), g.constant(actions)).value();
}

std::vector<ad::Tensor*> CriticNet::params() {
  std::vector<ad::Tensor*> out;
  for (auto& l : layers_) {
    out.push_back(&l.W);
    out.push_back(&l.b);
  }
  return out;
}

void CriticNet::zero_grad() {
  for (auto* t : params()) t->zero_grad();
}

Adam::Adam(std::vector<ad::Tensor*> params, double lr_) : params_(std::move(params)) {
  lr = lr_;
  m_.resize(params_.size());
  v_.resize(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    m_[i].assign(params_[i]->numel(), 0.0);
    v_[i].assign(params_[i]->numel(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    ad::Tensor& p = *params_[i];
    for (std::size_t q = 0; q < p.numel(); ++q) {
      const double g = p.grad[q];
      m_[i][q] = beta1 * m_[i][q] + (1.0 - beta1) * g;
      v_[i][q] = beta2 * v_[i][q] + (1.0 - beta2) * g * g;
      p.data[q] -= lr * (m_[i][q] / c1) / (std::sqrt(v_[i][q] / c2) + eps);
    }
  }
}

void soft_update(const std::vector<ad::Tensor*>& target,
                 const std::vector<ad::Tensor*>& online, double tau) {
  if (target.size() != online.size())
    throw std::invalid_argument("soft_update: parameter list size mismatch");
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i]->numel() != online[i]->numel())
      throw ad::ShapeError("soft_update: tensor " + std::to_string(i) + " has " +
                           std::to_string(target[i]->numel()) + " elements vs " +
                           std::to_string(online[i]->numel()));
    for (std::size_t q = 0; q < target[i]->numel(); ++q)
      target[i]->data[q] = tau * online[i]->data[q] + (1.0 - tau) * target[i]->data[q];
  }
}

void copy_params(const std::vector<ad::Tensor*>& dst,
                 const std::vector<ad::Tensor*>& src) {
  soft_update(dst, src, 1.0);
}

bool params_equal(const std::vector<ad::Tensor*>& a,
                  const std::vector<ad::Tensor*>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i]->data != b[i]->data) return false;
  return true;
}

void negate_grads(const std::vector<ad::Tensor*>& params) {
  for (auto* t : params)
    for (auto& g : t->grad) g = -g;
}

FreezeGuard::FreezeGuard(std::vector<ad::Tensor*> params) : params_(std::move(params)) {
  saved_.reserve(params_.size());
  for (auto* t : params_) {
    saved_.push_back(t->requires_grad);
    t->requires_grad = false;
  }
}

FreezeGuard::~FreezeGuard() {
  for (std::size_t i = 0; i < params_.size(); ++i)
    params_[i]->requires_grad = saved_[i];
}

void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const ad::Tensor*>>& tensors) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out << "adac-checkpoint v1 " << tensors.size() << "\n";
  char buf[64];
  for (const auto& [name, t] : tensors) {
    out << name << " " << t->rows() << " " << t->cols() << "\n";
    for (std::size_t q = 0; q < t->numel(); ++q) {
      std::snprintf(buf, sizeof buf, "%a", t->data[q]);
      out << buf << (q + 1 == t->numel() ? "" : " ");
    }
    out << "\n";
  }
}

void load_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, ad::Tensor*>>& tensors) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string magic, version;
  std::size_t count = 0;
  in >> magic >> version >> count;
  if (magic != "adac-checkpoint" || version != "v1")
    throw std::runtime_error("bad checkpoint header in " + path);
  if (count != tensors.size())
    throw std::runtime_error("checkpoint has " + std::to_string(count) +
                             " tensors, expected " + std::to_string(tensors.size()));
  for (const auto& [name, t] : tensors) {
    std::string got;
    std::size_t rows = 0, cols = 0;
    in >> got >> rows >> cols;
    if (got != name)
      throw std::runtime_error("checkpoint tensor '" + got + "', expected '" + name + "'");
    if (rows != t->rows() || cols != t->cols())
      throw std::runtime_error("checkpoint tensor '" + name + "' is " +
                               std::to_string(rows) + "x" + std::to_string(cols) +
                               ", expected " + std::to_string(t->rows()) + "x" +
                               std::to_string(t->cols()));
    std::string tok;
    for (std::size_t q = 0; q < t->numel(); ++q) {
      in >> tok;
      t->data[q] = std::strtod(tok.c_str(), nullptr);
    }
  }
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
}

}  // namespace adac::nn
