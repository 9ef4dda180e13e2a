#include "adac/replay.hpp"

#include <stdexcept>

namespace adac {

void ReplayBuffer::add(Transition t) {
  if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

Matrix ReplayBuffer::recent_states(std::size_t n) const {
  n = std::min(n, items_.size());
  Matrix out(n, n > 0 ? items_[0].s.size() : 0);
  // Walk backwards from the most recently written slot.
  std::size_t idx = (next_ + items_.size() - 1) % items_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = items_[(idx + items_.size() - k) % items_.size()].s;
    double* row = out.row(n - 1 - k);
    for (std::size_t c = 0; c < s.size(); ++c) row[c] = s[c];
  }
  return out;
}

void ReplayBuffer::sample(std::size_t batch, Rng& rng, Batch* out) const {
  if (items_.empty()) throw std::logic_error("ReplayBuffer: sample from empty buffer");
  const std::size_t sdim = items_[0].s.size();
  const std::size_t adim = items_[0].a.size();
  out->s = Matrix(batch, sdim);
  out->a = Matrix(batch, adim);
  out->s2 = Matrix(batch, sdim);
  out->r.resize(batch);
  out->r_in.resize(batch);
  out->not_done.resize(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const Transition& t = items_[rng.below(items_.size())];
    for (std::size_t c = 0; c < sdim; ++c) {
      out->s(i, c) = t.s[c];
      out->s2(i, c) = t.s2[c];
    }
    for (std::size_t c = 0; c < adim; ++c) out->a(i, c) = t.a[c];
    out->r[i] = t.r;
    out->r_in[i] = t.r_in;
    out->not_done[i] = t.done ? 0.0 : 1.0;
  }
}

}  // namespace adac
