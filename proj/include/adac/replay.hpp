#pragma once

#include <cstddef>
#include <vector>

#include "adac/matrix.hpp"
#include "adac/rng.hpp"

namespace adac {

struct Transition {
  std::vector<double> s;
  std::vector<double> a;
  double r = 0.0;
  double r_in = 0.0;  // intrinsic bonus, always >= 0
  std::vector<double> s2;
  bool done = false;  // physics termination; truncation bootstraps normally
};

struct Batch {
  Matrix s, a, s2;
  std::vector<double> r, r_in;
  std::vector<double> not_done;  // 1 - done, as bootstrap mask
};

// Fixed-capacity ring buffer with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void add(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return items_[i]; }

  // Most recent n stored states, oldest first.
  Matrix recent_states(std::size_t n) const;

  void sample(std::size_t batch, Rng& rng, Batch* out) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

}  // namespace adac
