#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adac/replay.hpp"

namespace adac {

// Exploration bonus plug-in. Scores must be non-negative so that the
// augmented reward R' = R + R^in satisfies R' >= R. update() is called once
// per stored transition, before score().
class IntrinsicReward {
 public:
  virtual ~IntrinsicReward() = default;
  virtual void update(const Transition& t) = 0;
  virtual double score(const Transition& t) const = 0;
};

class ZeroIntrinsic : public IntrinsicReward {
 public:
  void update(const Transition&) override {}
  double score(const Transition&) const override { return 0.0; }
};

// Count-based bonus kappa / sqrt(N(cell) + 1) over a fixed grid
// discretization of the next observation (10 bins per dimension).
class CountIntrinsic : public IntrinsicReward {
 public:
  CountIntrinsic(std::vector<std::pair<double, double>> obs_ranges, double kappa);

  void update(const Transition& t) override;
  double score(const Transition& t) const override;

  std::uint64_t cell(const std::vector<double>& obs) const;
  std::uint32_t visits(std::uint64_t cell_key) const;

  static constexpr int kBins = 10;

 private:
  std::vector<std::pair<double, double>> ranges_;
  double kappa_;
  std::unordered_map<std::uint64_t, std::uint32_t> counts_;
};

}  // namespace adac
