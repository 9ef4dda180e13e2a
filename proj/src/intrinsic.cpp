#include "adac/intrinsic.hpp"

#include <cmath>
#include <stdexcept>

namespace adac {

CountIntrinsic::CountIntrinsic(std::vector<std::pair<double, double>> obs_ranges,
                               double kappa)
    : ranges_(std::move(obs_ranges)), kappa_(kappa) {
  if (kappa_ < 0.0) throw std::invalid_argument("CountIntrinsic: kappa must be >= 0");
}

std::uint64_t CountIntrinsic::cell(const std::vector<double>& obs) const {
  if (obs.size() != ranges_.size())
    throw std::invalid_argument("CountIntrinsic: observation dim mismatch");
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto [lo, hi] = ranges_[i];
    double frac = (obs[i] - lo) / (hi - lo);
    if (frac < 0.0) frac = 0.0;
    int bin = static_cast<int>(frac * kBins);
    if (bin >= kBins) bin = kBins - 1;
    key = key * kBins + static_cast<std::uint64_t>(bin);
  }
  return key;
}

std::uint32_t CountIntrinsic::visits(std::uint64_t cell_key) const {
  auto it = counts_.find(cell_key);
  return it == counts_.end() ? 0 : it->second;
}

void CountIntrinsic::update(const Transition& t) { ++counts_[cell(t.s2)]; }

double CountIntrinsic::score(const Transition& t) const {
  const double n = static_cast<double>(visits(cell(t.s2)));
  return kappa_ / std::sqrt(n + 1.0);
}

}  // namespace adac
