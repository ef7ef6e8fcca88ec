#pragma once

#include <cstddef>
#include <vector>

namespace isacbb {

/// Rectangle of per-user SINR intervals prod_k [lo_k, hi_k].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int size() const noexcept { return static_cast<int>(lo.size()); }
  double width(int k) const { return hi.at(k) - lo.at(k); }
  bool contains(const std::vector<double>& gamma, double tol = 0.0) const;
  bool contains(const Box& inner) const;
  double volume() const;
  /// Throws kInvalidArgument unless 0 <= lo_k <= hi_k and sizes agree.
  void validate() const;
};

}  // namespace isacbb
