#pragma once

#include <cstdint>

#include "isacbb/box.hpp"
#include "isacbb/mer_solver.hpp"

namespace isacbb {

/// A live subproblem: SINR box, its relaxation and lower bound.
struct BnbNode {
  Box box;
  RelaxationSolution relaxation;
  double lower_bound = 0.0;
  int depth = 1;
  std::int64_t id = 0;
  std::int64_t parent = -1;
};

}  // namespace isacbb
