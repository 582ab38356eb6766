#pragma once

#include "khop/poly.hpp"

#include <functional>
#include <span>

namespace khop {

struct BoxBlock {
  int multiplicity = 1;
  Var cap;
};

// order[r] is the block whose variable is the r-th smallest.
using ChamberEvaluator = std::function<MultiPoly(std::span<const int> order)>;

// Integral of a chamber-wise polynomial over prod_j [0, cap_j]. Block j owns the
// bound variable u_{j+1}; the evaluator must return a polynomial in those.
MultiPoly box_integral(std::span<const BoxBlock> blocks, const ChamberEvaluator& integrand);

}  // namespace khop
