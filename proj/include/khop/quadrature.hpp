#pragma once

#include "khop/box_integral.hpp"

#include <functional>
#include <span>

namespace khop {

using PointFunction = std::function<double(std::span<const double>)>;

// Midpoint rule over prod_j [0, caps[j]], doubling the grid until the relative
// change drops below 1e-4 or the evaluation budget runs out. At most 4 dimensions.
double quadrature(const PointFunction& f, std::span<const double> caps, int grid = 8);

// Numeric view of a chamber evaluator: sorts the point, picks the chamber
// polynomial and evaluates it at u_1..u_l.
PointFunction chamber_function(const ChamberEvaluator& integrand, std::size_t blocks);

}  // namespace khop
