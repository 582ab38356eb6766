#pragma once

#include "khop/hop_moments.hpp"
#include "khop/quadrature.hpp"

#include <span>
#include <vector>

namespace khop {

// Sum over (k-1)-tuples of partitions of {1..n}: level-l block variables carry
// weight lambda_l and cap min tau of the block, chained z^1 < ... < z^{k-1}
// along every index. Arguments are tau1 <= ... <= taun. n <= 3, k <= 4.
MultiPoly moment_via_partitions(int k, int n);

// m_{k+1,n} from the written-out low-order expansions over level-k moments.
// taus ascending; n in {1,2,3}, or n = 4 with all taus equal.
MultiPoly explicit_moment_step(MomentEngine& engine, int k, std::span<const Var> taus);

// c_{k+1,n} from the written-out expansions, evaluating cumulants of powers through
// level-k moments. n in {2,3}, or n = 4 with all taus equal.
MultiPoly explicit_cumulant_step(MomentEngine& engine, int k, std::span<const Var> taus);

}  // namespace khop
