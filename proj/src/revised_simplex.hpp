#pragma once

// Phase-one primal simplex in revised form: a sparse LU of the basis plus a
// product-form eta file, refactorized periodically. Double precision only; the
// dense tableau in simplex.hpp is the fallback and the exact path.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "simplex.hpp"

namespace turnpike::detail {

LpRun<double> revised_phase_one(const StandardLp<double>& lp, const Tolerances<double>& tol,
                                PivotRule rule, std::int64_t iteration_limit);

}  // namespace turnpike::detail
