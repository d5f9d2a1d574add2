#pragma once

#include "coiso/constraints.hpp"

namespace coiso {

/// Φ(λ, z) = exp(Σ λ_i X_{g_i})(z). Uses the exact flow when the constraint
/// set provides one and fiber_map_numeric otherwise.
PhasePoint fiber_map(const ConstraintSet& cs, const Vec& lambda, const PhasePoint& z);

/// Integrates ż = Σ λ_i X_{g_i}(z) over unit time with an adaptive
/// Dormand–Prince 5(4) pair. Throws StepSizeUnderflow when the controller
/// cannot make progress and NonFinite when the state blows up.
PhasePoint fiber_map_numeric(const ConstraintSet& cs, const Vec& lambda, const PhasePoint& z,
                             double tol = 1e-13);

}  // namespace coiso
