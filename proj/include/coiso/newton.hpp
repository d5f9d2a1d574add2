#pragma once

#include <functional>
#include <optional>

#include "coiso/phase.hpp"

namespace coiso {

struct NewtonConfig {
  double tol = 1e-11;     // residual max-norm
  int maxIter = 50;
  double damping = 1.0;   // initial step fraction in (0, 1]
  double fdScale = 1.4901161193847656e-08;  // sqrt(eps), forward-difference Jacobians
  // Residual tolerance for the implicit stages inside the underlying methods.
  // Kept near roundoff so that outer residuals g∘Ψ_h are smooth in their inputs.
  double innerTol = 1e-14;
  // Condition-number estimate above which the Jacobian counts as singular.
  double maxCondition = 1e14;
  // Relative floor on the smallest singular value of the nondegeneracy matrix
  // before a launch or projection is attempted.
  double nondegeneracyFloor = 1e-10;
  // Launch roots with |μ|∞ > spuriousFactor·|h|·(1 + |X_H(z)|) are rejected.
  double spuriousFactor = 10.0;

  void validate() const;
};

using VecFn = std::function<Vec(const Vec&)>;
using JacFn = std::function<Mat(const Vec&)>;

struct NewtonResult {
  Vec x;
  int iterations = 0;
  double residual = 0.0;
};

/// Damped Newton iteration for F(x) = 0. Without `jac` the Jacobian is built
/// from forward differences with step cfg.fdScale·max(1, |x_j|). The step is
/// halved while the residual increases, down to 1/64 of the nominal step.
NewtonResult newton_solve(const VecFn& F, const Vec& x0, const std::optional<JacFn>& jac,
                          const NewtonConfig& cfg);

/// Forward-difference Jacobian used by newton_solve.
Mat jacobian_fd(const VecFn& F, const Vec& x, const Vec& Fx, double scale);

}  // namespace coiso
