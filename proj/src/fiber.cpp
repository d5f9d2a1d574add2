#include "coiso/fiber.hpp"

#include <boost/numeric/odeint.hpp>

#include <vector>

namespace coiso {

namespace {

using State = std::vector<double>;

void require_lambda(const ConstraintSet& cs, const Vec& lambda) {
  if (lambda.size() != cs.m) {
    throw Error(ErrorKind::DimensionMismatch, "fiber parameter has length " + std::to_string(lambda.size()) +
                                                  ", expected " + std::to_string(cs.m));
  }
}

}  // namespace

PhasePoint fiber_map(const ConstraintSet& cs, const Vec& lambda, const PhasePoint& z) {
  require_lambda(cs, lambda);
  if (cs.fiberFlow) return (*cs.fiberFlow)(lambda, z);
  return fiber_map_numeric(cs, lambda, z);
}

PhasePoint fiber_map_numeric(const ConstraintSet& cs, const Vec& lambda, const PhasePoint& z, double tol) {
  namespace odeint = boost::numeric::odeint;
  require_lambda(cs, lambda);
  if (max_abs(lambda) == 0.0) return z;

  const Eigen::Index n = z.vec().size();
  auto rhs = [&](const State& x, State& dxdt, double /*t*/) {
    const Eigen::Map<const Vec> xv(x.data(), n);
    if (!xv.allFinite()) throw Error(ErrorKind::NonFinite, "fiber_map_numeric: state became non-finite");
    const Vec v = cs.fields(PhasePoint(Vec(xv))) * lambda;
    dxdt.assign(v.data(), v.data() + n);
  };

  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol);
  State x(z.vec().data(), z.vec().data() + n);
  double t = 0.0;
  double dt = 0.1;
  constexpr double kEnd = 1.0;
  constexpr int kMaxSteps = 100000;
  for (int step = 0; t < kEnd; ++step) {
    if (step >= kMaxSteps) {
      throw Error(ErrorKind::StepSizeUnderflow, "fiber_map_numeric: step budget exhausted");
    }
    dt = std::min(dt, kEnd - t);
    if (dt < 1e-14) {
      throw Error(ErrorKind::StepSizeUnderflow, "fiber_map_numeric: step size underflow");
    }
    const double t_before = t;
    if (stepper.try_step(rhs, x, t, dt) == odeint::success && t == t_before) {
      throw Error(ErrorKind::StepSizeUnderflow, "fiber_map_numeric: no progress");
    }
    // The controller grows dt after an accepted step; snap to the endpoint.
    if (kEnd - t < 1e-12) t = kEnd;
  }
  return PhasePoint(Vec(Eigen::Map<const Vec>(x.data(), n)));
}

}  // namespace coiso
