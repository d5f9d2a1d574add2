#include "coiso/shake_rattle.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <sstream>

namespace coiso {

namespace {

// Central differences of F along each coordinate of x.
Mat jacobian_central(const VecFn& F, const Vec& x, Eigen::Index rows) {
  Mat J(rows, x.size());
  Vec probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = cbrt_eps() * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + step;
    const Vec fp = F(probe);
    probe[j] = x[j] - step;
    const Vec fm = F(probe);
    probe[j] = x[j];
    J.col(j) = (fp - fm) / (2.0 * step);
  }
  return J;
}

void require_nondegenerate(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z,
                           const NewtonConfig& cfg, const char* who) {
  const double rel = relative_nondegeneracy(sys, cs, z);
  if (rel <= cfg.nondegeneracyFloor) {
    std::ostringstream os;
    os << who << ": nondegeneracy matrix is singular at the current point (relative sigma_min " << rel
       << "); H restricted to the fiber has a degenerate critical point, see nondegeneracy_matrix";
    throw Error(ErrorKind::SingularJacobian, os.str());
  }
}

NewtonResult solve_launch(const VecFn& F, const Vec& seed, double h, const NewtonConfig& cfg) {
  NewtonConfig c = cfg;
  c.tol = cfg.tol / std::abs(h);
  const Eigen::Index m = seed.size();
  JacFn jac = [&](const Vec& mu) { return jacobian_central(F, mu, m); };
  return newton_solve(F, seed, jac, c);
}

// One-constraint fallback for project_to_hidden when Newton cannot start from
// σ = 0: walk outward along the fiber to the nearest sign change of ρ and
// bracket it.
std::optional<double> nearest_fiber_root(const std::function<double(double)>& r, double tol) {
  constexpr double kStep = 1.0 / 256.0;
  constexpr int kMaxSteps = 2048;
  const double r0 = r(0.0);
  double prevPos = r0;
  double prevNeg = r0;
  for (int k = 1; k <= kMaxSteps; ++k) {
    for (const double sgn : {1.0, -1.0}) {
      const double a = sgn * (k - 1) * kStep;
      const double b = sgn * k * kStep;
      double& prev = sgn > 0 ? prevPos : prevNeg;
      const double rb = r(b);
      if (rb == 0.0) return b;
      if ((prev < 0.0) != (rb < 0.0)) {
        std::uintmax_t iters = 200;
        auto [lo, hi] = boost::math::tools::toms748_solve(
            r, std::min(a, b), std::max(a, b), a < b ? prev : rb, a < b ? rb : prev,
            [tol](double x, double y) { return std::abs(x - y) <= tol; }, iters);
        return 0.5 * (lo + hi);
      }
      prev = rb;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view mode_name(Mode mode) { return mode == Mode::Shake ? "shake" : "rattle"; }

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "shake") return Mode::Shake;
  if (name == "rattle") return Mode::Rattle;
  return std::nullopt;
}

LaunchResult launch(const HamiltonianSystem& sys, const ConstraintSet& cs, const OneStepMethod& method,
                    double h, const PhasePoint& z, const NewtonConfig& cfg) {
  if (h == 0.0 || !std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, "launch: h must be finite and nonzero");
  require_nondegenerate(sys, cs, z, cfg, "launch");

  auto residual_at = [&](double hh) -> VecFn {
    return [&, hh](const Vec& mu) -> Vec {
      return cs.value(method(sys, hh, fiber_map(cs, mu, z), cfg)) / hh;
    };
  };
  const double cap = cfg.spuriousFactor * std::abs(h) * (1.0 + max_abs(hamiltonian_vector_field(sys, z).vec()));

  const VecFn F = residual_at(h);
  NewtonResult res = solve_launch(F, Vec::Zero(cs.m), h, cfg);
  if (max_abs(res.x) > cap) {
    // Continue from the half-step root, whose fiber displacement is about half as large.
    const NewtonResult half = solve_launch(residual_at(0.5 * h), Vec::Zero(cs.m), 0.5 * h, cfg);
    res = solve_launch(F, 2.0 * half.x, h, cfg);
    if (max_abs(res.x) > cap) {
      std::ostringstream os;
      os << "launch: spurious root rejected (|mu| = " << max_abs(res.x) << " exceeds cap " << cap << ")";
      throw Error(ErrorKind::NonConvergence, os.str());
    }
  }

  LaunchResult out{res.x, fiber_map(cs, res.x, z), z, res.iterations};
  out.landing = method(sys, h, out.zPlus, cfg);
  return out;
}

StepRecord shake_step(const HamiltonianSystem& sys, const ConstraintSet& cs, const OneStepMethod& method,
                      double h, const PhasePoint& z, const NewtonConfig& cfg) {
  LaunchResult l = launch(sys, cs, method, h, z, cfg);
  StepRecord rec;
  rec.zMinus = std::move(l.landing);
  rec.lambda = std::move(l.mu);
  rec.sigma = Vec::Zero(cs.m);
  rec.gResidual = max_abs(cs.value(rec.zMinus));
  rec.rhoResidual = max_abs(hidden_residual(sys, cs, rec.zMinus));
  rec.energy = sys.H(rec.zMinus);
  return rec;
}

Projection project_to_hidden(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z,
                             const NewtonConfig& cfg) {
  if (max_abs(hidden_residual(sys, cs, z)) <= cfg.tol) return {Vec::Zero(cs.m), z, 0};

  const VecFn F = [&](const Vec& sigma) -> Vec { return hidden_residual(sys, cs, fiber_map(cs, sigma, z)); };
  const double rel = relative_nondegeneracy(sys, cs, z);
  if (rel > cfg.nondegeneracyFloor) {
    try {
      JacFn jac = [&](const Vec& s) { return jacobian_central(F, s, cs.m); };
      const NewtonResult res = newton_solve(F, Vec::Zero(cs.m), jac, cfg);
      return {res.x, fiber_map(cs, res.x, z), res.iterations};
    } catch (const Error& e) {
      if (cs.m != 1 || (e.kind() != ErrorKind::NonConvergence && e.kind() != ErrorKind::SingularJacobian)) throw;
    }
  } else if (cs.m != 1) {
    require_nondegenerate(sys, cs, z, cfg, "project_to_hidden");
  }

  // m = 1: bracket the nearest root of ρ along the fiber and polish it with Newton.
  auto r = [&](double s) { return F(Vec::Constant(1, s))[0]; };
  const std::optional<double> root = nearest_fiber_root(r, 1e-15);
  if (!root) {
    throw Error(ErrorKind::SingularJacobian,
                "project_to_hidden: hidden residual has no sign change along the fiber; H restricted to the "
                "fiber has no nondegenerate critical point nearby, see nondegeneracy_matrix");
  }
  Vec sigma = Vec::Constant(1, *root);
  int iterations = 0;
  if (std::abs(r(*root)) > cfg.tol) {
    JacFn jac = [&](const Vec& s) { return jacobian_central(F, s, 1); };
    const NewtonResult res = newton_solve(F, sigma, jac, cfg);
    sigma = res.x;
    iterations = res.iterations;
  }
  return {sigma, fiber_map(cs, sigma, z), iterations};
}

PhasePoint carry_to_Mp(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z,
                       const NewtonConfig& cfg) {
  return project_to_hidden(sys, cs, project_onto_M(cs, z, cfg), cfg).zProj;
}

StepRecord rattle_step(const HamiltonianSystem& sys, const ConstraintSet& cs, const OneStepMethod& method,
                       double h, const PhasePoint& z, const NewtonConfig& cfg) {
  StepRecord rec = shake_step(sys, cs, method, h, z, cfg);
  Projection p = project_to_hidden(sys, cs, rec.zMinus, cfg);
  rec.sigma = std::move(p.sigma);
  rec.z = std::move(p.zProj);
  rec.gResidual = max_abs(cs.value(*rec.z));
  rec.rhoResidual = max_abs(hidden_residual(sys, cs, *rec.z));
  rec.energy = sys.H(*rec.z);
  return rec;
}

Trajectory integrate(const HamiltonianSystem& sys, const ConstraintSet& cs, const OneStepMethod& method,
                     Mode mode, double h, std::size_t steps, const PhasePoint& z0, const NewtonConfig& cfg,
                     const IntegrateOptions& opts) {
  if (z0.dim() != sys.d || cs.d != sys.d) {
    throw Error(ErrorKind::DimensionMismatch, "integrate: system, constraints and z0 disagree on d");
  }
  if (h == 0.0 || !std::isfinite(h)) throw StepFailed(0, ErrorKind::InvalidArgument, "integrate: h must be nonzero");
  cfg.validate();

  Trajectory traj;
  traj.h = h;
  traj.mode = mode;
  traj.method = method.name;
  if (!cs.has_exact_fiber()) {
    traj.warnings.emplace_back(
        "fiber flow evaluated numerically; symplecticity holds only to the integration tolerance");
  }

  // Initial data hygiene.
  PhasePoint start = z0;
  const double g0 = max_abs(cs.value(z0));
  const double r0 = max_abs(hidden_residual(sys, cs, z0));
  const double off = mode == Mode::Rattle ? std::max(g0, r0) : g0;
  const double exactTol = mode == Mode::Rattle ? std::max(opts.membership.g, opts.membership.rho)
                                               : opts.membership.g;
  if (off > exactTol) {
    if (off > opts.autoProjectTol) {
      std::ostringstream os;
      os << "integrate: initial point is " << off << " away from " << (mode == Mode::Rattle ? "Mp" : "M")
         << " (auto-projection limit " << opts.autoProjectTol << ")";
      throw StepFailed(0, ErrorKind::InvalidInitialData, os.str());
    }
    try {
      start = project_onto_M(cs, z0, cfg);
      if (mode == Mode::Rattle) start = project_to_hidden(sys, cs, start, cfg).zProj;
    } catch (const Error& e) {
      throw StepFailed(0, e.kind(), std::string("integrate: auto-projection of z0 failed: ") + e.what());
    }
    traj.warnings.emplace_back("initial point auto-projected");
  }

  StepRecord first;
  first.index = 0;
  first.zMinus = start;
  if (mode == Mode::Rattle) first.z = start;
  first.lambda = Vec::Zero(cs.m);
  first.sigma = Vec::Zero(cs.m);
  first.gResidual = max_abs(cs.value(start));
  first.rhoResidual = max_abs(hidden_residual(sys, cs, start));
  first.energy = sys.H(start);
  traj.records.reserve(steps + 1);
  traj.records.push_back(std::move(first));

  for (std::size_t k = 1; k <= steps; ++k) {
    const PhasePoint& z = traj.records.back().output();
    try {
      StepRecord rec = mode == Mode::Rattle ? rattle_step(sys, cs, method, h, z, cfg)
                                            : shake_step(sys, cs, method, h, z, cfg);
      rec.index = k;
      traj.records.push_back(std::move(rec));
    } catch (const StepFailed&) {
      throw;
    } catch (const Error& e) {
      throw StepFailed(k, e.kind(), "step " + std::to_string(k) + ": " + e.what());
    }
  }
  return traj;
}

}  // namespace coiso
