#include "coiso/problems.hpp"

#include <cmath>

namespace coiso {

namespace {

Mat rotation(double phi) {
  Mat R(2, 2);
  R << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return R;
}

std::function<bool(const PhasePoint&)> mp_test(const HamiltonianSystem& sys, const ConstraintSet& cs,
                                               double tol) {
  return [sys, cs, tol](const PhasePoint& z) { return on_Mp(sys, cs, z, {tol, tol}); };
}

ConstraintSet hopf_constraint() {
  ConstraintSet cs;
  cs.d = 2;
  cs.m = 1;
  cs.g = [](const PhasePoint& z) { return Vec::Constant(1, z.vec().squaredNorm() - 1.0); };
  cs.jacobian = [](const PhasePoint& z) -> Mat { return 2.0 * z.vec().transpose(); };
  cs.hessians = [](const PhasePoint&) { return std::vector<Mat>{2.0 * Mat::Identity(4, 4)}; };
  cs.fiberFlow = [](const Vec& lambda, const PhasePoint& z) {
    const double c = std::cos(2.0 * lambda[0]);
    const double s = std::sin(2.0 * lambda[0]);
    return PhasePoint(Vec(c * z.q() + s * z.p()), Vec(-s * z.q() + c * z.p()));
  };
  return cs;
}

HamiltonianSystem kinetic_plus_linear(const Vec& force) {
  // H = ½|p|² − force·q
  HamiltonianSystem sys;
  sys.d = static_cast<int>(force.size());
  sys.energy = [force](const PhasePoint& z) { return 0.5 * z.p().squaredNorm() - force.dot(z.q()); };
  sys.gradient = [force](const PhasePoint& z) { return Covector(Vec(-force), Vec(z.p())); };
  sys.hessian = [d = sys.d](const PhasePoint&) {
    Mat Hz = Mat::Zero(2 * d, 2 * d);
    Hz.bottomRightCorner(d, d).setIdentity();
    return Hz;
  };
  return sys;
}

BuiltinProblem pendulum() {
  BuiltinProblem pb;
  pb.name = "pendulum";
  pb.system = kinetic_plus_linear((Vec(2) << 0.0, -1.0).finished());
  ConstraintSet& cs = pb.constraints;
  cs.d = 2;
  cs.m = 1;
  cs.g = [](const PhasePoint& z) { return Vec::Constant(1, z.q().squaredNorm() - 1.0); };
  cs.jacobian = [](const PhasePoint& z) -> Mat {
    Mat G = Mat::Zero(1, 4);
    G.leftCols(2) = 2.0 * z.q().transpose();
    return G;
  };
  cs.hessians = [](const PhasePoint&) {
    Mat Hg = Mat::Zero(4, 4);
    Hg.topLeftCorner(2, 2) = 2.0 * Mat::Identity(2, 2);
    return std::vector<Mat>{Hg};
  };
  cs.fiberFlow = [](const Vec& lambda, const PhasePoint& z) {
    return PhasePoint(Vec(z.q()), Vec(z.p() - 2.0 * lambda[0] * z.q()));
  };
  pb.knownMpTest = mp_test(pb.system, cs, 1e-9);
  pb.defaultInitial = PhasePoint((Vec(4) << 0.0, -1.0, 1.0, 0.0).finished());
  return pb;
}

BuiltinProblem hopf_free() {
  BuiltinProblem pb;
  pb.name = "hopf-free";
  pb.system = kinetic_plus_linear(Vec::Zero(2));
  pb.constraints = hopf_constraint();
  pb.knownMpTest = [](const PhasePoint& z) {
    return std::abs(z.vec().squaredNorm() - 1.0) <= 1e-9 && std::abs(z.q().dot(z.p())) <= 1e-9;
  };
  pb.exactSolution = hopf_exact_solution;
  pb.defaultInitial = PhasePoint((Vec(4) << 0.6, 0.0, 0.0, 0.8).finished());
  pb.hopfType = true;
  return pb;
}

BuiltinProblem hopf_gravity(const Vec& gv) {
  if (gv.size() != 2 || !gv.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "hopf-gravity: gv must be a finite vector of length 2");
  }
  BuiltinProblem pb;
  pb.name = "hopf-gravity";
  pb.system = kinetic_plus_linear(gv);
  pb.constraints = hopf_constraint();
  pb.knownMpTest = mp_test(pb.system, pb.constraints, 1e-8);
  pb.defaultInitial = table1_initial_conditions()[0];
  pb.nondegRejectBelow = 1e-3;
  pb.hopfType = true;
  return pb;
}

// Coordinates (q, α; p, β). H = ½p² + ½β² + βq, g = α, hidden constraint β + q = 0.
BuiltinProblem index1_model() {
  BuiltinProblem pb;
  pb.name = "index1-model";
  HamiltonianSystem& sys = pb.system;
  sys.d = 2;
  sys.energy = [](const PhasePoint& z) {
    const double q = z[0], p = z[2], b = z[3];
    return 0.5 * p * p + 0.5 * b * b + b * q;
  };
  sys.gradient = [](const PhasePoint& z) {
    const double q = z[0], p = z[2], b = z[3];
    return Covector((Vec(4) << b, 0.0, p, b + q).finished());
  };
  sys.hessian = [](const PhasePoint&) {
    Mat Hz = Mat::Zero(4, 4);
    Hz(0, 3) = Hz(3, 0) = 1.0;
    Hz(2, 2) = 1.0;
    Hz(3, 3) = 1.0;
    return Hz;
  };
  ConstraintSet& cs = pb.constraints;
  cs.d = 2;
  cs.m = 1;
  cs.g = [](const PhasePoint& z) { return Vec::Constant(1, z[1]); };
  cs.jacobian = [](const PhasePoint&) -> Mat { return (Mat(1, 4) << 0.0, 1.0, 0.0, 0.0).finished(); };
  cs.hessians = [](const PhasePoint&) { return std::vector<Mat>{Mat::Zero(4, 4)}; };
  cs.fiberFlow = [](const Vec& lambda, const PhasePoint& z) {
    Vec v = z.vec();
    v[3] -= lambda[0];
    return PhasePoint(std::move(v));
  };
  pb.knownMpTest = mp_test(sys, cs, 1e-9);
  pb.defaultInitial = PhasePoint((Vec(4) << 1.0, 0.0, -1.0, -1.0).finished());
  return pb;
}

// Coordinates (q, q̄; p, p̄). H = p²/2 + p̄q, g = q̄; ρ = q and the
// nondegeneracy matrix vanishes identically.
BuiltinProblem degenerate_index5() {
  BuiltinProblem pb;
  pb.name = "degenerate-index5";
  HamiltonianSystem& sys = pb.system;
  sys.d = 2;
  sys.energy = [](const PhasePoint& z) { return 0.5 * z[2] * z[2] + z[3] * z[0]; };
  sys.gradient = [](const PhasePoint& z) { return Covector((Vec(4) << z[3], 0.0, z[2], z[0]).finished()); };
  sys.hessian = [](const PhasePoint&) {
    Mat Hz = Mat::Zero(4, 4);
    Hz(0, 3) = Hz(3, 0) = 1.0;
    Hz(2, 2) = 1.0;
    return Hz;
  };
  ConstraintSet& cs = pb.constraints;
  cs.d = 2;
  cs.m = 1;
  cs.g = [](const PhasePoint& z) { return Vec::Constant(1, z[1]); };
  cs.jacobian = [](const PhasePoint&) -> Mat { return (Mat(1, 4) << 0.0, 1.0, 0.0, 0.0).finished(); };
  cs.hessians = [](const PhasePoint&) { return std::vector<Mat>{Mat::Zero(4, 4)}; };
  cs.fiberFlow = [](const Vec& lambda, const PhasePoint& z) {
    Vec v = z.vec();
    v[3] -= lambda[0];
    return PhasePoint(std::move(v));
  };
  pb.knownMpTest = mp_test(sys, cs, 1e-9);
  pb.defaultInitial = PhasePoint((Vec(4) << 0.0, 0.0, 1.0, 0.0).finished());
  return pb;
}

}  // namespace

std::vector<std::string> problem_names() {
  return {"pendulum", "hopf-free", "hopf-gravity", "index1-model", "degenerate-index5"};
}

BuiltinProblem builtin_problem(const std::string& name, const ProblemParams& params) {
  if (name == "pendulum") return pendulum();
  if (name == "hopf-free") return hopf_free();
  if (name == "hopf-gravity") return hopf_gravity(params.gv);
  if (name == "index1-model") return index1_model();
  if (name == "degenerate-index5") return degenerate_index5();
  std::string valid;
  for (const auto& n : problem_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw Error(ErrorKind::InvalidArgument, "unknown problem '" + name + "' (valid: " + valid + ")");
}

StructureReport analyse_structure(const BuiltinProblem& problem, int mSamples, int mpSamples, unsigned seed,
                                  const NewtonConfig& cfg) {
  StructureReport report;
  SamplerOptions opts;
  opts.n = mSamples;
  opts.seed = seed;
  check_coisotropy(problem.constraints, sample_M(problem.constraints, opts, cfg), report.coisotropyTol, report);
  opts.n = mpSamples;
  opts.rejectNondegBelow = problem.nondegRejectBelow;
  const auto mp = sample_Mp(problem.system, problem.constraints, opts, cfg);
  check_nondegeneracy(problem.system, problem.constraints, mp, report.nondegeneracyTol, report);
  report.samplesTested = mpSamples;
  return report;
}

std::array<PhasePoint, 3> table1_initial_conditions() {
  return {
      PhasePoint((Vec(4) << -0.78652612, -0.4043988, -0.3880746864163783, 0.2173391755798215).finished()),
      PhasePoint((Vec(4) << -0.4963624948824013, -0.7319740436366664, -0.4275775933953260,
                  0.1225384882604160).finished()),
      PhasePoint((Vec(4) << 0.3477491188213400, -0.8131619010029159, -0.4368285559113795,
                  -0.0837800227934176).finished()),
  };
}

namespace {

struct HopfRate {
  double omegaPlus;   // rotation rate for α = +|p|/|q|
  double omegaMinus;  // rotation rate for α = −|p|/|q|
};

HopfRate hopf_rates(const PhasePoint& z0) {
  if (z0.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "hopf_exact_solution: needs d = 2");
  const double nq = z0.q().norm();
  const double np = z0.p().norm();
  if (std::abs(nq - np) <= 1e-12 * std::max(1.0, nq + np) || nq == 0.0 || np == 0.0) {
    throw Error(ErrorKind::InvalidArgument,
                "hopf_exact_solution: |q0| = |p0| (or a zero block) lies on an exceptional fiber, where H is "
                "constant and the motion is undetermined");
  }
  const double a = np / nq;
  return {1.0 / (a - 1.0 / a), 1.0 / (-a + 1.0 / a)};
}

}  // namespace

int hopf_alpha_sign(const PhasePoint& z0) {
  const HopfRate r = hopf_rates(z0);
  const Vec q0 = z0.q();
  const Vec p0 = z0.p();
  const double lambda = p0.squaredNorm() / (q0.squaredNorm() - p0.squaredNorm());
  const Vec target = (1.0 + lambda) * p0;
  const Vec perp = rotation(M_PI / 2) * q0;  // d/dφ R(φ)q0 at φ = 0
  const double ePlus = (r.omegaPlus * perp - target).norm();
  const double eMinus = (r.omegaMinus * perp - target).norm();
  return ePlus <= eMinus ? 1 : -1;
}

PhasePoint hopf_exact_solution(const PhasePoint& z0, double t) {
  const HopfRate r = hopf_rates(z0);
  const double w = hopf_alpha_sign(z0) > 0 ? r.omegaPlus : r.omegaMinus;
  const Mat R = rotation(w * t);
  return PhasePoint(Vec(R * z0.q()), Vec(R * z0.p()));
}

}  // namespace coiso
