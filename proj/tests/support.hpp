#pragma once

#include <random>
#include <vector>

#include "coiso/problems.hpp"
#include "coiso/shake_rattle.hpp"

namespace coiso::testing {

// Deterministic generators for property tests.
class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vec vec(Eigen::Index n, double sd = 1.0) {
    Vec v(n);
    for (auto& x : v) x = normal(sd);
    return v;
  }
  PhasePoint point(int d, double sd = 1.0) { return PhasePoint(vec(2 * d, sd)); }
  TangentVector tangent(int d) { return TangentVector(vec(2 * d)); }

  // Random symmetric 2d×2d matrix.
  Mat symmetric(int n) {
    Mat A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = normal();
    return 0.5 * (A + A.transpose());
  }

 private:
  std::mt19937_64 rng_;
};

// Smooth non-separable test Hamiltonian: ½zᵀSz + a·sin(b·z).
inline HamiltonianSystem smooth_hamiltonian(int d, Gen& gen) {
  const Mat S = gen.symmetric(2 * d) * 0.5 + Mat::Identity(2 * d, 2 * d);
  const Vec b = gen.vec(2 * d, 0.5);
  const double a = 0.3;
  HamiltonianSystem sys;
  sys.d = d;
  sys.energy = [S, b, a](const PhasePoint& z) { return 0.5 * z.vec().dot(S * z.vec()) + a * std::sin(b.dot(z.vec())); };
  sys.gradient = [S, b, a](const PhasePoint& z) {
    return Covector(Vec(S * z.vec() + a * std::cos(b.dot(z.vec())) * b));
  };
  sys.hessian = [S, b, a](const PhasePoint& z) -> Mat {
    return S - a * std::sin(b.dot(z.vec())) * b * b.transpose();
  };
  return sys;
}

// H = ½|p|², d = 1 and g = q: Mp is the single point (0, 0).
inline HamiltonianSystem free_particle(int d) {
  HamiltonianSystem sys;
  sys.d = d;
  sys.energy = [](const PhasePoint& z) { return 0.5 * z.p().squaredNorm(); };
  sys.gradient = [d](const PhasePoint& z) { return Covector(Vec(Vec::Zero(d)), Vec(z.p())); };
  sys.hessian = [d](const PhasePoint&) {
    Mat H = Mat::Zero(2 * d, 2 * d);
    H.bottomRightCorner(d, d).setIdentity();
    return H;
  };
  return sys;
}

inline HamiltonianSystem harmonic_oscillator() {
  HamiltonianSystem sys;
  sys.d = 1;
  sys.energy = [](const PhasePoint& z) { return 0.5 * z.vec().squaredNorm(); };
  sys.gradient = [](const PhasePoint& z) { return Covector(z.vec()); };
  sys.hessian = [](const PhasePoint&) { return Mat(Mat::Identity(2, 2)); };
  return sys;
}

// g = q_1 (first position), exact fiber p_1 → p_1 − λ.
inline ConstraintSet first_position_constraint(int d) {
  ConstraintSet cs;
  cs.d = d;
  cs.m = 1;
  cs.g = [](const PhasePoint& z) { return Vec::Constant(1, z[0]); };
  cs.jacobian = [d](const PhasePoint&) -> Mat {
    Mat G = Mat::Zero(1, 2 * d);
    G(0, 0) = 1.0;
    return G;
  };
  cs.hessians = [d](const PhasePoint&) { return std::vector<Mat>{Mat::Zero(2 * d, 2 * d)}; };
  cs.fiberFlow = [d](const Vec& lambda, const PhasePoint& z) {
    Vec v = z.vec();
    v[d] -= lambda[0];
    return PhasePoint(std::move(v));
  };
  return cs;
}

inline PhasePoint z_a_on_Mp() {
  const BuiltinProblem hg = builtin_problem("hopf-gravity");
  return carry_to_Mp(hg.system, hg.constraints, table1_initial_conditions()[0]);
}

// Explicit Euler, used only as a non-symplectic negative fixture.
inline OneStepMethod explicit_euler() {
  return {"explicit-euler",
          [](const HamiltonianSystem& s, double h, const PhasePoint& z, const NewtonConfig&) {
            return PhasePoint(Vec(z.vec() + h * hamiltonian_vector_field(s, z).vec()));
          },
          1, false, false};
}

// Explicit Euler is a symplectic shear whenever the potential is linear, so
// the negative fixture adds curvature: H = ½|p|² + q₂ + ½q₁² on the pendulum circle.
inline HamiltonianSystem curved_pendulum_hamiltonian() {
  HamiltonianSystem sys;
  sys.d = 2;
  sys.energy = [](const PhasePoint& z) { return 0.5 * z.p().squaredNorm() + z[1] + 0.5 * z[0] * z[0]; };
  sys.gradient = [](const PhasePoint& z) { return Covector((Vec(4) << z[0], 1.0, z[2], z[3]).finished()); };
  sys.hessian = [](const PhasePoint&) {
    Mat H = Mat::Zero(4, 4);
    H(0, 0) = H(2, 2) = H(3, 3) = 1.0;
    return H;
  };
  return sys;
}

inline double max_norm(const Vec& v) { return v.lpNorm<Eigen::Infinity>(); }

}  // namespace coiso::testing
