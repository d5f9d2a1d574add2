#include <gtest/gtest.h>

#include "coiso/fiber.hpp"
#include "coiso/problems.hpp"
#include "coiso/verify.hpp"
#include "support.hpp"

using namespace coiso;
using coiso::testing::Gen;

namespace {

Vec lam(double x) { return Vec::Constant(1, x); }

ConstraintSet without_exact_fiber(ConstraintSet cs) {
  cs.fiberFlow.reset();
  return cs;
}

// Rotation of the (q_j, p_j) planes generated by X_g for g = |z|² − 1.
PhasePoint hopf_rotation(const PhasePoint& z, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return PhasePoint(Vec(c * z.q() + s * z.p()), Vec(-s * z.q() + c * z.p()));
}

}  // namespace

TEST(FiberMap, ZeroIsIdentity) {
  Gen gen(1);
  for (const auto& name : problem_names()) {
    const auto pb = builtin_problem(name);
    const auto z = gen.point(2);
    EXPECT_EQ(fiber_map(pb.constraints, lam(0.0), z).vec(), z.vec()) << name;
    EXPECT_LE((fiber_map_numeric(pb.constraints, lam(0.0), z).vec() - z.vec()).norm(), 1e-15) << name;
  }
}

TEST(FiberMap, PendulumShiftsMomentumAlongQ) {
  const auto pb = builtin_problem("pendulum");
  const PhasePoint z((Vec(4) << 0.6, -0.8, 1.0, 0.5).finished());
  const auto w = fiber_map(pb.constraints, lam(0.25), z);
  EXPECT_EQ(w.q(), z.q());
  EXPECT_LE((w.p() - (z.p() - 0.5 * z.q())).norm(), 1e-15);
}

TEST(FiberMap, HopfRotatesByTwiceLambda) {
  const auto pb = builtin_problem("hopf-free");
  const PhasePoint z((Vec(4) << 1, 0, 0, 0).finished());
  const auto w = fiber_map(pb.constraints, lam(M_PI / 4), z);
  // λ = π/4 is a quarter turn
  EXPECT_LE((w.vec() - (Vec(4) << 0, 0, -1, 0).finished()).norm(), 1e-15);
  Gen gen(2);
  for (int k = 0; k < 10; ++k) {
    const auto z0 = gen.point(2);
    const double l = gen.normal();
    EXPECT_LE((fiber_map(pb.constraints, lam(l), z0).vec() - hopf_rotation(z0, 2 * l).vec()).norm(), 1e-13);
  }
}

TEST(FiberMap, NumericMatchesExact) {
  Gen gen(3);
  for (const std::string name : {"pendulum", "hopf-free", "hopf-gravity", "index1-model", "degenerate-index5"}) {
    const auto pb = builtin_problem(name);
    const auto bare = without_exact_fiber(pb.constraints);
    for (int k = 0; k < 5; ++k) {
      const auto z = gen.point(2);
      const Vec l = lam(gen.normal());
      const Vec exact = fiber_map(pb.constraints, l, z).vec();
      EXPECT_LE((fiber_map(bare, l, z).vec() - exact).norm(), 1e-10 * (1 + exact.norm())) << name;
    }
  }
}

TEST(FiberMap, NumericHandlesTwoConstraints) {
  // g_1 = q_1, g_2 = q_2 commute; the flow is p_i → p_i − λ_i.
  ConstraintSet cs;
  cs.d = 2;
  cs.m = 2;
  cs.g = [](const PhasePoint& z) { return Vec(z.q()); };
  const PhasePoint z((Vec(4) << 0.3, 0.4, 1.0, 2.0).finished());
  const auto w = fiber_map(cs, (Vec(2) << 0.5, -1.5).finished(), z);
  EXPECT_LE((w.vec() - (Vec(4) << 0.3, 0.4, 0.5, 3.5).finished()).norm(), 1e-10);
}

TEST(FiberMap, GroupLawProperty) {
  Gen gen(4);
  for (const auto& name : problem_names()) {
    const auto pb = builtin_problem(name);
    for (const ConstraintSet& cs : {pb.constraints, without_exact_fiber(pb.constraints)}) {
      for (int k = 0; k < 5; ++k) {
        const auto z = gen.point(2);
        const double a = gen.normal(), b = gen.normal();
        const Vec lhs = fiber_map(cs, lam(a), fiber_map(cs, lam(b), z)).vec();
        const Vec rhs = fiber_map(cs, lam(a + b), z).vec();
        EXPECT_LE((lhs - rhs).norm(), 1e-9 * (1 + rhs.norm())) << name;
      }
    }
  }
}

TEST(FiberMap, InverseProperty) {
  Gen gen(5);
  const auto pb = builtin_problem("hopf-gravity");
  const auto bare = without_exact_fiber(pb.constraints);
  for (int k = 0; k < 10; ++k) {
    const auto z = gen.point(2);
    const double a = gen.normal();
    EXPECT_LE((fiber_map(bare, lam(-a), fiber_map(bare, lam(a), z)).vec() - z.vec()).norm(), 1e-10);
  }
}

TEST(FiberMap, PreservesConstraintValues) {
  Gen gen(6);
  for (const auto& name : problem_names()) {
    const auto pb = builtin_problem(name);
    SamplerOptions opts;
    opts.n = 8;
    opts.seed = 13;
    for (const auto& z : sample_M(pb.constraints, opts)) {
      const double l = gen.normal(2.0);
      const Vec g0 = pb.constraints.value(z);
      EXPECT_LE(max_abs(pb.constraints.value(fiber_map(pb.constraints, lam(l), z)) - g0), 1e-12) << name;
      const auto bare = without_exact_fiber(pb.constraints);
      EXPECT_LE(max_abs(bare.value(fiber_map(bare, lam(l), z)) - g0), 1e-10) << name;
    }
  }
}

TEST(FiberMap, HopfFiberKeepsHopfImage) {
  Gen gen(7);
  const auto pb = builtin_problem("hopf-free");
  for (int k = 0; k < 20; ++k) {
    const auto z = gen.point(2);
    const auto w = fiber_map(pb.constraints, lam(gen.normal(3.0)), z);
    const auto a = hopf_map(z), b = hopf_map(w);
    EXPECT_LE(std::abs(a.zeta - b.zeta), 1e-12 * (1 + z.vec().squaredNorm()));
    EXPECT_NEAR(a.r, b.r, 1e-12 * (1 + z.vec().squaredNorm()));
  }
}

TEST(FiberMap, LambdaSizeMismatchThrows) {
  const auto pb = builtin_problem("pendulum");
  try {
    fiber_map(pb.constraints, Vec::Zero(2), pb.defaultInitial);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(FiberMapNumeric, BlowUpIsReported) {
  // g = q p² on R²: X_g = (2qp, −p²), so p(t) = p0/(1 + p0 t) blows up at t = 1/2 for p0 = −2.
  ConstraintSet cs;
  cs.d = 1;
  cs.m = 1;
  cs.g = [](const PhasePoint& z) { return Vec::Constant(1, z[0] * z[1] * z[1]); };
  cs.jacobian = [](const PhasePoint& z) -> Mat { return (Mat(1, 2) << z[1] * z[1], 2 * z[0] * z[1]).finished(); };
  try {
    fiber_map_numeric(cs, lam(1.0), PhasePoint((Vec(2) << 1.0, -2.0).finished()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::StepSizeUnderflow || e.kind() == ErrorKind::NonFinite) << e.what();
  }
  // Before the singularity the flow is finite and matches the closed form.
  const auto w = fiber_map_numeric(cs, lam(0.25), PhasePoint((Vec(2) << 1.0, -2.0).finished()));
  EXPECT_NEAR(w[1], -2.0 / (1.0 - 0.5), 1e-10);
}
