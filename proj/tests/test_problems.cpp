#include <gtest/gtest.h>

#include "coiso/problems.hpp"
#include "coiso/shake_rattle.hpp"
#include "support.hpp"

using namespace coiso;
using coiso::testing::Gen;

TEST(Problems, Names) {
  EXPECT_EQ(problem_names(),
            (std::vector<std::string>{"pendulum", "hopf-free", "hopf-gravity", "index1-model", "degenerate-index5"}));
  for (const auto& name : problem_names()) EXPECT_EQ(builtin_problem(name).name, name);
}

TEST(Problems, UnknownNameListsValidOnes) {
  try {
    builtin_problem("pendulm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    const std::string what = e.what();
    for (const auto& name : problem_names()) EXPECT_NE(what.find(name), std::string::npos) << what;
  }
}

TEST(Problems, GravityVectorIsValidated) {
  ProblemParams params;
  params.gv = Vec::Zero(3);
  EXPECT_THROW(builtin_problem("hopf-gravity", params), Error);
  params.gv = (Vec(2) << 0, std::nan("")).finished();
  EXPECT_THROW(builtin_problem("hopf-gravity", params), Error);
}

TEST(Problems, DefaultInitialPointsOnMp) {
  for (const std::string name : {"pendulum", "hopf-free", "index1-model", "degenerate-index5"}) {
    const auto pb = builtin_problem(name);
    EXPECT_TRUE(on_Mp(pb.system, pb.constraints, pb.defaultInitial)) << name;
    EXPECT_TRUE(pb.knownMpTest(pb.defaultInitial)) << name;
  }
}

TEST(Problems, HopfFlags) {
  for (const auto& name : problem_names()) {
    const bool hopf = name.rfind("hopf-", 0) == 0;
    EXPECT_EQ(builtin_problem(name).hopfType, hopf) << name;
  }
}

TEST(ReferenceStarts, HiddenConstraintHoldsButSphereLevelIsOff) {
  const auto pb = builtin_problem("hopf-gravity");
  for (const auto& z : table1_initial_conditions()) {
    EXPECT_LE(std::abs(hidden_residual(pb.system, pb.constraints, z)[0]), 1e-8);
    EXPECT_NEAR(constraint_residual(pb.constraints, z)[0], -0.02, 1e-8);
    EXPECT_FALSE(pb.knownMpTest(z));
    EXPECT_TRUE(pb.knownMpTest(carry_to_Mp(pb.system, pb.constraints, z)));
  }
}

TEST(ReferenceStarts, CorruptedDigitIsDetected) {
  const auto pb = builtin_problem("hopf-gravity");
  const auto za = table1_initial_conditions()[0];
  Vec bad = za.vec();
  bad[2] = -0.3880746864163783 + 1e-3;  // third significant digit of p_1
  EXPECT_GT(std::abs(hidden_residual(pb.system, pb.constraints, PhasePoint(bad))[0]), 1e-4);
}

TEST(ReferenceStarts, FirstPointLiteral) {
  const auto za = table1_initial_conditions()[0];
  EXPECT_EQ(za[0], -0.78652612);
  EXPECT_EQ(za[1], -0.4043988);
  EXPECT_EQ(za[2], -0.3880746864163783);
  EXPECT_EQ(za[3], 0.2173391755798215);
}

TEST(HopfExactSolution, StartsAtInitialPoint) {
  const auto pb = builtin_problem("hopf-free");
  EXPECT_EQ((*pb.exactSolution)(pb.defaultInitial, 0.0).vec(), pb.defaultInitial.vec());
}

TEST(HopfExactSolution, SolvesConstrainedEquationsProperty) {
  // ż − X_H must be a multiple of X_g, and z(t) must stay on Mp.
  const auto pb = builtin_problem("hopf-free");
  SamplerOptions opts;
  opts.n = 10;
  opts.seed = 5;
  for (const auto& z0 : sample_Mp(pb.system, pb.constraints, opts)) {
    if (std::abs(z0.q().norm() - z0.p().norm()) < 0.1) continue;
    for (double t : {0.3, 1.7}) {
      const double dt = 1e-5;
      const auto z = hopf_exact_solution(z0, t);
      const Vec zdot = (hopf_exact_solution(z0, t + dt).vec() - hopf_exact_solution(z0, t - dt).vec()) / (2 * dt);
      const Vec rest = zdot - hamiltonian_vector_field(pb.system, z).vec();
      const Vec xg = pb.constraints.fields(z).col(0);
      const double lambda = rest.dot(xg) / xg.squaredNorm();
      EXPECT_LE((rest - lambda * xg).norm(), 1e-8 * (1 + zdot.norm()));
      EXPECT_TRUE(on_Mp(pb.system, pb.constraints, z));
    }
  }
}

TEST(HopfExactSolution, AgreesWithRattle) {
  const auto pb = builtin_problem("hopf-free");
  const auto z0 = pb.defaultInitial;
  const auto traj = integrate(pb.system, pb.constraints, make_method(MethodKind::ImplicitMidpoint), Mode::Rattle,
                              0.01, 100, z0);
  const auto exact = hopf_exact_solution(z0, 1.0);
  EXPECT_LE((traj.records.back().output().vec() - exact.vec()).norm(), 1e-3);
}

TEST(HopfExactSolution, ExceptionalFiberRefused) {
  const double s = 1.0 / std::sqrt(2.0);
  try {
    hopf_exact_solution(PhasePoint((Vec(4) << s, 0, 0, s).finished()), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
  EXPECT_THROW(hopf_alpha_sign(PhasePoint((Vec(4) << 1, 0, 0, 0).finished())), Error);
}

TEST(HopfExactSolution, AlphaSignMatchesInitialVelocity) {
  // With |q0| = 0.6 and |p0| = 0.8 the multiplier is λ = 0.64 / (0.36 − 0.64).
  const PhasePoint z0((Vec(4) << 0.6, 0, 0, 0.8).finished());
  const int sign = hopf_alpha_sign(z0);
  const double a = sign * 0.8 / 0.6;
  const double rate = 1.0 / (a - 1.0 / a);
  const Vec qdot = rate * (Vec(2) << 0, 0.6).finished();
  const double lambda = 0.64 / (0.36 - 0.64);
  EXPECT_LE((qdot - (1 + lambda) * z0.p()).norm(), 1e-12);
}

TEST(Structure, BuiltinsAreCoisotropic) {
  for (const auto& name : problem_names()) {
    const auto report = analyse_structure(builtin_problem(name), 64, 16, 1);
    EXPECT_TRUE(report.verdictCoisotropy) << name;
    EXPECT_EQ(report.maxBracketResidual, 0.0) << name;
  }
}

TEST(Structure, NondegeneracyOnlyFailsForDegenerateExample) {
  for (const auto& name : problem_names()) {
    const auto report = analyse_structure(builtin_problem(name), 16, 32, 2);
    EXPECT_EQ(report.samplesTested, 32);
    if (name == "degenerate-index5") {
      EXPECT_FALSE(report.verdictNondegeneracy);
      EXPECT_EQ(report.nondegFailures, 32);
    } else {
      EXPECT_TRUE(report.verdictNondegeneracy) << name;
      EXPECT_EQ(report.nondegFailures, 0) << name;
    }
  }
}

TEST(Structure, SeedChangesSamplesNotVerdicts) {
  const auto pb = builtin_problem("hopf-gravity");
  const auto a = analyse_structure(pb, 16, 16, 3);
  const auto b = analyse_structure(pb, 16, 16, 4);
  EXPECT_EQ(a.verdictNondegeneracy, b.verdictNondegeneracy);
  EXPECT_NE(a.minNondegSingularValue, b.minNondegSingularValue);
  const auto c = analyse_structure(pb, 16, 16, 3);
  EXPECT_EQ(a.minNondegSingularValue, c.minNondegSingularValue);
}

TEST(Derivatives, AnalyticMatchesFiniteDifferences) {
  Gen gen(7);
  for (const auto& name : problem_names()) {
    const auto pb = builtin_problem(name);
    EXPECT_LE(gradient_consistency(pb.system, 16, 8), 1e-6) << name;
    for (int k = 0; k < 5; ++k) {
      const auto z = gen.point(2);
      const auto& cs = pb.constraints;
      const Covector fd = grad_fd([&](const PhasePoint& x) { return cs.value(x)[0]; }, z);
      EXPECT_LE((cs.jac(z).row(0).transpose() - fd.vec()).norm(), 1e-7 * (1 + z.vec().norm())) << name;
      const Mat hfd = hessian_fd([&](const PhasePoint& x) { return Covector(Vec(cs.jac(x).row(0).transpose())); }, z);
      EXPECT_LE((cs.hess(z)[0] - hfd).norm(), 1e-7) << name;
      const Mat Hfd = hessian_fd([&](const PhasePoint& x) { return pb.system.grad(x); }, z);
      EXPECT_LE((pb.system.hess(z) - Hfd).norm(), 1e-7) << name;
    }
  }
}
