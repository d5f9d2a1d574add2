#include <gtest/gtest.h>

#include "coiso/verify.hpp"
#include "support.hpp"

using namespace coiso;
using coiso::testing::Gen;

namespace {

const OneStepMethod kMidpoint = make_method(MethodKind::ImplicitMidpoint);

PhasePoint pt(double a, double b, double c, double d) { return PhasePoint((Vec(4) << a, b, c, d).finished()); }

}  // namespace

TEST(HopfMap, BasisPoints) {
  const auto n = hopf_map(pt(1, 0, 0, 0));
  EXPECT_EQ(n.zeta, std::complex<double>(0, 0));
  EXPECT_EQ(n.r, 1.0);
  const auto s = hopf_map(pt(0, 1, 0, 0));
  EXPECT_EQ(s.r, -1.0);
  // z0 = z1 = 1/√2 gives ζ = 1, r = 0.
  const double h = 1.0 / std::sqrt(2.0);
  const auto e = hopf_map(pt(h, h, 0, 0));
  EXPECT_NEAR(e.zeta.real(), 1.0, 1e-15);
  EXPECT_NEAR(e.zeta.imag(), 0.0, 1e-15);
  EXPECT_NEAR(e.r, 0.0, 1e-15);
}

TEST(HopfMap, ComplexCoordinates) {
  // z0 = q1 + i p1 = i, z1 = q2 + i p2 = 1: ζ = 2 i · 1.
  const auto w = hopf_map(pt(0, 1, 1, 0));
  EXPECT_EQ(w.zeta, std::complex<double>(0, 2));
  EXPECT_EQ(w.r, 0.0);
}

TEST(HopfMap, LandsOnSphereOfRadiusSquaredNormProperty) {
  Gen gen(1);
  for (int k = 0; k < 50; ++k) {
    const auto z = gen.point(2);
    const auto w = hopf_map(z);
    const double r2 = z.vec().squaredNorm();
    EXPECT_NEAR(std::norm(w.zeta) + w.r * w.r, r2 * r2, 1e-12 * (1 + r2 * r2));
  }
}

TEST(HopfMap, NeedsTwoDegreesOfFreedom) {
  EXPECT_THROW(hopf_map(PhasePoint(Vec::Zero(2))), Error);
}

TEST(Stereographic, Examples) {
  EXPECT_EQ(stereographic({{0, 0}, -1.0}), std::complex<double>(0, 0));
  EXPECT_EQ(stereographic({{1, 0}, 0.0}), std::complex<double>(1, 0));
  EXPECT_EQ(stereographic({{0, 2}, 0.0}), std::complex<double>(0, 1));
  try {
    stereographic({{0, 0}, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(Stereographic, InverseProperty) {
  // Inverse projection of ξ: (2ξ, |ξ|² − 1) / (|ξ|² + 1).
  Gen gen(2);
  for (int k = 0; k < 50; ++k) {
    const std::complex<double> xi(gen.normal(), gen.normal());
    const double n2 = std::norm(xi);
    const HopfPoint w{2.0 * xi / (n2 + 1), (n2 - 1) / (n2 + 1)};
    EXPECT_LE(std::abs(stereographic(w) - xi), 1e-12 * (1 + std::abs(xi)));
  }
}

TEST(OrbitDistance, Examples) {
  const auto z0 = pt(1, 0, 0, 0);
  EXPECT_LE(orbit_distance_hopf_free(z0, z0), 1e-15);
  EXPECT_NEAR(orbit_distance_hopf_free(z0, pt(2, 0, 0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(orbit_distance_hopf_free(z0, pt(0, 0, 1, 0)), std::sqrt(2.0), 1e-12);
  // R(θ)q0 = (cos θ, sin θ) passes through (0, 1).
  EXPECT_LE(orbit_distance_hopf_free(z0, pt(0, 1, 0, 0)), 1e-12);
}

TEST(OrbitDistance, ZeroOnOrbitProperty) {
  Gen gen(3);
  for (int k = 0; k < 20; ++k) {
    const auto z0 = gen.point(2);
    const double th = gen.uniform(0, 2 * M_PI);
    const double c = std::cos(th), s = std::sin(th);
    const Mat R = (Mat(2, 2) << c, -s, s, c).finished();
    const PhasePoint z(Vec(R * z0.q()), Vec(R * z0.p()));
    EXPECT_LE(orbit_distance_hopf_free(z0, z), 1e-12);
  }
}

TEST(EstimateOrder, PendulumSlopes) {
  const auto pb = builtin_problem("pendulum");
  const std::vector<double> hs = {0.1, 0.05, 0.025};
  const auto mp = estimate_order(pb, pb.defaultInitial, Mode::Rattle, kMidpoint, hs, 1.0);
  EXPECT_FALSE(mp.saturated);
  EXPECT_NEAR(mp.slope, 2.0, 0.2);
  EXPECT_EQ(mp.errors.size(), 3u);
  EXPECT_DOUBLE_EQ(mp.referenceStep, 0.025 / 64);
  const auto se =
      estimate_order(pb, pb.defaultInitial, Mode::Rattle, make_method(MethodKind::SymplecticEuler), hs, 1.0);
  EXPECT_NEAR(se.slope, 1.0, 0.2);
  EXPECT_GT(se.errors[0], mp.errors[0]);
}

TEST(EstimateOrder, RestPointSaturates) {
  const auto pb = builtin_problem("pendulum");
  const auto est = estimate_order(pb, pt(0, -1, 0, 0), Mode::Rattle, kMidpoint, {0.1, 0.05}, 0.5);
  EXPECT_TRUE(est.saturated);
  EXPECT_TRUE(std::isnan(est.slope));
  for (double e : est.errors) EXPECT_LE(e, 1e-9);
}

TEST(EstimateOrder, ArgumentValidation) {
  const auto pb = builtin_problem("pendulum");
  EXPECT_THROW(estimate_order(pb, pb.defaultInitial, Mode::Rattle, kMidpoint, {}, 1.0), Error);
  EXPECT_THROW(estimate_order(pb, pb.defaultInitial, Mode::Rattle, kMidpoint, {0.05, 0.1}, 1.0), Error);
  EXPECT_THROW(estimate_order(pb, pb.defaultInitial, Mode::Rattle, kMidpoint, {0.1, 0.03}, 1.0), Error);
  EXPECT_THROW(estimate_order(pb, pb.defaultInitial, Mode::Rattle, kMidpoint, {0.1}, 0.0), Error);
}

TEST(EstimateOrder, FailureNamesStep) {
  const auto pb = builtin_problem("degenerate-index5");
  try {
    estimate_order(pb, pb.defaultInitial, Mode::Rattle, kMidpoint, {0.1, 0.05}, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularJacobian);
    EXPECT_NE(std::string(e.what()).find("h = "), std::string::npos) << e.what();
  }
}

TEST(Symplecticity, IdentityMapIsExact) {
  const auto pb = builtin_problem("pendulum");
  const auto r = symplecticity_residual([](const PhasePoint& z) { return z; }, pb.system, pb.constraints,
                                        pb.defaultInitial);
  EXPECT_EQ(r.basisSize, 2);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(Symplecticity, RattleVersusExplicitEuler) {
  const auto pb = builtin_problem("pendulum");
  const auto sys = coiso::testing::curved_pendulum_hamiltonian();
  const auto z = pb.defaultInitial;
  const auto ee = coiso::testing::explicit_euler();
  auto rattle = [&](const OneStepMethod& m) -> StepMap {
    return [&sys, &pb, m](const PhasePoint& x) { return *rattle_step(sys, pb.constraints, m, 0.1, x).z; };
  };
  EXPECT_LE(symplecticity_residual(rattle(kMidpoint), sys, pb.constraints, z).residual, 1e-9);
  EXPECT_GE(symplecticity_residual(rattle(ee), sys, pb.constraints, z).residual, 1e-3);
}

TEST(Symplecticity, RejectsBadStep) {
  const auto pb = builtin_problem("pendulum");
  EXPECT_THROW(symplecticity_residual([](const PhasePoint& z) { return z; }, pb.system, pb.constraints,
                                      pb.defaultInitial, 0.0),
               Error);
}

TEST(EnergyDrift, Examples) {
  const auto flat = energy_drift(std::vector<double>{2.0, 2.0, 2.0});
  EXPECT_EQ(flat.maxDeviation, 0.0);
  EXPECT_EQ(flat.linearSlope, 0.0);
  EXPECT_EQ(flat.slopeStdErr, 0.0);
  const auto line = energy_drift(std::vector<double>{1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(line.maxDeviation, 3.0);
  EXPECT_DOUBLE_EQ(line.linearSlope, 1.0);
  EXPECT_NEAR(line.slopeStdErr, 0.0, 1e-15);
  const auto two = energy_drift(std::vector<double>{0, 1});
  EXPECT_DOUBLE_EQ(two.linearSlope, 1.0);
  EXPECT_EQ(two.slopeStdErr, 0.0);
  EXPECT_EQ(energy_drift(std::vector<double>{5}).maxDeviation, 0.0);
  EXPECT_THROW(energy_drift(std::vector<double>{}), Error);
}

TEST(EnergyDrift, StdErrOfNoisyLine) {
  // 0.5k plus residuals (1, −1, −1, 1): sse = 4, Σ(k − 1.5)² = 5, stderr = √(4 / 2 / 5).
  const auto d = energy_drift(std::vector<double>{1, -0.5, 0, 2.5});
  EXPECT_NEAR(d.linearSlope, 0.5, 1e-15);
  EXPECT_NEAR(d.slopeStdErr, std::sqrt(0.4), 1e-12);
}

TEST(EnergyDrift, RattleTrajectoryHasNoDrift) {
  const auto pb = builtin_problem("pendulum");
  const auto traj = integrate(pb.system, pb.constraints, kMidpoint, Mode::Rattle, 0.1, 500, pb.defaultInitial);
  const auto d = energy_drift(traj);
  EXPECT_LE(d.maxDeviation, 0.05);
  EXPECT_LE(std::abs(d.linearSlope), 3 * d.slopeStdErr + 1e-12);
}

TEST(FiberScan, HopfFreeGenericFiberHasFourZeros) {
  const auto pb = builtin_problem("hopf-free");
  const auto scan = fiber_criticality_scan(pb.system, pb.defaultInitial);
  EXPECT_FALSE(scan.identicallyZero);
  EXPECT_EQ(scan.crossings, 4);
  EXPECT_EQ(scan.theta.size(), 720u);
  EXPECT_EQ(scan.theta[0], 0.0);
  EXPECT_LT(scan.theta.back(), 2 * M_PI);
}

TEST(FiberScan, MatchesChainRuleOracle) {
  // H = ½|p|²: H(θ) = ½|−s q + c p|², so Hr' = ½ sin 2θ (|q|² − |p|²) − q·p cos 2θ.
  const auto pb = builtin_problem("hopf-free");
  const auto z = pt(0.3, -0.5, 0.7, 0.2);
  const auto scan = fiber_criticality_scan(pb.system, z, 64);
  const double qq = 0.34, pp = 0.53, qp = 0.21 - 0.1;
  for (std::size_t k = 0; k < scan.theta.size(); ++k) {
    const double th = scan.theta[k];
    EXPECT_NEAR(scan.derivative[k], 0.5 * std::sin(2 * th) * (qq - pp) - qp * std::cos(2 * th), 1e-14);
  }
}

TEST(FiberScan, ExceptionalFiberIsIdenticallyZero) {
  const auto pb = builtin_problem("hopf-free");
  const double s = 1.0 / std::sqrt(2.0);
  const auto scan = fiber_criticality_scan(pb.system, pt(s, 0, 0, s));
  EXPECT_TRUE(scan.identicallyZero);
}

TEST(FiberScan, HopfGravityFibersHaveTwoOrFourZerosProperty) {
  const auto pb = builtin_problem("hopf-gravity");
  SamplerOptions opts;
  opts.n = 40;
  opts.seed = 9;
  for (const auto& z : sample_M(pb.constraints, opts)) {
    const auto scan = fiber_criticality_scan(pb.system, z);
    EXPECT_TRUE(scan.crossings == 2 || scan.crossings == 4) << scan.crossings;
  }
}

TEST(FiberScan, NeedsEnoughSamples) {
  const auto pb = builtin_problem("hopf-free");
  EXPECT_THROW(fiber_criticality_scan(pb.system, pb.defaultInitial, 4), Error);
}

TEST(ShakeVersusRattle, SameHopfImages) {
  // Both iterate the same reduced map: SHAKE's output and RATTLE's projection share a fiber.
  const auto pb = builtin_problem("hopf-gravity");
  const auto z0 = coiso::testing::z_a_on_Mp();
  const auto r = integrate(pb.system, pb.constraints, kMidpoint, Mode::Rattle, 0.1, 50, z0);
  const auto s = integrate(pb.system, pb.constraints, kMidpoint, Mode::Shake, 0.1, 50, z0);
  double worst = 0.0;
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    const auto a = hopf_map(r.records[k].output()), b = hopf_map(s.records[k].output());
    worst = std::max(worst, std::abs(a.zeta - b.zeta) + std::abs(a.r - b.r));
  }
  EXPECT_LE(worst, 1e-8);
  EXPECT_GT(s.records.back().rhoResidual, 1e-4);
}
