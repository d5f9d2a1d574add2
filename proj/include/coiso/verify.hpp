#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "coiso/problems.hpp"
#include "coiso/shake_rattle.hpp"

namespace coiso {

struct HopfPoint {
  std::complex<double> zeta;
  double r = 0.0;
};

/// (z0, z1) ↦ (2 z0 conj(z1), |z0|² − |z1|²) with z_j = q_j + i p_j.
HopfPoint hopf_map(const PhasePoint& z);

/// ζ / (√(|ζ|² + r²) − r). Throws InvalidArgument at the north pole.
std::complex<double> stereographic(const HopfPoint& w);

/// Distance from z to the closed orbit {(R(θ)q0, R(θ)p0)}: 4096-point θ grid
/// refined by bisection on the derivative of the squared distance.
double orbit_distance_hopf_free(const PhasePoint& z0, const PhasePoint& z);

struct OrderEstimate {
  std::vector<double> h;
  std::vector<double> errors;
  double slope = 0.0;       // NaN when saturated
  bool saturated = false;   // fewer than two errors above the reference floor
  double referenceStep = 0.0;
};

/// Global error at time T of `method` in `mode` for each h, against a RATTLE
/// (or SHAKE, matching `mode`) midpoint reference at h_min/64. The h-sweep
/// runs concurrently. Errors within 100·cfg.tol of the reference are treated
/// as saturated and left out of the fit.
OrderEstimate estimate_order(const BuiltinProblem& problem, const PhasePoint& z0, Mode mode,
                             const OneStepMethod& method, const std::vector<double>& hList, double T,
                             const NewtonConfig& cfg = {});

using StepMap = std::function<PhasePoint(const PhasePoint&)>;

enum class TangentSpace { Mp, M };

struct SymplecticityResult {
  double residual = 0.0;
  double fdStep = 0.0;
  int basisSize = 0;
};

/// max_{i,j} |ω(Au_i, Au_j) − ω(u_i, u_j)| over an orthonormal basis u of
/// T_zMp (or T_zM), with Au_i from central differences of `step` at z ± δu_i.
SymplecticityResult symplecticity_residual(const StepMap& step, const HamiltonianSystem& sys,
                                           const ConstraintSet& cs, const PhasePoint& z, double fdStep = 1e-6,
                                           TangentSpace space = TangentSpace::Mp);

struct EnergyDrift {
  double maxDeviation = 0.0;
  double linearSlope = 0.0;  // least-squares slope of H against the step index
  double slopeStdErr = 0.0;
};

EnergyDrift energy_drift(const Trajectory& traj);
EnergyDrift energy_drift(const std::vector<double>& energy);

struct FiberScan {
  std::vector<double> theta;
  std::vector<double> derivative;  // Hr'(θ)
  int crossings = 0;
  bool identicallyZero = false;  // H is constant on the fiber (exceptional fiber)
};

/// Samples Hr'(θ) = d/dθ H(cos θ q + sin θ p, −sin θ q + cos θ p) at n
/// uniform θ in [0, 2π) and counts its zeros around the circle. A sampled
/// near-zero local minimum of |Hr'| without a sign change counts as one
/// (degenerate) zero.
FiberScan fiber_criticality_scan(const HamiltonianSystem& sys, const PhasePoint& z, int n = 720,
                                 double tangencyTol = 1e-3);

}  // namespace coiso
