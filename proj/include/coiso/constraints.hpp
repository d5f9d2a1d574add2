#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coiso/newton.hpp"
#include "coiso/phase.hpp"

namespace coiso {

using ConstraintFn = std::function<Vec(const PhasePoint&)>;
using ConstraintJacobianFn = std::function<Mat(const PhasePoint&)>;
using ConstraintHessiansFn = std::function<std::vector<Mat>(const PhasePoint&)>;
/// Exact flow exp(Σ λ_i X_{g_i}) applied to z.
using FiberFlowFn = std::function<PhasePoint(const Vec& lambda, const PhasePoint& z)>;

/// m scalar constraints g_i on R^{2d}. M = g⁻¹(0).
struct ConstraintSet {
  int d = 1;
  int m = 1;
  ConstraintFn g;
  std::optional<ConstraintJacobianFn> jacobian;  // m × 2d, rows (g_q, g_p)
  std::optional<ConstraintHessiansFn> hessians;  // m matrices 2d × 2d
  std::optional<FiberFlowFn> fiberFlow;

  Vec value(const PhasePoint& z) const;
  Mat jac(const PhasePoint& z) const;
  std::vector<Mat> hess(const PhasePoint& z) const;
  /// Columns X_{g_1}, …, X_{g_m} at z (2d × m).
  Mat fields(const PhasePoint& z) const;
  bool has_exact_fiber() const { return fiberFlow.has_value(); }
  bool analytic_derivatives() const { return jacobian.has_value(); }
};

/// g(z).
Vec constraint_residual(const ConstraintSet& cs, const PhasePoint& z);

/// ρ_i(z) = {g_i, H}(z). Mp = { g = 0, ρ = 0 }.
Vec hidden_residual(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z);

/// Rows ∇ρ_i (m × 2d): analytic when both Hessians exist, central differences otherwise.
Mat hidden_gradient(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z);

/// {g_i, g_j}(z).
Mat constraint_brackets(const ConstraintSet& cs, const PhasePoint& z);

/// m_ij = ∇ρ_i(z)·X_{g_j}(z) = {{g_i, H}, g_j}(z). Invertible on Mp iff the
/// critical points of H on the fiber are nondegenerate.
Mat nondegeneracy_matrix(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z);

/// Smallest singular value of the nondegeneracy matrix divided by
/// max_i |∇ρ_i| · max_j |X_{g_j}|; zero when that scale vanishes.
double relative_nondegeneracy(const HamiltonianSystem& sys, const ConstraintSet& cs,
                              const PhasePoint& z);

struct MembershipTol {
  double g = 1e-9;
  double rho = 1e-9;
};

double max_abs(const Vec& v);
bool on_M(const ConstraintSet& cs, const PhasePoint& z, double tol = 1e-9);
bool on_Mp(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z,
           MembershipTol tol = {});

/// Gauss–Newton along the rows of jacG until |g|∞ ≤ cfg.tol.
PhasePoint project_onto_M(const ConstraintSet& cs, const PhasePoint& z0, const NewtonConfig& cfg = {});

/// Gauss–Newton on the stacked system (g, ρ) = 0 in the ambient space.
/// Unlike the fiber projection this only needs the stacked rows to be
/// independent, so it also reaches Mp when nondegeneracy fails.
PhasePoint project_onto_Mp_ambient(const HamiltonianSystem& sys, const ConstraintSet& cs,
                                   const PhasePoint& z0, const NewtonConfig& cfg = {});

/// Orthonormal basis of T_zM (null space of jacG).
std::vector<TangentVector> tangent_basis_M(const ConstraintSet& cs, const PhasePoint& z);

/// Orthonormal basis of T_zMp (null space of jacG stacked on ∇ρ). Throws
/// RankDeficiency when the stacked rows are dependent or ω is degenerate on
/// the resulting subspace.
std::vector<TangentVector> tangent_basis_Mp(const HamiltonianSystem& sys, const ConstraintSet& cs,
                                            const PhasePoint& z);

struct SamplerOptions {
  int n = 256;
  unsigned seed = 0;
  double spread = 1.0;          // standard deviation of the Gaussian seeds
  double rejectNondegBelow = 0.0;  // Mp sampler: drop points with σ_min(m_ij) below this
  int maxAttemptsPerSample = 20;
};

/// Random points of M: Gaussian seeds pushed onto M by project_onto_M.
std::vector<PhasePoint> sample_M(const ConstraintSet& cs, const SamplerOptions& opts,
                                 const NewtonConfig& cfg = {});
/// Random points of Mp via project_onto_Mp_ambient.
std::vector<PhasePoint> sample_Mp(const HamiltonianSystem& sys, const ConstraintSet& cs,
                                  const SamplerOptions& opts, const NewtonConfig& cfg = {});

struct StructureReport {
  double maxBracketResidual = 0.0;
  double minNondegSingularValue = std::numeric_limits<double>::infinity();
  int samplesTested = 0;
  int nondegFailures = 0;  // Mp samples whose smallest singular value is ≤ nondegeneracyTol
  bool verdictCoisotropy = false;
  bool verdictNondegeneracy = false;
  double coisotropyTol = 1e-12;
  double nondegeneracyTol = 1e-8;

  std::string to_key_value() const;
};

/// Fills the coisotropy fields: max over samples and i<j of |{g_i, g_j}|.
void check_coisotropy(const ConstraintSet& cs, const std::vector<PhasePoint>& samples, double tol,
                      StructureReport& report);
StructureReport check_coisotropy(const ConstraintSet& cs, const SamplerOptions& opts,
                                 double tol = 1e-12, const NewtonConfig& cfg = {});

/// Fills the nondegeneracy fields from points of Mp.
void check_nondegeneracy(const HamiltonianSystem& sys, const ConstraintSet& cs,
                         const std::vector<PhasePoint>& samples, double tol, StructureReport& report);

}  // namespace coiso
