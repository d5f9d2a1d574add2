#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coiso/constraints.hpp"
#include "coiso/fiber.hpp"
#include "coiso/methods.hpp"

namespace coiso {

enum class Mode { Shake, Rattle };

std::string_view mode_name(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

struct LaunchResult {
  Vec mu;              // fiber parameter of the launch point, μ = hλ
  PhasePoint zPlus;    // Φ(μ, z)
  PhasePoint landing;  // Ψ_h(zPlus), on M
  int iterations = 0;
};

/// Slides z along its fiber to zPlus so that Ψ_h(zPlus) lies on M. The
/// residual g(Ψ_h(Φ(μ, z)))/h is solved in μ, so its Jacobian tends to the
/// nondegeneracy matrix as h → 0.
LaunchResult launch(const HamiltonianSystem& sys, const ConstraintSet& cs, const OneStepMethod& method,
                    double h, const PhasePoint& z, const NewtonConfig& cfg = {});

struct StepRecord {
  std::size_t index = 0;
  PhasePoint zMinus;               // SHAKE output z_k⁻
  std::optional<PhasePoint> z;     // RATTLE output z_k
  Vec lambda;                      // launch multipliers, scaled form μ = hλ
  Vec sigma;                       // projection multipliers
  double gResidual = 0.0;          // |g|∞ of the step output
  double rhoResidual = 0.0;        // |ρ|∞ of the step output
  double energy = 0.0;             // H of the step output

  /// The point the step hands to the next step: z in RATTLE, z⁻ in SHAKE.
  const PhasePoint& output() const { return z ? *z : zMinus; }
};

StepRecord shake_step(const HamiltonianSystem& sys, const ConstraintSet& cs, const OneStepMethod& method,
                      double h, const PhasePoint& z, const NewtonConfig& cfg = {});

struct Projection {
  Vec sigma;
  PhasePoint zProj;
  int iterations = 0;
};

/// Fiber projection P onto Mp: solves ρ(Φ(σ, z)) = 0 for σ.
Projection project_to_hidden(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z,
                             const NewtonConfig& cfg = {});

/// project_onto_M followed by project_to_hidden, with no distance limit. Used
/// to move reference data that sits near, but not on, Mp.
PhasePoint carry_to_Mp(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z,
                       const NewtonConfig& cfg = {});

/// R_h = P ∘ S_h.
StepRecord rattle_step(const HamiltonianSystem& sys, const ConstraintSet& cs, const OneStepMethod& method,
                       double h, const PhasePoint& z, const NewtonConfig& cfg = {});

struct Trajectory {
  std::vector<StepRecord> records;
  double h = 0.0;
  Mode mode = Mode::Rattle;
  std::string method;
  std::vector<std::string> warnings;
};

struct IntegrateOptions {
  MembershipTol membership{};
  double autoProjectTol = 1e-6;  // initial data farther than this from M / Mp is rejected
};

/// Iterates SHAKE or RATTLE `steps` times from z0. Record 0 holds the
/// (possibly auto-projected) initial point. Failures surface as StepFailed.
Trajectory integrate(const HamiltonianSystem& sys, const ConstraintSet& cs, const OneStepMethod& method,
                     Mode mode, double h, std::size_t steps, const PhasePoint& z0, const NewtonConfig& cfg = {},
                     const IntegrateOptions& opts = {});

}  // namespace coiso
