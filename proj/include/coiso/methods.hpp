#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coiso/newton.hpp"
#include "coiso/phase.hpp"

namespace coiso {

enum class MethodKind { SymplecticEuler, StormerVerlet, ImplicitMidpoint };

using StepFn =
    std::function<PhasePoint(const HamiltonianSystem&, double h, const PhasePoint&, const NewtonConfig&)>;

/// An unconstrained one-step map Ψ_h approximating the flow of X_H.
struct OneStepMethod {
  std::string name;
  StepFn step;
  int order = 1;
  bool symmetric = false;
  bool symplectic = true;

  PhasePoint operator()(const HamiltonianSystem& sys, double h, const PhasePoint& z,
                        const NewtonConfig& cfg = {}) const {
    return step(sys, h, z, cfg);
  }
};

std::string_view method_name(MethodKind kind);
std::optional<MethodKind> parse_method(std::string_view name);
std::vector<std::string> method_names();

OneStepMethod make_method(MethodKind kind);

/// p1 = p0 − h H_q(q0, p1),  q1 = q0 + h H_p(q0, p1).
PhasePoint symplectic_euler_step(const HamiltonianSystem& sys, double h, const PhasePoint& z,
                                 const NewtonConfig& cfg = {});

/// Generalised leapfrog, implicit in p_{1/2} and q1 for non-separable H.
PhasePoint stormer_verlet_step(const HamiltonianSystem& sys, double h, const PhasePoint& z,
                               const NewtonConfig& cfg = {});

/// z' = z + h X_H((z + z')/2).
PhasePoint implicit_midpoint_step(const HamiltonianSystem& sys, double h, const PhasePoint& z,
                                  const NewtonConfig& cfg = {});

}  // namespace coiso
