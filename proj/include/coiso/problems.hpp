#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coiso/constraints.hpp"

namespace coiso {

struct ProblemParams {
  Vec gv = (Vec(2) << 0.0, -1.0).finished();  // gravity vector of hopf-gravity
};

struct BuiltinProblem {
  std::string name;
  HamiltonianSystem system;
  ConstraintSet constraints;
  std::function<bool(const PhasePoint&)> knownMpTest;
  std::optional<std::function<PhasePoint(const PhasePoint& z0, double t)>> exactSolution;
  PhasePoint defaultInitial;
  double nondegRejectBelow = 0.0;  // sampler filter for structure checks
  bool hopfType = false;           // d = 2 with circular fibers
};

std::vector<std::string> problem_names();

/// Builtins: pendulum, hopf-free, hopf-gravity, index1-model, degenerate-index5.
BuiltinProblem builtin_problem(const std::string& name, const ProblemParams& params = {});

/// Coisotropy over `mSamples` points of M and nondegeneracy over `mpSamples`
/// points of Mp, both drawn with `seed`. Mp samples honour nondegRejectBelow.
StructureReport analyse_structure(const BuiltinProblem& problem, int mSamples = 256, int mpSamples = 64,
                                  unsigned seed = 0, const NewtonConfig& cfg = {});

/// z_a, z_b, z_c on Mp of hopf-gravity with gv = (0, −1).
std::array<PhasePoint, 3> table1_initial_conditions();

/// Exact flow of hopf-free from z0 ∈ Mp: simultaneous rotation of q and p by
/// t/(α − 1/α), with the sign of α = ±|p0|/|q0| chosen so that q̇(0) = (1 + λ)p0.
PhasePoint hopf_exact_solution(const PhasePoint& z0, double t);

/// Sign of α selected by hopf_exact_solution for z0 (+1 or −1).
int hopf_alpha_sign(const PhasePoint& z0);

}  // namespace coiso
