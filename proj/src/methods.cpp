#include "coiso/methods.hpp"

#include <algorithm>
#include <array>

namespace coiso {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Inner stages are solved down to roundoff relative to the state magnitude.
NewtonConfig inner_config(const NewtonConfig& cfg, const Vec& z, const Vec& rate, double h) {
  NewtonConfig inner = cfg;
  const double scale = 1.0 + z.lpNorm<Eigen::Infinity>() + std::abs(h) * rate.lpNorm<Eigen::Infinity>();
  inner.tol = std::max(cfg.innerTol, 8.0 * kEps * scale);
  return inner;
}

constexpr std::array<std::pair<MethodKind, std::string_view>, 3> kNames{{
    {MethodKind::SymplecticEuler, "symplectic-euler"},
    {MethodKind::StormerVerlet, "stormer-verlet"},
    {MethodKind::ImplicitMidpoint, "implicit-midpoint"},
}};

}  // namespace

std::string_view method_name(MethodKind kind) {
  for (const auto& [k, n] : kNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

std::optional<MethodKind> parse_method(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::vector<std::string> method_names() {
  std::vector<std::string> out;
  for (const auto& entry : kNames) out.emplace_back(entry.second);
  return out;
}

OneStepMethod make_method(MethodKind kind) {
  switch (kind) {
    case MethodKind::SymplecticEuler:
      return {std::string(method_name(kind)), symplectic_euler_step, 1, false, true};
    case MethodKind::StormerVerlet:
      return {std::string(method_name(kind)), stormer_verlet_step, 2, true, true};
    case MethodKind::ImplicitMidpoint:
      return {std::string(method_name(kind)), implicit_midpoint_step, 2, true, true};
  }
  throw Error(ErrorKind::InvalidArgument, "make_method: unknown method kind");
}

PhasePoint symplectic_euler_step(const HamiltonianSystem& sys, double h, const PhasePoint& z,
                                 const NewtonConfig& cfg) {
  const int d = z.dim();
  const Vec q0 = z.q();
  const Vec p0 = z.p();
  auto grad_at = [&](const Vec& p) { return sys.grad(PhasePoint(q0, p)).vec(); };

  const Vec g0 = grad_at(p0);
  const Vec seed = p0 - h * g0.head(d);
  VecFn F = [&](const Vec& p1) -> Vec { return p1 - p0 + h * grad_at(p1).head(d); };
  JacFn J = [&](const Vec& p1) -> Mat {
    const Mat Hz = sys.hess(PhasePoint(q0, p1));
    return Mat::Identity(d, d) + h * Hz.topRightCorner(d, d);
  };
  const Vec p1 = newton_solve(F, seed, J, inner_config(cfg, z.vec(), g0, h)).x;
  const Vec q1 = q0 + h * grad_at(p1).tail(d);
  return PhasePoint(q1, p1);
}

PhasePoint stormer_verlet_step(const HamiltonianSystem& sys, double h, const PhasePoint& z,
                               const NewtonConfig& cfg) {
  const int d = z.dim();
  const Vec q0 = z.q();
  const Vec p0 = z.p();
  auto grad_at = [&](const Vec& q, const Vec& p) { return sys.grad(PhasePoint(q, p)).vec(); };
  const Vec g0 = grad_at(q0, p0);
  const NewtonConfig inner = inner_config(cfg, z.vec(), g0, h);

  // p_{1/2} = p0 − (h/2) H_q(q0, p_{1/2})
  VecFn F1 = [&](const Vec& ph) -> Vec { return ph - p0 + 0.5 * h * grad_at(q0, ph).head(d); };
  JacFn J1 = [&](const Vec& ph) -> Mat {
    return Mat::Identity(d, d) + 0.5 * h * sys.hess(PhasePoint(q0, ph)).topRightCorner(d, d);
  };
  const Vec ph = newton_solve(F1, Vec(p0 - 0.5 * h * g0.head(d)), J1, inner).x;

  // q1 = q0 + (h/2)(H_p(q0, p_{1/2}) + H_p(q1, p_{1/2}))
  const Vec hp0 = grad_at(q0, ph).tail(d);
  VecFn F2 = [&](const Vec& q1) -> Vec {
    return q1 - q0 - 0.5 * h * (hp0 + grad_at(q1, ph).tail(d));
  };
  JacFn J2 = [&](const Vec& q1) -> Mat {
    return Mat::Identity(d, d) - 0.5 * h * sys.hess(PhasePoint(q1, ph)).bottomLeftCorner(d, d);
  };
  const Vec q1 = newton_solve(F2, Vec(q0 + h * hp0), J2, inner).x;

  const Vec p1 = ph - 0.5 * h * grad_at(q1, ph).head(d);
  return PhasePoint(q1, p1);
}

PhasePoint implicit_midpoint_step(const HamiltonianSystem& sys, double h, const PhasePoint& z,
                                  const NewtonConfig& cfg) {
  const int d = z.dim();
  const Vec& z0 = z.vec();
  const Mat Jc = structure_matrix(d);
  const Vec x0 = hamiltonian_vector_field(sys, z).vec();

  VecFn F = [&](const Vec& z1) -> Vec {
    const PhasePoint mid(Vec(0.5 * (z0 + z1)));
    return z1 - z0 - h * (Jc * sys.grad(mid).vec());
  };
  JacFn J = [&](const Vec& z1) -> Mat {
    const PhasePoint mid(Vec(0.5 * (z0 + z1)));
    return Mat::Identity(2 * d, 2 * d) - 0.5 * h * Jc * sys.hess(mid);
  };
  const Vec z1 = newton_solve(F, Vec(z0 + h * x0), J, inner_config(cfg, z0, x0, h)).x;
  return PhasePoint(z1);
}

}  // namespace coiso
