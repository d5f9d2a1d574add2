#include "coiso/phase.hpp"

#include <algorithm>
#include <random>

namespace coiso {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::RankDeficiency: return "RankDeficiency";
    case ErrorKind::SamplerFailure: return "SamplerFailure";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidInitialData: return "InvalidInitialData";
    case ErrorKind::ToleranceViolation: return "ToleranceViolation";
  }
  return "Unknown";
}

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": dimension " + std::to_string(a) + " vs " +
                    std::to_string(b));
  }
}

}  // namespace

Covector HamiltonianSystem::grad(const PhasePoint& z) const {
  require_same_dim(z.dim(), d, "HamiltonianSystem::grad");
  if (gradient) return (*gradient)(z);
  return grad_fd(energy, z);
}

Mat HamiltonianSystem::hess(const PhasePoint& z) const {
  require_same_dim(z.dim(), d, "HamiltonianSystem::hess");
  if (hessian) return (*hessian)(z);
  if (gradient) return hessian_fd(*gradient, z);
  // Both derivatives by differencing: the inner gradient uses the wider step.
  GradientFn inner = [this](const PhasePoint& x) {
    return grad_fd(energy, x, std::pow(std::numeric_limits<double>::epsilon(), 0.25));
  };
  return hessian_fd(inner, z, std::pow(std::numeric_limits<double>::epsilon(), 0.25));
}

double omega(const TangentVector& u, const TangentVector& v) {
  require_same_dim(u.dim(), v.dim(), "omega");
  return u.q().dot(v.p()) - u.p().dot(v.q());
}

TangentVector hamiltonian_vector_field(const Covector& df) {
  return TangentVector(Vec(df.p()), Vec(-df.q()));
}

TangentVector hamiltonian_vector_field(const HamiltonianSystem& sys, const PhasePoint& z) {
  return hamiltonian_vector_field(sys.grad(z));
}

double poisson_bracket(const Covector& df, const Covector& dh) {
  require_same_dim(df.dim(), dh.dim(), "poisson_bracket");
  return df.q().dot(dh.p()) - df.p().dot(dh.q());
}

Mat structure_matrix(int d) {
  Mat J = Mat::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d).setIdentity();
  J.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
  return J;
}

Covector grad_fd(const ScalarFn& f, const PhasePoint& z, double scale) {
  const Vec& x = z.vec();
  Vec g(x.size());
  Vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = scale * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + step;
    const double fp = f(PhasePoint(probe));
    probe[i] = x[i] - step;
    const double fm = f(PhasePoint(probe));
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw Error(ErrorKind::NonFinite, "grad_fd: non-finite function value at probe point");
    }
    g[i] = (fp - fm) / (2.0 * step);
  }
  return Covector(g);
}

Mat hessian_fd(const GradientFn& grad, const PhasePoint& z, double scale) {
  const Vec& x = z.vec();
  const Eigen::Index n = x.size();
  Mat Hm(n, n);
  Vec probe = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = scale * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + step;
    const Vec gp = grad(PhasePoint(probe)).vec();
    probe[j] = x[j] - step;
    const Vec gm = grad(PhasePoint(probe)).vec();
    probe[j] = x[j];
    Hm.col(j) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (Hm + Hm.transpose());
}

double gradient_consistency(const HamiltonianSystem& sys, int samples, unsigned seed) {
  if (!sys.gradient) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec x(2 * sys.d);
    for (auto& xi : x) xi = normal(rng);
    const PhasePoint z(x);
    const Vec analytic = (*sys.gradient)(z).vec();
    const Vec numeric = grad_fd(sys.energy, z).vec();
    const double denom = std::max(1.0, analytic.lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (analytic - numeric).lpNorm<Eigen::Infinity>() / denom);
  }
  return worst;
}

void check_gradient(const HamiltonianSystem& sys, double tol, int samples, unsigned seed) {
  const double err = gradient_consistency(sys, samples, seed);
  if (err > tol) {
    throw Error(ErrorKind::InvalidArgument,
                "gradient disagrees with finite differences of the energy (relative error " +
                    std::to_string(err) + ")");
  }
}

}  // namespace coiso
