#include "coiso/newton.hpp"

#include <algorithm>
#include <sstream>

namespace coiso {

void NewtonConfig::validate() const {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "NewtonConfig: tol must be > 0");
  if (maxIter < 1) throw Error(ErrorKind::InvalidArgument, "NewtonConfig: maxIter must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "NewtonConfig: damping must lie in (0, 1]");
  }
  if (!(fdScale > 0.0)) throw Error(ErrorKind::InvalidArgument, "NewtonConfig: fdScale must be > 0");
  if (!(innerTol > 0.0)) throw Error(ErrorKind::InvalidArgument, "NewtonConfig: innerTol must be > 0");
}

Mat jacobian_fd(const VecFn& F, const Vec& x, const Vec& Fx, double scale) {
  Mat J(Fx.size(), x.size());
  Vec probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = scale * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + step;
    J.col(j) = (F(probe) - Fx) / step;
    probe[j] = x[j];
  }
  return J;
}

namespace {

double norm_inf(const Vec& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

Vec solve_checked(const Mat& J, const Vec& rhs, const NewtonConfig& cfg) {
  if (!J.allFinite()) throw Error(ErrorKind::NonFinite, "newton_solve: non-finite Jacobian");
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  const double smin = s.size() ? s[s.size() - 1] : 0.0;
  if (smax == 0.0 || smin == 0.0 || smax / smin > cfg.maxCondition) {
    std::ostringstream os;
    os << "newton_solve: singular Jacobian (sigma_max=" << smax << ", sigma_min=" << smin << ")";
    throw Error(ErrorKind::SingularJacobian, os.str());
  }
  return svd.solve(rhs);
}

}  // namespace

NewtonResult newton_solve(const VecFn& F, const Vec& x0, const std::optional<JacFn>& jac,
                          const NewtonConfig& cfg) {
  Vec x = x0;
  Vec Fx = F(x);
  if (!Fx.allFinite()) throw Error(ErrorKind::NonFinite, "newton_solve: non-finite residual at x0");
  double res = norm_inf(Fx);
  for (int it = 0; it < cfg.maxIter; ++it) {
    if (res <= cfg.tol) return {x, it, res};
    const Mat J = jac ? (*jac)(x) : jacobian_fd(F, x, Fx, cfg.fdScale);
    const Vec dx = solve_checked(J, -Fx, cfg);

    double alpha = cfg.damping;
    const double floor = cfg.damping / 64.0;
    Vec xt;
    Vec Ft;
    double rt = 0.0;
    for (;;) {
      xt = x + alpha * dx;
      Ft = F(xt);
      rt = Ft.allFinite() ? norm_inf(Ft) : std::numeric_limits<double>::infinity();
      if (rt < res || alpha <= floor) break;
      alpha *= 0.5;
    }
    if (!std::isfinite(rt)) throw Error(ErrorKind::NonFinite, "newton_solve: residual became non-finite");
    x = std::move(xt);
    Fx = std::move(Ft);
    res = rt;
  }
  if (res <= cfg.tol) return {x, cfg.maxIter, res};
  std::ostringstream os;
  os << "newton_solve: no convergence after " << cfg.maxIter << " iterations (residual " << res
     << ", tol " << cfg.tol << ")";
  throw Error(ErrorKind::NonConvergence, os.str());
}

}  // namespace coiso
