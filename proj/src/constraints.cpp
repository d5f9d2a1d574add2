#include "coiso/constraints.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace coiso {

namespace {

void require_dim(const ConstraintSet& cs, const PhasePoint& z) {
  if (z.dim() != cs.d) {
    throw Error(ErrorKind::DimensionMismatch, "constraint set of dimension " + std::to_string(cs.d) +
                                                  " evaluated at a point of dimension " +
                                                  std::to_string(z.dim()));
  }
}

Mat jacobian_central(const std::function<Vec(const Vec&)>& f, const Vec& x, double scale) {
  Vec probe = x;
  Mat J;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = scale * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + step;
    const Vec fp = f(probe);
    probe[j] = x[j] - step;
    const Vec fm = f(probe);
    probe[j] = x[j];
    if (j == 0) J.resize(fp.size(), x.size());
    J.col(j) = (fp - fm) / (2.0 * step);
  }
  return J;
}

const double kQuarterEps = std::pow(std::numeric_limits<double>::epsilon(), 0.25);

}  // namespace

Vec ConstraintSet::value(const PhasePoint& z) const {
  require_dim(*this, z);
  Vec v = g(z);
  if (v.size() != m) {
    throw Error(ErrorKind::DimensionMismatch, "constraint function returned " + std::to_string(v.size()) +
                                                  " values, expected " + std::to_string(m));
  }
  return v;
}

Mat ConstraintSet::jac(const PhasePoint& z) const {
  require_dim(*this, z);
  if (jacobian) return (*jacobian)(z);
  return jacobian_central([this](const Vec& x) { return g(PhasePoint(x)); }, z.vec(), cbrt_eps());
}

std::vector<Mat> ConstraintSet::hess(const PhasePoint& z) const {
  require_dim(*this, z);
  if (hessians) return (*hessians)(z);
  std::vector<Mat> out;
  out.reserve(m);
  for (int i = 0; i < m; ++i) {
    GradientFn gi = [this, i](const PhasePoint& x) { return Covector(Vec(jac(x).row(i).transpose())); };
    out.push_back(hessian_fd(gi, z, jacobian ? cbrt_eps() : kQuarterEps));
  }
  return out;
}

Mat ConstraintSet::fields(const PhasePoint& z) const {
  return structure_matrix(d) * jac(z).transpose();
}

Vec constraint_residual(const ConstraintSet& cs, const PhasePoint& z) { return cs.value(z); }

Vec hidden_residual(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z) {
  const Mat G = cs.jac(z);
  const Vec xh = hamiltonian_vector_field(sys, z).vec();
  return G * xh;
}

Mat hidden_gradient(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z) {
  require_dim(cs, z);
  if (sys.hessian && cs.hessians && cs.jacobian) {
    // ∇(∇g_i^T J ∇H) = Hg_i J ∇H − HH J ∇g_i
    const Mat J = structure_matrix(cs.d);
    const Vec gH = sys.grad(z).vec();
    const Mat HH = sys.hess(z);
    const Mat G = cs.jac(z);
    const std::vector<Mat> Hg = cs.hess(z);
    Mat out(cs.m, 2 * cs.d);
    for (int i = 0; i < cs.m; ++i) {
      out.row(i) = (Hg[i] * (J * gH) - HH * (J * G.row(i).transpose())).transpose();
    }
    return out;
  }
  const bool analytic_first = sys.gradient.has_value() && cs.jacobian.has_value();
  return jacobian_central([&](const Vec& x) { return hidden_residual(sys, cs, PhasePoint(x)); }, z.vec(),
                          analytic_first ? cbrt_eps() : kQuarterEps);
}

Mat constraint_brackets(const ConstraintSet& cs, const PhasePoint& z) {
  const Mat G = cs.jac(z);
  return G * structure_matrix(cs.d) * G.transpose();
}

Mat nondegeneracy_matrix(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z) {
  return hidden_gradient(sys, cs, z) * cs.fields(z);
}

double relative_nondegeneracy(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z) {
  const Mat R = hidden_gradient(sys, cs, z);
  const Mat X = cs.fields(z);
  const double scale = R.rowwise().norm().maxCoeff() * X.colwise().norm().maxCoeff();
  if (!(scale > 0.0)) return 0.0;
  const Mat Mn = R * X;
  Eigen::JacobiSVD<Mat> svd(Mn);
  return svd.singularValues()[Mn.rows() - 1] / scale;
}

double max_abs(const Vec& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

bool on_M(const ConstraintSet& cs, const PhasePoint& z, double tol) { return max_abs(cs.value(z)) <= tol; }

bool on_Mp(const HamiltonianSystem& sys, const ConstraintSet& cs, const PhasePoint& z, MembershipTol tol) {
  return max_abs(cs.value(z)) <= tol.g && max_abs(hidden_residual(sys, cs, z)) <= tol.rho;
}

namespace {

// Minimum-norm Gauss–Newton: z ← z − Aᵀ(AAᵀ)⁻¹ r.
PhasePoint gauss_newton(const std::function<Vec(const PhasePoint&)>& residual,
                        const std::function<Mat(const PhasePoint&)>& rows, const PhasePoint& z0,
                        const NewtonConfig& cfg, const char* who) {
  Vec z = z0.vec();
  for (int it = 0; it <= cfg.maxIter; ++it) {
    const PhasePoint pz(z);
    const Vec r = residual(pz);
    const double res = max_abs(r);
    if (res <= cfg.tol) return pz;
    if (it == cfg.maxIter) break;
    const Mat A = rows(pz);
    const Mat AAt = A * A.transpose();
    Eigen::JacobiSVD<Mat> svd(AAt, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s[0] == 0.0 || s[s.size() - 1] / s[0] < 1e-24) {
      throw Error(ErrorKind::RankDeficiency, std::string(who) + ": constraint rows are dependent");
    }
    z -= A.transpose() * svd.solve(r);
  }
  throw Error(ErrorKind::NonConvergence, std::string(who) + ": Gauss-Newton did not converge");
}

}  // namespace

PhasePoint project_onto_M(const ConstraintSet& cs, const PhasePoint& z0, const NewtonConfig& cfg) {
  return gauss_newton([&](const PhasePoint& z) { return cs.value(z); },
                      [&](const PhasePoint& z) { return cs.jac(z); }, z0, cfg, "project_onto_M");
}

PhasePoint project_onto_Mp_ambient(const HamiltonianSystem& sys, const ConstraintSet& cs,
                                   const PhasePoint& z0, const NewtonConfig& cfg) {
  auto residual = [&](const PhasePoint& z) {
    Vec r(2 * cs.m);
    r << cs.value(z), hidden_residual(sys, cs, z);
    return r;
  };
  auto rows = [&](const PhasePoint& z) {
    Mat A(2 * cs.m, 2 * cs.d);
    A << cs.jac(z), hidden_gradient(sys, cs, z);
    return A;
  };
  return gauss_newton(residual, rows, z0, cfg, "project_onto_Mp_ambient");
}

namespace {

std::vector<TangentVector> null_space(const Mat& A, int expected_rank, const char* who) {
  const Eigen::Index n = A.cols();
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s.size() < expected_rank || s[0] == 0.0 || s[expected_rank - 1] / s[0] < 1e-10) {
    throw Error(ErrorKind::RankDeficiency, std::string(who) + ": stacked constraint rows are rank deficient");
  }
  std::vector<TangentVector> basis;
  for (Eigen::Index j = expected_rank; j < n; ++j) basis.emplace_back(Vec(svd.matrixV().col(j)));
  return basis;
}

}  // namespace

std::vector<TangentVector> tangent_basis_M(const ConstraintSet& cs, const PhasePoint& z) {
  return null_space(cs.jac(z), cs.m, "tangent_basis_M");
}

std::vector<TangentVector> tangent_basis_Mp(const HamiltonianSystem& sys, const ConstraintSet& cs,
                                            const PhasePoint& z) {
  Mat A(2 * cs.m, 2 * cs.d);
  A << cs.jac(z), hidden_gradient(sys, cs, z);
  auto basis = null_space(A, 2 * cs.m, "tangent_basis_Mp");
  if (relative_nondegeneracy(sys, cs, z) <= 1e-10) {
    throw Error(ErrorKind::RankDeficiency,
                "tangent_basis_Mp: nondegeneracy matrix is singular, Mp is not symplectic here");
  }
  if (!basis.empty()) {
    const auto k = static_cast<Eigen::Index>(basis.size());
    Mat gram(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) gram(i, j) = omega(basis[i], basis[j]);
    Eigen::JacobiSVD<Mat> svd(gram);
    if (svd.singularValues()[k - 1] <= 1e-10) {
      throw Error(ErrorKind::RankDeficiency, "tangent_basis_Mp: omega is degenerate on the tangent space");
    }
  }
  return basis;
}

namespace {

template <class Project, class Accept>
std::vector<PhasePoint> sample_points(int d, const SamplerOptions& opts, Project project, Accept accept,
                                      const char* who) {
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, opts.spread);
  std::vector<PhasePoint> out;
  out.reserve(opts.n);
  const long budget = static_cast<long>(opts.n) * opts.maxAttemptsPerSample;
  for (long attempt = 0; attempt < budget && static_cast<int>(out.size()) < opts.n; ++attempt) {
    Vec x(2 * d);
    for (auto& xi : x) xi = normal(rng);
    try {
      PhasePoint z = project(PhasePoint(x));
      if (accept(z)) out.push_back(std::move(z));
    } catch (const Error&) {
      // seed outside the Newton basin; draw another
    }
  }
  if (static_cast<int>(out.size()) < opts.n) {
    throw Error(ErrorKind::SamplerFailure, std::string(who) + ": found only " + std::to_string(out.size()) +
                                               " of " + std::to_string(opts.n) + " points");
  }
  return out;
}

}  // namespace

std::vector<PhasePoint> sample_M(const ConstraintSet& cs, const SamplerOptions& opts, const NewtonConfig& cfg) {
  return sample_points(
      cs.d, opts, [&](const PhasePoint& z) { return project_onto_M(cs, z, cfg); },
      [](const PhasePoint&) { return true; }, "sample_M");
}

std::vector<PhasePoint> sample_Mp(const HamiltonianSystem& sys, const ConstraintSet& cs,
                                  const SamplerOptions& opts, const NewtonConfig& cfg) {
  return sample_points(
      cs.d, opts, [&](const PhasePoint& z) { return project_onto_Mp_ambient(sys, cs, z, cfg); },
      [&](const PhasePoint& z) {
        if (opts.rejectNondegBelow <= 0.0) return true;
        Eigen::JacobiSVD<Mat> svd(nondegeneracy_matrix(sys, cs, z));
        return svd.singularValues()[cs.m - 1] >= opts.rejectNondegBelow;
      },
      "sample_Mp");
}

void check_coisotropy(const ConstraintSet& cs, const std::vector<PhasePoint>& samples, double tol,
                      StructureReport& report) {
  double worst = 0.0;
  for (const auto& z : samples) {
    const Mat B = constraint_brackets(cs, z);
    for (int i = 0; i < cs.m; ++i)
      for (int j = i + 1; j < cs.m; ++j) worst = std::max(worst, std::abs(B(i, j)));
  }
  report.maxBracketResidual = worst;
  report.coisotropyTol = tol;
  report.samplesTested = std::max(report.samplesTested, static_cast<int>(samples.size()));
  report.verdictCoisotropy = worst <= tol;
}

StructureReport check_coisotropy(const ConstraintSet& cs, const SamplerOptions& opts, double tol,
                                 const NewtonConfig& cfg) {
  StructureReport report;
  check_coisotropy(cs, sample_M(cs, opts, cfg), tol, report);
  return report;
}

void check_nondegeneracy(const HamiltonianSystem& sys, const ConstraintSet& cs,
                         const std::vector<PhasePoint>& samples, double tol, StructureReport& report) {
  double smallest = std::numeric_limits<double>::infinity();
  int failures = 0;
  for (const auto& z : samples) {
    Eigen::JacobiSVD<Mat> svd(nondegeneracy_matrix(sys, cs, z));
    const double s = svd.singularValues()[cs.m - 1];
    smallest = std::min(smallest, s);
    if (!(s > tol)) ++failures;
  }
  report.minNondegSingularValue = smallest;
  report.nondegFailures = failures;
  report.nondegeneracyTol = tol;
  report.samplesTested = std::max(report.samplesTested, static_cast<int>(samples.size()));
  report.verdictNondegeneracy = !samples.empty() && smallest > tol;
}

std::string StructureReport::to_key_value() const {
  std::ostringstream os;
  os.precision(17);
  os << "maxBracketResidual=" << maxBracketResidual << '\n'
     << "minNondegSingularValue=" << minNondegSingularValue << '\n'
     << "samplesTested=" << samplesTested << '\n'
     << "nondegFailures=" << nondegFailures << '\n'
     << "verdictCoisotropy=" << (verdictCoisotropy ? "true" : "false") << '\n'
     << "verdictNondegeneracy=" << (verdictNondegeneracy ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace coiso
