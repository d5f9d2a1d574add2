#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "coiso/errors.hpp"

namespace coiso {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A vector of R^{2d} stored as (q, p) halves. The tag keeps points, tangent
/// vectors and covectors apart at compile time while sharing one layout.
template <class Tag>
class Canonical {
 public:
  Canonical() = default;

  explicit Canonical(Vec z) : z_(std::move(z)) {
    if (z_.size() < 2 || z_.size() % 2 != 0) {
      throw Error(ErrorKind::DimensionMismatch,
                  "canonical vector needs even length >= 2, got " +
                      std::to_string(z_.size()));
    }
    if (!z_.allFinite()) {
      throw Error(ErrorKind::NonFinite, "canonical vector has non-finite entries");
    }
  }

  Canonical(const Vec& q, const Vec& p) : Canonical(stack(q, p)) {}

  static Canonical zero(int d) { return Canonical(Vec::Zero(2 * d)); }

  int dim() const { return static_cast<int>(z_.size() / 2); }

  auto q() const { return z_.head(dim()); }
  auto p() const { return z_.tail(dim()); }

  const Vec& vec() const { return z_; }

  double operator[](Eigen::Index i) const { return z_[i]; }

 private:
  static Vec stack(const Vec& q, const Vec& p) {
    if (q.size() != p.size()) {
      throw Error(ErrorKind::DimensionMismatch, "q and p have different lengths");
    }
    Vec z(q.size() + p.size());
    z << q, p;
    return z;
  }

  Vec z_;
};

using PhasePoint = Canonical<struct PhasePointTag>;
using TangentVector = Canonical<struct TangentVectorTag>;
using Covector = Canonical<struct CovectorTag>;

using ScalarFn = std::function<double(const PhasePoint&)>;
using GradientFn = std::function<Covector(const PhasePoint&)>;
using HessianFn = std::function<Mat(const PhasePoint&)>;

inline double cbrt_eps() {
  static const double v = std::cbrt(std::numeric_limits<double>::epsilon());
  return v;
}

/// Energy function with its derivatives. Missing derivatives are replaced by
/// central differences.
struct HamiltonianSystem {
  int d = 1;
  ScalarFn energy;
  std::optional<GradientFn> gradient;
  std::optional<HessianFn> hessian;

  double H(const PhasePoint& z) const { return energy(z); }
  Covector grad(const PhasePoint& z) const;
  Mat hess(const PhasePoint& z) const;
  bool has_analytic_hessian() const { return hessian.has_value(); }
};

/// ω(u, v) = Σ u.dq·v.dp − u.dp·v.dq.
double omega(const TangentVector& u, const TangentVector& v);

/// X_f = (∂f/∂p, −∂f/∂q), so that ι_{X_f} ω = df.
TangentVector hamiltonian_vector_field(const Covector& df);
TangentVector hamiltonian_vector_field(const HamiltonianSystem& sys, const PhasePoint& z);

/// {f, h} = f_q·h_p − f_p·h_q = ω(X_f, X_h).
double poisson_bracket(const Covector& df, const Covector& dh);

/// Canonical structure matrix J with J·∇f = X_f.
Mat structure_matrix(int d);

/// Central-difference gradient, step scale·max(1, |z_i|).
Covector grad_fd(const ScalarFn& f, const PhasePoint& z, double scale = cbrt_eps());

/// Central-difference Jacobian of a gradient, symmetrised.
Mat hessian_fd(const GradientFn& grad, const PhasePoint& z, double scale = cbrt_eps());

/// Largest relative deviation between the supplied gradient and central
/// differences of the energy over `samples` Gaussian probe points.
double gradient_consistency(const HamiltonianSystem& sys, int samples, unsigned seed = 0);

/// Throws InvalidArgument when gradient_consistency exceeds `tol`.
void check_gradient(const HamiltonianSystem& sys, double tol = 1e-5, int samples = 16,
                    unsigned seed = 0);

inline TangentVector as_tangent(const Vec& v) { return TangentVector(v); }
inline PhasePoint as_point(const Vec& v) { return PhasePoint(v); }

}  // namespace coiso
