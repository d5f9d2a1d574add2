#include "coiso/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace coiso {

HopfPoint hopf_map(const PhasePoint& z) {
  if (z.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "hopf_map: needs d = 2");
  const std::complex<double> z0(z[0], z[2]);
  const std::complex<double> z1(z[1], z[3]);
  return {2.0 * z0 * std::conj(z1), std::norm(z0) - std::norm(z1)};
}

std::complex<double> stereographic(const HopfPoint& w) {
  const double radius = std::sqrt(std::norm(w.zeta) + w.r * w.r);
  const double denom = radius - w.r;
  if (!(denom > 1e-14 * std::max(1.0, radius))) {
    throw Error(ErrorKind::InvalidArgument, "stereographic: point is the north pole");
  }
  return w.zeta / denom;
}

double orbit_distance_hopf_free(const PhasePoint& z0, const PhasePoint& z) {
  if (z0.dim() != 2 || z.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "orbit_distance: needs d = 2");
  const Vec q0 = z0.q();
  const Vec p0 = z0.p();
  const Vec zv = z.vec();
  auto orbit = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    Vec w(4);
    w << c * q0[0] - s * q0[1], s * q0[0] + c * q0[1], c * p0[0] - s * p0[1], s * p0[0] + c * p0[1];
    return w;
  };
  auto tangent = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    Vec w(4);
    w << -s * q0[0] - c * q0[1], c * q0[0] - s * q0[1], -s * p0[0] - c * p0[1], c * p0[0] - s * p0[1];
    return w;
  };
  auto dist = [&](double th) { return (zv - orbit(th)).norm(); };
  auto slope = [&](double th) { return -2.0 * (zv - orbit(th)).dot(tangent(th)); };

  constexpr int kGrid = 4096;
  const double dth = 2.0 * M_PI / kGrid;
  int best = 0;
  double bestDist = dist(0.0);
  for (int k = 1; k < kGrid; ++k) {
    const double d = dist(k * dth);
    if (d < bestDist) {
      bestDist = d;
      best = k;
    }
  }

  double a = (best - 1) * dth;
  double b = (best + 1) * dth;
  double sa = slope(a);
  if ((sa < 0.0) != (slope(b) < 0.0)) {
    for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
      const double mid = 0.5 * (a + b);
      const double sm = slope(mid);
      if ((sm < 0.0) == (sa < 0.0)) {
        a = mid;
        sa = sm;
      } else {
        b = mid;
      }
    }
    bestDist = std::min(bestDist, dist(0.5 * (a + b)));
  }
  return bestDist;
}

OrderEstimate estimate_order(const BuiltinProblem& problem, const PhasePoint& z0, Mode mode,
                             const OneStepMethod& method, const std::vector<double>& hList, double T,
                             const NewtonConfig& cfg) {
  if (hList.empty()) throw Error(ErrorKind::InvalidArgument, "estimate_order: empty h list");
  if (!(T > 0.0)) throw Error(ErrorKind::InvalidArgument, "estimate_order: T must be positive");
  for (std::size_t i = 0; i < hList.size(); ++i) {
    if (!(hList[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "estimate_order: h must be positive");
    if (i > 0 && !(hList[i] < hList[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "estimate_order: h list must be strictly descending");
    }
  }
  auto step_count = [T](double h) {
    const double n = std::round(T / h);
    if (n < 1.0 || std::abs(n * h - T) > 1e-9 * T) {
      std::ostringstream os;
      os << "estimate_order: T = " << T << " is not an integer multiple of h = " << h;
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
    return static_cast<std::size_t>(n);
  };

  const double hRef = hList.back() / 64.0;
  const OneStepMethod midpoint = make_method(MethodKind::ImplicitMidpoint);
  auto run = [&](const OneStepMethod& m, double h) -> Vec {
    try {
      const Trajectory tr =
          integrate(problem.system, problem.constraints, m, mode, h, step_count(h), z0, cfg);
      return tr.records.back().output().vec();
    } catch (const Error& e) {
      std::ostringstream os;
      os << "estimate_order: trajectory with h = " << h << " failed: " << e.what();
      throw Error(e.kind(), os.str());
    }
  };

  std::vector<std::size_t> counts;
  for (double h : hList) counts.push_back(step_count(h));

  auto refFuture = std::async(std::launch::async, run, std::cref(midpoint), hRef);
  std::vector<std::future<Vec>> sweep;
  for (double h : hList) sweep.push_back(std::async(std::launch::async, run, std::cref(method), h));
  const Vec ref = refFuture.get();

  OrderEstimate out;
  out.referenceStep = hRef;
  out.h = hList;
  std::vector<double> lx, ly;
  const double floor = 100.0 * cfg.tol;
  for (std::size_t i = 0; i < hList.size(); ++i) {
    const double err = (sweep[i].get() - ref).norm();
    out.errors.push_back(err);
    if (err > floor) {
      lx.push_back(std::log(hList[i]));
      ly.push_back(std::log(err));
    }
  }
  if (lx.size() < 2) {
    out.saturated = true;
    out.slope = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  out.slope = sxy / sxx;
  return out;
}

SymplecticityResult symplecticity_residual(const StepMap& step, const HamiltonianSystem& sys,
                                           const ConstraintSet& cs, const PhasePoint& z, double fdStep,
                                           TangentSpace space) {
  if (!(fdStep > 0.0)) throw Error(ErrorKind::InvalidArgument, "symplecticity_residual: fdStep must be > 0");
  const std::vector<TangentVector> basis =
      space == TangentSpace::Mp ? tangent_basis_Mp(sys, cs, z) : tangent_basis_M(cs, z);

  std::vector<TangentVector> images;
  images.reserve(basis.size());
  for (const TangentVector& u : basis) {
    const Vec plus = step(PhasePoint(Vec(z.vec() + fdStep * u.vec()))).vec();
    const Vec minus = step(PhasePoint(Vec(z.vec() - fdStep * u.vec()))).vec();
    images.emplace_back(Vec((plus - minus) / (2.0 * fdStep)));
  }

  SymplecticityResult out;
  out.fdStep = fdStep;
  out.basisSize = static_cast<int>(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      const double r = std::abs(omega(images[i], images[j]) - omega(basis[i], basis[j]));
      out.residual = std::max(out.residual, r);
    }
  }
  return out;
}

EnergyDrift energy_drift(const std::vector<double>& energy) {
  if (energy.empty()) throw Error(ErrorKind::InvalidArgument, "energy_drift: empty series");
  EnergyDrift out;
  for (double e : energy) out.maxDeviation = std::max(out.maxDeviation, std::abs(e - energy.front()));
  const std::size_t n = energy.size();
  if (n < 2) return out;

  const double mk = 0.5 * static_cast<double>(n - 1);
  double me = 0.0;
  for (double e : energy) me += e / static_cast<double>(n);
  double skk = 0.0, ske = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    skk += (k - mk) * (k - mk);
    ske += (k - mk) * (energy[k] - me);
  }
  out.linearSlope = ske / skk;
  if (n > 2) {
    const double intercept = me - out.linearSlope * mk;
    double sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = energy[k] - (intercept + out.linearSlope * static_cast<double>(k));
      sse += r * r;
    }
    out.slopeStdErr = std::sqrt(sse / static_cast<double>(n - 2) / skk);
  }
  return out;
}

EnergyDrift energy_drift(const Trajectory& traj) {
  std::vector<double> energy;
  energy.reserve(traj.records.size());
  for (const StepRecord& r : traj.records) energy.push_back(r.energy);
  return energy_drift(energy);
}

FiberScan fiber_criticality_scan(const HamiltonianSystem& sys, const PhasePoint& z, int n, double tangencyTol) {
  if (n < 8) throw Error(ErrorKind::InvalidArgument, "fiber_criticality_scan: need at least 8 samples");
  FiberScan out;
  out.theta.reserve(n);
  out.derivative.reserve(n);
  const Vec q = z.q();
  const Vec p = z.p();
  double peak = 0.0;
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * M_PI * k / n;
    const double c = std::cos(th), s = std::sin(th);
    const PhasePoint zt(Vec(c * q + s * p), Vec(-s * q + c * p));
    // d/dθ of (q(θ), p(θ)) is (p(θ), −q(θ)).
    const Covector dH = sys.grad(zt);
    const double v = dH.q().dot(zt.p()) - dH.p().dot(zt.q());
    out.theta.push_back(th);
    out.derivative.push_back(v);
    peak = std::max(peak, std::abs(v));
  }
  const double scale = 1.0 + std::abs(sys.H(z)) + z.vec().squaredNorm();
  if (peak <= 1e-12 * scale) {
    out.identicallyZero = true;
    return out;
  }

  const auto& v = out.derivative;
  auto at = [&](int k) { return v[static_cast<std::size_t>((k % n + n) % n)]; };
  for (int k = 0; k < n; ++k) {
    const double a = at(k), b = at(k + 1);
    if (a == 0.0) continue;  // handled by the tangency/sign rule below
    if ((a < 0.0) != (b < 0.0) && b != 0.0) ++out.crossings;
  }
  for (int k = 0; k < n; ++k) {
    const double prev = at(k - 1), cur = at(k), next = at(k + 1);
    if (cur == 0.0) {
      // Exact zero at a sample: a crossing if the neighbours differ in sign, a tangency otherwise.
      ++out.crossings;
      continue;
    }
    const bool localMin = std::abs(cur) <= std::abs(prev) && std::abs(cur) < std::abs(next);
    const bool sameSign = (prev < 0.0) == (cur < 0.0) && (next < 0.0) == (cur < 0.0);
    if (localMin && sameSign && std::abs(cur) <= tangencyTol * peak) ++out.crossings;
  }
  return out;
}

}  // namespace coiso
