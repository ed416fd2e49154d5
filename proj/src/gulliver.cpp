#include "anosov/gulliver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace anosov {

namespace {
const double kHalfPi = M_PI / 2;
const double kCapAngle = M_PI / (2 * M_SQRT2);  // pi / (2 sqrt 2)
}  // namespace

std::vector<std::string> validate(const GulliverParams& p) {
  std::vector<std::string> bad;
  if (!(p.b > 0)) bad.push_back("b > 0");
  if (!(p.b * p.r1 < kHalfPi)) bad.push_back("b r1 < pi/2");
  if (!(p.r2 > 0 && p.r2 < p.r1)) bad.push_back("0 < r2 < r1");
  if (!(p.eps > 0 && p.eps < p.r1 - p.r2)) bad.push_back("0 < eps < r1 - r2");
  if (!(p.b * (p.r1 + p.eps) < kHalfPi)) bad.push_back("b (r1 + eps) < pi/2");
  if (std::abs(p.r3 - (p.r1 + p.eps)) > 1e-12 * std::max(1.0, p.r3)) bad.push_back("r3 = r1 + eps");
  if (std::abs(p.Rp - (p.R + p.r2 - p.r3)) > 1e-12 * std::max(1.0, p.R)) bad.push_back("R' = R + r2 - r3");
  if (p.b > 0) {
    // one ulp in r2 moves sinh by cosh(r1 - r2) ulp(r2)
    const double lhs = std::sin(p.b * p.r1) / p.b, rhs = std::sinh(p.r1 - p.r2);
    if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, std::cosh(p.r1 - p.r2) * std::max(1.0, p.r2)))
      bad.push_back("sin(b r1)/b = sinh(r1 - r2)");
  }
  return bad;
}

double solve_r2(double b, double r1) {
  if (!(b > 0) || !(r1 > 0) || !(b * r1 < kHalfPi))
    throw std::domain_error("solve_r2: need 0 < b r1 < pi/2");
  const double target = std::sin(b * r1) / b;
  // sinh(r1 - r2) decreases in r2, from sinh(r1) > target down to 0
  double lo = 0, hi = r1;
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (std::sinh(r1 - mid) > target) lo = mid;
    else hi = mid;
  }
  const double flo = std::abs(std::sinh(r1 - lo) - target);
  const double fhi = std::abs(std::sinh(r1 - hi) - target);
  return flo <= fhi ? lo : hi;
}

Feasibility feasibility(const GulliverParams& p, double beta) {
  Feasibility f;
  f.caps_below_two = p.b * (p.r1 - p.eps) > kCapAngle;
  if (beta == 0) {
    // y'' = 0 has no conjugate points
    f.cond1 = f.cond2 = true;
    f.margin1 = kHalfPi;
    f.margin2 = 0;
    return f;
  }
  const double sb = std::sqrt(beta);
  const double ph = sb * p.b * p.r3;
  f.margin1 = kHalfPi - ph;
  f.cond1 = f.margin1 > 0;
  f.margin2 = std::tanh(sb * p.Rp) - (f.cond1 ? p.b * std::tan(ph) : INFINITY);
  f.cond2 = f.cond1 && f.margin2 > 0;
  return f;
}

GulliverParams search_params(double beta_target, double shrink) {
  if (!(beta_target > 1.5 && beta_target < 2))
    throw std::domain_error("search_params: beta_target must lie in (3/2, 2)");
  const double sb = std::sqrt(beta_target);
  double b = 0.1, delta = 0.1;
  auto cond34 = [&](double bb, double dd) {
    const double ph = sb * (kCapAngle + 2 * bb * dd);
    return ph < kHalfPi && bb * std::tan(ph) < 0.5;
  };
  int guard = 0;
  while (!cond34(b, delta)) {
    b *= shrink;
    delta *= shrink;
    if (++guard > 200) throw std::runtime_error("search_params: no feasible (b, delta)");
  }
  GulliverParams p;
  p.beta_target = beta_target;
  p.b = b;
  p.delta = delta;
  p.eps = 0.5 * delta;
  p.r1 = kCapAngle / b + delta;
  p.r2 = solve_r2(b, p.r1);
  p.r3 = p.r1 + p.eps;
  p.R = 1;
  for (guard = 0;; ++guard) {
    p.Rp = p.R + p.r2 - p.r3;
    if (p.Rp > 0 && std::tanh(sb * p.Rp) > 0.5 && feasibility(p, beta_target).feasible()) break;
    if (guard > 200) throw std::runtime_error("search_params: R growth failed");
    p.R *= 2;
  }
  return p;
}

CurvatureProfile synth_profile(const GulliverParams& p, double dt) {
  const double cap = 2 * p.r3, P = cap + p.Rp;
  const auto n = std::size_t(std::max(2.0, std::round(P / dt)));
  CurvatureProfile prof;
  prof.dt = P / double(n);
  prof.periodic = true;
  prof.K.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    prof.K[i] = prof.dt * double(i) < cap ? p.b * p.b : -1.0;
  char buf[96];
  std::snprintf(buf, sizeof buf, "extremal:b=%.6g,R'=%.6g", p.b, p.Rp);
  prof.id = buf;
  return prof;
}

GulliverRun gulliver_certify(double beta_target, const TerminatorOptions& opt, double dt) {
  GulliverRun run;
  run.params = search_params(beta_target);
  run.feasibility = feasibility(run.params, beta_target);
  const double P = 2 * run.params.r3 + run.params.Rp;
  TerminatorOptions o = opt;
  o.T_max = std::max(opt.T_max, 4 * P);
  run.T_max = o.T_max;
  run.dt = std::max(dt, P / 2e5);
  run.certificate = terminator_bisect({synth_profile(run.params, run.dt)}, o);
  return run;
}

double periodic_terminator_estimate(const CurvatureProfile& profile, double beta_max,
                                    double tol) {
  if (!profile.periodic) throw std::invalid_argument("periodic_terminator_estimate: aperiodic");
  const int n = int(profile.K.size());
  if (n < 3) throw std::invalid_argument("periodic_terminator_estimate: profile too short");
  const double ih2 = 1 / (profile.dt * profile.dt);
  // -y'' - beta K y >= 0 on periodic functions iff no conjugate points on the line
  auto nonneg = [&](double beta) {
    std::vector<Eigen::Triplet<double>> tr;
    for (int i = 0; i < n; ++i) {
      // small shift keeps the constant-curvature-zero case definite
      tr.emplace_back(i, i, 2 * ih2 - beta * profile.K[std::size_t(i)] + 1e-12);
      tr.emplace_back(i, (i + 1) % n, -ih2);
      tr.emplace_back(i, (i + n - 1) % n, -ih2);
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(tr.begin(), tr.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) return false;
    return (ldlt.vectorD().array() > 0).all();
  };
  if (nonneg(beta_max)) return INFINITY;
  double lo = 0, hi = beta_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (nonneg(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace anosov
