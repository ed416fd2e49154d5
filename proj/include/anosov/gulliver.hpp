#pragma once
// Example family with a positively curved cap (K = b^2) surrounded by
// K = -1 collars: parameter feasibility, the extremal curvature profile
// and certified terminator windows below 2.
#include <string>
#include <vector>

#include "anosov/cocycle.hpp"

namespace anosov {

struct GulliverParams {
  double b = 0;
  double r1 = 0, r2 = 0, r3 = 0;
  double eps = 0, delta = 0;
  double R = 0;
  double Rp = 0;  // R + r2 - r3, shortest passage through the K = -1 part
  double beta_target = 0;
};

// violated invariants, empty when the parameters are consistent
std::vector<std::string> validate(const GulliverParams& p);

// root of sin(b r1)/b = sinh(r1 - r2) in (0, r1)
double solve_r2(double b, double r1);

struct Feasibility {
  bool cond1 = false, cond2 = false;
  double margin1 = 0;  // pi/2 - sqrt(beta) b r3
  double margin2 = 0;  // tanh(sqrt(beta) R') - b tan(sqrt(beta) b r3)
  bool feasible() const { return cond1 && cond2; }
  // b (r1 - eps) > pi/(2 sqrt 2): forces a conjugate point at beta = 2
  bool caps_below_two = false;
};

Feasibility feasibility(const GulliverParams& p, double beta);

// geometric shrink on (b, delta), then growth of R
GulliverParams search_params(double beta_target, double shrink = 0.5);

// period 2 r3 + R': K = b^2 on [0, 2 r3), K = -1 after
CurvatureProfile synth_profile(const GulliverParams& p, double dt = 0.01);

struct GulliverRun {
  GulliverParams params;
  Feasibility feasibility;
  TerminatorCertificate certificate;
  double dt = 0, T_max = 0;  // profile step and search window actually used
};

// search window at least four periods of the profile, step at most period / 2e5
GulliverRun gulliver_certify(double beta_target, const TerminatorOptions& opt = {},
                             double dt = 0.01);

// terminator value of a periodic profile from the ground state of the
// Hill operator -d^2/dt^2 - beta K; an eigenvalue based cross-check
double periodic_terminator_estimate(const CurvatureProfile& profile, double beta_max = 64,
                                    double tol = 1e-6);

}  // namespace anosov
