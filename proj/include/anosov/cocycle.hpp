#pragma once
// The beta-Jacobi cocycle y'' + beta K(t) y = 0 along curvature profiles:
// conjugate points, Riccati (Hopf) solutions, hyperbolicity, terminator
// brackets and the Anosov verdict for a surface.
#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anosov/flow.hpp"

namespace anosov {

struct JacobiSolution {
  std::vector<double> t, y, yd;
};

// samples on the profile grid starting at time t0
JacobiSolution integrate_beta_jacobi(const CurvatureProfile& profile, double beta, double y0,
                                     double yd0, double T, double t0 = 0);

// Psi_T, mapping (y(t0), y'(t0)) to (y(t0+T), y'(t0+T))
Eigen::Matrix2d cocycle_matrix(const CurvatureProfile& profile, double beta, double T,
                               double t0 = 0);

// first zero in (0, T_max] of the solution with y(t0) = 0, y'(t0) = 1
std::optional<double> first_conjugate_time(const CurvatureProfile& profile, double beta,
                                           double T_max, double t0 = 0);

struct ConjugatePointError : std::runtime_error {
  double time;
  ConjugatePointError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
};

// r' = -r^2 - beta K from r(t0) = r0 to t1 (either direction). r0 may be
// infinite; near poles the reciprocal s = 1/r is integrated instead.
struct RiccatiPath {
  std::vector<double> t, r;
  bool blew_up = false;
  double blowup_time = 0;
};
RiccatiPath riccati_integrate(const CurvatureProfile& profile, double beta, double t0, double r0,
                              double t1);

struct HopfPair {
  std::vector<double> t, r_plus, r_minus;
  double R_used = 0;
  double gap_min = 0;
};

// Throws ConjugatePointError when either solution blows up.
HopfPair riccati_hopf(const CurvatureProfile& profile, double beta, double R,
                      double cap = 1e6);

enum class Hyperbolicity { hyperbolic, not_hyperbolic, inconclusive };
std::string to_string(Hyperbolicity h);

struct HyperbolicityReport {
  Hyperbolicity verdict = Hyperbolicity::inconclusive;
  double gap_R = 0, gap_2R = 0, gap_4R = 0;
  double growth_rate = 0;  // log|Psi_T xi| / T for a probe xi
};

HyperbolicityReport hyperbolicity_test(const CurvatureProfile& profile, double beta,
                                       double gap_tol = 1e-4, double R = 40);

struct ConjugateRecord {
  double beta = 0;
  std::string profile;         // first profile (with phase) showing a conjugate point
  std::optional<double> time;  // none when every tested start was free
};

struct TerminatorCertificate {
  double beta_lo = 0, beta_hi = 0;
  bool exceeds_beta_max = false;
  double beta_max = 64;
  std::vector<std::string> profiles;
  std::vector<ConjugateRecord> evidence;
};

struct TerminatorOptions {
  double beta_max = 64;
  double tol = 1e-3;
  double T_max = 400;
  int phases = 16;  // start times per periodic profile
  int workers = 1;
};

// whether beta is conjugate-point free for every profile and start phase
ConjugateRecord conjugate_scan(const std::vector<CurvatureProfile>& profiles, double beta,
                               const TerminatorOptions& opt);

TerminatorCertificate terminator_bisect(const std::vector<CurvatureProfile>& profiles,
                                        const TerminatorOptions& opt = {});

struct ComparisonResult {
  bool precondition_ok = true;  // r0 stayed finite on [0, t0]
  bool holds = true;
  double min_difference = 0;    // min over t of r1 - r0
};

// Riccati comparison with unit beta: K1 <= K0 and w1 >= w0 should give r1 >= r0
ComparisonResult comparison_oracle(const CurvatureProfile& K0, const CurvatureProfile& K1,
                                   double w0, double w1, double t0, double tol = 1e-8);

struct VerdictOptions {
  int n_dir = 256;
  double T_window = 50;
  double kappa_floor = 1e-4;
  int n_closed = 24;
  int n_random = 8;
  double random_length = 50;
  double dt = 0.01;
  unsigned long long seed = 1;
  TerminatorOptions terminator;
};

struct AnosovReport {
  std::string verdict;  // "Anosov-consistent", "not-Anosov" or "inconclusive"
  TrappingReport trapping;
  TerminatorCertificate certificate;
  std::vector<std::string> notes;
};

AnosovReport anosov_verdict(const SurfaceModel& model, const VerdictOptions& opt = {});

// profile pool used by the verdict: closed geodesics plus long random orbits
std::vector<CurvatureProfile> sample_profiles(const SurfaceModel& model,
                                              const VerdictOptions& opt);

}  // namespace anosov
