#pragma once
// Geodesic flow on the unit tangent bundle, closed geodesics on tori and
// curvature profiles along orbits.
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "anosov/geometry.hpp"

namespace anosov {

struct GeodesicOrbit {
  std::vector<double> t;
  std::vector<UnitTangent> samples;
  double dt = 0;
};

// Curvature K(t) along a unit-speed geodesic at spacing dt. A periodic
// profile holds one period (K(t + n dt) = K(t)).
struct CurvatureProfile {
  std::vector<double> K;
  double dt = 0.01;
  bool periodic = false;
  std::string id;

  double length() const { return dt * double(K.size()); }
  // value at t (piecewise linear, wraps when periodic)
  double at(double t) const;
  static CurvatureProfile constant(double K0, double length, double dt, bool periodic = true);
  static CurvatureProfile from_function(const std::function<double(double)>& f, double length,
                                        double dt, bool periodic);
};

// vector field of the flow in a conformal chart
void geodesic_rhs(const LambdaJet& j, double theta, double out[3]);

// Fixed-step RK4 (exact steps on the octagon). Positions are reduced to
// the fundamental domain; constant curvature charts are switched by an
// isometry when a point drifts towards the chart's singular set.
GeodesicOrbit integrate_geodesic(const SurfaceModel& model, UnitTangent start, double T,
                                 double dt);

// one flow step of length h without any wrapping or chart change
UnitTangent flow_step(const SurfaceModel& model, UnitTangent s, double h);

struct ClosedGeodesicSearch {
  bool converged = false;
  ClosedGeodesic geodesic;
  double residual = 0;
  int iterations = 0;
  std::string message;
};

// shooting with damped Newton on the return map of a torus
ClosedGeodesicSearch find_closed_geodesics(const ConformalTorus& torus, int p, int q,
                                           double tol = 1e-10, int samples = 256,
                                           double dt = 1e-3, int max_iter = 50);

CurvatureProfile curvature_profile_along(const SurfaceModel& model, const ClosedGeodesic& geo,
                                         double dt = 0.01);
CurvatureProfile curvature_profile_along(const SurfaceModel& model, const GeodesicOrbit& orbit);

double max_abs_curvature_along(const SurfaceModel& model, UnitTangent start, double T_window,
                               double dt = 0.01);

UnitTangent random_unit_tangent(const SurfaceModel& model, std::mt19937_64& rng);

struct TrappingReport {
  bool trapped = false;      // some sampled orbit kept |K| below the floor
  double min_max_abs_K = 0;  // over sampled orbits
  int n_dir = 0;
  double T_window = 0;
  double kappa_floor = 0;
  std::string note;
};

// finite-window surrogate for an orbit trapped where K = 0
TrappingReport trapping_surrogate(const SurfaceModel& model, int n_dir = 256,
                                  double T_window = 50, double kappa_floor = 1e-4,
                                  unsigned long long seed = 1, int workers = 1,
                                  double dt = 0.01);

// CSV rows "t,x,y,theta,K" (header included)
std::string orbit_csv(const SurfaceModel& model, const GeodesicOrbit& orbit);
// CSV rows "t,K" (header included)
std::string profile_csv(const CurvatureProfile& profile);

// Runs f(i) for i in [0, n) on up to `workers` threads.
void parallel_for(int n, int workers, const std::function<void(int)>& f);

}  // namespace anosov
