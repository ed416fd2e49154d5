#pragma once
// Surface models: conformal tori, constant curvature charts and the
// regular genus-2 octagon group acting on the Poincare disk.
#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "anosov/periodic.hpp"

namespace anosov {

struct UnitTangent {
  double x = 0, y = 0;
  double theta = 0;  // angle of the velocity against d/dx
};

double wrap_angle(double theta);  // into [0, 2pi)

// Derivatives of the log-conformal factor at a point.
struct LambdaJet {
  double l = 0, lx = 0, ly = 0, lxx = 0, lxy = 0, lyy = 0;
};

// Metric e^{2 lambda}(dx^2+dy^2) on [0,Lx)x[0,Ly) with lambda sampled on
// a periodic grid. Off-grid values use the trigonometric interpolant.
class ConformalTorus {
 public:
  ConformalTorus(const PeriodicGrid& grid, std::vector<double> lambda);
  static ConformalTorus flat(int nx, int ny, double Lx, double Ly);
  static ConformalTorus from_function(int nx, int ny, double Lx, double Ly,
                                      const std::function<double(double, double)>& f);

  const PeriodicGrid& grid() const { return grid_; }
  const std::vector<double>& lambda() const { return lambda_; }
  std::vector<double> curvature() const;  // on the grid

  LambdaJet jet(double x, double y) const;
  double curvature_at(double x, double y) const;
  void wrap(double& x, double& y) const;
  bool is_flat() const;

  // same surface resampled on another grid
  ConformalTorus resampled(int nx, int ny) const;

 private:
  struct Term {
    double kx, ky;  // angular wavenumbers
    cplx c;         // coefficient of exp(i(kx x + ky y))
  };
  PeriodicGrid grid_;
  std::vector<double> lambda_;
  std::vector<Term> terms_;
};

// Constant curvature K0 in the conformal chart e^{lambda} = 2/(1+K0|z|^2).
struct ConstantCurvature {
  double K0 = 0;
  LambdaJet jet(double x, double y) const;
};

using Mobius = Eigen::Matrix2cd;  // SU(1,1), acts on the unit disk

cplx mobius_apply(const Mobius& g, cplx z);
cplx mobius_derivative(const Mobius& g, cplx z);
double disk_lambda(cplx z);                 // log(2/(1-|z|^2))
double cosh_distance(cplx z, cplx w);       // in the disk
// unit-speed disk geodesic through p with direction angle theta
cplx disk_geodesic_point(cplx p, double theta, double t);
double disk_geodesic_angle(cplx p, double theta, double t);

// The Fuchsian group of the regular octagon with vertex angles pi/4 and
// opposite sides paired. Generator k translates towards side k; the
// generators k and k+4 are mutually inverse.
class FuchsianOctagon {
 public:
  FuchsianOctagon();

  const std::array<Eigen::Matrix2d, 8>& generators() const { return real_; }
  const std::array<Mobius, 8>& disk_generators() const { return disk_; }

  double side_radius() const { return rho_side_; }      // Euclidean, to side midpoints
  double vertex_radius() const { return rho_vertex_; }  // Euclidean
  double side_distance() const { return d_side_; }      // hyperbolic
  double vertex_distance() const { return d_vertex_; }  // hyperbolic

  bool contains(cplx z, double tol = 1e-12) const;

  struct Reduced {
    cplx z;
    Mobius g;  // g(input) = z
    int steps = 0;
  };
  Reduced reduce(cplx z, int max_steps = 10000) const;

  // defining relation word over generator indices; evaluates to +-identity
  static std::vector<int> relation();
  Mobius word_matrix(const std::vector<int>& word) const;
  Eigen::Matrix2d word_matrix_real(const std::vector<int>& word) const;

  // all group elements with d(g0, 0) <= R
  std::vector<Mobius> ball(double R) const;

  // hyperbolic-area quadrature over the octagon (16 right triangles)
  struct Quadrature {
    std::vector<cplx> z;
    std::vector<double> w;
  };
  Quadrature quadrature(int n) const;

 private:
  std::array<Eigen::Matrix2d, 8> real_;
  std::array<Mobius, 8> disk_;
  double d_side_, d_vertex_, rho_side_, rho_vertex_;
  double arc_center_, arc_radius_;  // circle of side 0
};

using SurfaceModel = std::variant<ConformalTorus, ConstantCurvature, FuchsianOctagon>;

double curvature_at(const SurfaceModel& model, double x, double y);
FuchsianOctagon build_octagon();

struct ClosedGeodesic {
  std::vector<UnitTangent> orbit;  // uniform samples t = i*T/n, i < n
  double T = 0;
  std::string source;              // "torus-shooting" or "octagon-word"
  std::vector<int> word;
  double closure_residual = 0;
};

// Axis of the word's matrix; none when |trace| <= 2.
std::optional<ClosedGeodesic> closed_geodesic_from_word(const FuchsianOctagon& oct,
                                                        const std::vector<int>& word,
                                                        int samples = 256);
double word_length(const FuchsianOctagon& oct, const std::vector<int>& word);

// Reduced words up to max_len, one representative per trace value.
std::vector<std::vector<int>> octagon_word_pool(const FuchsianOctagon& oct, int max_len,
                                                double trace_tol = 1e-8);

// Returns (reduced point, element) with element(p) = reduced point.
std::pair<cplx, Mobius> reduce_to_fundamental_domain(const FuchsianOctagon& oct, cplx p);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace anosov
