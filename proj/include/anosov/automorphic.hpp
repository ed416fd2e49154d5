#pragma once
// Smooth functions on the octagon surface built by summing Gaussian
// bumps over all group translates of a center, plus the Laplace
// spectrum of the surface from a Rayleigh-Ritz fit in that basis.
#include <Eigen/Dense>

#include <vector>

#include "anosov/geometry.hpp"

namespace anosov {

// Local data of u = cosh d(z, q) at a disk point.
struct DistanceJet {
  double u;       // cosh of the distance
  double ux, uy;  // Euclidean gradient
};
DistanceJet distance_jet(cplx z, cplx q);

class InvariantBumps {
 public:
  // Phi(u) = exp(-kappa (u - 1)) summed over translates of each center.
  InvariantBumps(const FuchsianOctagon& oct, std::vector<cplx> centers, double kappa);

  std::size_t size() const { return centers_.size(); }
  double kappa() const { return kappa_; }
  const std::vector<cplx>& centers() const { return centers_; }

  // Arguments are points of the closed octagon (already reduced).
  double value(std::size_t i, cplx z) const;
  double laplacian(std::size_t i, cplx z) const;
  // Phi(u) s^j where s = <v, grad u> for the unit vector at angle theta;
  // a symmetric j-tensor restricted to the unit circle bundle
  double tensor(std::size_t i, int j, cplx z, double theta) const;
  // Phi s^j t^l with t = <v_perp, grad u>, v_perp = v rotated by +pi/2
  double mixed_tensor(std::size_t i, int j, int l, cplx z, double theta) const;
  // derivative of tensor() along the geodesic flow
  double tensor_flow_derivative(std::size_t i, int j, cplx z, double theta) const;

  // same, for an arbitrary disk point (reduced internally)
  double tensor_any(std::size_t i, int j, cplx z, double theta) const;
  double tensor_flow_derivative_any(std::size_t i, int j, cplx z, double theta) const;

  std::size_t translates(std::size_t i) const { return orbits_[i].size(); }

 private:
  const FuchsianOctagon* oct_;
  std::vector<cplx> centers_;
  double kappa_;
  std::vector<std::vector<cplx>> orbits_;
};

// Eigenfunctions of the Laplacian on the octagon surface, fitted in
// the span of the constant function and InvariantBumps.
class OctagonSpectrum {
 public:
  OctagonSpectrum(const FuchsianOctagon& oct, int rings = 3, double kappa = 2.0,
                  int quad = 20);

  // eigenvalues of -Laplacian, ascending; entry 0 is the constant mode
  const std::vector<double>& eigenvalues() const { return mu_; }
  double area() const { return area_; }
  // L2-normalized eigenfunction j at a reduced point
  double eigenfunction(std::size_t j, cplx z) const;
  double eigenfunction_any(std::size_t j, cplx z) const;
  const InvariantBumps& basis() const { return bumps_; }
  // max over eigenpairs of ||(-Lap - mu) f|| / mu on the quadrature grid
  double residual(std::size_t count) const;

 private:
  const FuchsianOctagon* oct_;
  InvariantBumps bumps_;
  FuchsianOctagon::Quadrature quad_;
  double area_ = 0;
  std::vector<double> mu_;
  Eigen::MatrixXd coef_;  // rows: constant + bumps, columns: eigenpairs
};

// Symmetric eigenpairs of A x = mu B x restricted to the range of B
// (directions with B-eigenvalue below rel_tol * max are dropped).
// Returns eigenvalues ascending; vectors are B-orthonormal. With
// condense_kernel, A is first minimized over ker B (Schur complement), so
// the values are the critical ratios over the whole space.
void deflated_generalized_eigen(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                double rel_tol, Eigen::VectorXd& values,
                                Eigen::MatrixXd& vectors, bool condense_kernel = false);

}  // namespace anosov
