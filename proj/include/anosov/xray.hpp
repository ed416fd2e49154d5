#pragma once
// Ray transform of symmetric tensors over closed geodesics, potential
// tensors dh = Xh and kernel (s-injectivity) experiments.
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "anosov/automorphic.hpp"
#include "anosov/smfourier.hpp"

namespace anosov {

// A symmetric tensor of some degree seen as a function on SM; evaluated
// at the (reduced) points stored in geodesic orbits.
struct TensorFunction {
  int degree = 0;
  bool potential = false;
  std::function<double(const UnitTangent&)> f;
  std::string id;
};

// periodic trapezoid rule over the orbit samples
double ray_transform(const TensorFunction& f, const ClosedGeodesic& g);
// integral of |f| along the geodesic, used to scale residuals
double ray_transform_abs(const TensorFunction& f, const ClosedGeodesic& g);

// Octagon tensors from invariant bumps: Phi s^j t^l, where s and t are the
// slopes of cosh d along v and along v rotated by +pi/2; degree j + l.
TensorFunction bump_tensor(const InvariantBumps& b, std::size_t i, int j, int l = 0);
// X(Phi s^j), a potential tensor of degree j + 1
TensorFunction bump_potential(const InvariantBumps& b, std::size_t i, int j);

// point values of an SMField on a torus chart, as a tensor of given degree
TensorFunction field_tensor(const TorusChart& chart, const SMField& u, int degree);

// X h for h supported on modes |k| <= m - 1
SMField potential_tensor(const SMField& h, int m);
// ||eta_+ a_{-1} + eta_- a_1|| for a degree one tensor
double solenoidal_check(const SMField& A);

std::vector<ClosedGeodesic> octagon_geodesic_pool(const FuchsianOctagon& oct, int max_len = 6,
                                                  int samples = 256);

// potential tensors centred at pot_idx, non-potential ones at other_idx
std::vector<TensorFunction> octagon_tensor_basis(const InvariantBumps& b, int m,
                                                 const std::vector<std::size_t>& pot_idx,
                                                 const std::vector<std::size_t>& other_idx);

struct SInjectivityReport {
  std::size_t pool_size = 0, n_basis = 0;
  bool underdetermined = false;
  std::vector<double> sigma;     // singular values of the column-normalized matrix
  double sigma_min = 0;          // smallest, relative to the largest
  double sigma_gap = 0;          // smallest relative value above the threshold
  int kernel_dim = 0;
  double non_potential_residual = 0;  // worst kernel vector, distance to the potential span
  int potential_count = 0;
};

// G[g, j] = I(f_j)(g); kernel from singular values below threshold * max;
// kernel vectors compared with the potential span at sampled SM points.
SInjectivityReport sinjectivity_experiment(const std::vector<ClosedGeodesic>& pool,
                                           const std::vector<TensorFunction>& basis,
                                           const std::function<UnitTangent(std::mt19937_64&)>& sampler,
                                           double threshold = 1e-6, int n_samples = 2000,
                                           unsigned long long seed = 1, int workers = 1);

}  // namespace anosov
