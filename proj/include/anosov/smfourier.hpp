#pragma once
// Functions on the unit circle bundle stored by vertical Fourier modes,
// the raising/lowering operators, the energy identity, alpha estimates,
// invariant distributions with prescribed modes and their products.
#include <Eigen/Dense>

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "anosov/automorphic.hpp"
#include "anosov/flow.hpp"
#include "anosov/geometry.hpp"

namespace anosov {

using Vec = Eigen::VectorXcd;

// Spatial representation of one vertical mode. Coefficient vectors are
// indexed by grid points (torus) or representation copies (octagon).
class Chart {
 public:
  virtual ~Chart() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;

  // mode k -> mode k+1 and mode k -> mode k-1
  virtual Vec eta_plus(int k, const Vec& h) const = 0;
  virtual Vec eta_minus(int k, const Vec& h) const = 0;
  virtual Vec mul_curvature(const Vec& h) const = 0;

  // (a, b) = sum_i w_i a_i conj(b_i) is the L2(SM) product of a e^{ik theta}, b e^{ik theta}
  const Eigen::VectorXd& weights() const { return w_; }

  // index sets preserved by both eta operators
  virtual std::vector<std::vector<std::size_t>> blocks() const;
  // whether coefficient i can be nonzero on mode k
  virtual bool allowed(int k, std::size_t i) const;

  // pointwise operations; only charts with point values provide them
  virtual Vec multiply(const Vec& a, const Vec& b) const;
  virtual double l1(const Vec& a) const;  // integral of |a| over SM

 protected:
  Eigen::VectorXd w_;
};

class TorusChart : public Chart {
 public:
  explicit TorusChart(ConformalTorus torus);
  std::string name() const override { return "conformal-torus"; }
  std::size_t dim() const override { return torus_.grid().size(); }
  Vec eta_plus(int k, const Vec& h) const override;
  Vec eta_minus(int k, const Vec& h) const override;
  Vec mul_curvature(const Vec& h) const override;
  Vec multiply(const Vec& a, const Vec& b) const override;
  double l1(const Vec& a) const override;

  const ConformalTorus& torus() const { return torus_; }
  const PeriodicGrid& grid() const { return torus_.grid(); }
  // grid samples of a function of (x, y)
  Vec sample(const std::function<cplx(double, double)>& f) const;
  // trigonometric interpolant at an arbitrary point
  cplx value(const Vec& a, double x, double y) const;
  // solves delbar g = F for mean-zero F; g has zero mean
  Vec solve_delbar(const Vec& F) const;

 private:
  ConformalTorus torus_;
  std::vector<double> K_;
};

// Octagon surface modelled through the decomposition of L2(SM) into
// irreducible pieces: one ladder per Laplace eigenvalue mu (all k),
// the constants (k = 0) and the holomorphic / antiholomorphic ladders
// starting at |k| = m. On each piece eta_+ e_k = a_k e_{k+1},
// eta_- e_{k+1} = -a_k e_k with a_k^2 = (mu + k(k+1))/4 and K = -1.
class RepresentationChart : public Chart {
 public:
  struct Component {
    enum Kind { principal, trivial, holomorphic, antiholomorphic } kind;
    double mu;  // Laplace eigenvalue, or -m(m-1) for the discrete ladders
    int m = 0;  // lowest |k| of a discrete ladder
  };
  explicit RepresentationChart(std::vector<Component> comps);
  // Laplace eigenvalues from a Ritz fit on the octagon; discrete ladders
  // up to m_max with multiplicity 2 (m = 1) and 2m - 1 (m >= 2)
  static RepresentationChart octagon(const OctagonSpectrum& spec, int n_eigen = 12,
                                     int m_max = 4);

  std::string name() const override { return "octagon-representation"; }
  std::size_t dim() const override { return comps_.size(); }
  Vec eta_plus(int k, const Vec& h) const override;
  Vec eta_minus(int k, const Vec& h) const override;
  Vec mul_curvature(const Vec& h) const override { return -h; }
  std::vector<std::vector<std::size_t>> blocks() const override;
  bool allowed(int k, std::size_t i) const override;

  const std::vector<Component>& components() const { return comps_; }
  double ladder(std::size_t i, int k) const;  // a_k of component i

 private:
  std::vector<Component> comps_;
};

struct SMField {
  const Chart* chart = nullptr;
  int N = 0;
  std::vector<Vec> modes;  // modes[k + N], |k| <= N

  SMField() = default;
  SMField(const Chart& c, int N);
  Vec& operator[](int k) { return modes.at(std::size_t(k + N)); }
  const Vec& operator[](int k) const { return modes.at(std::size_t(k + N)); }
  bool has(int k) const { return k >= -N && k <= N; }
  SMField padded(int N2) const;  // N2 >= N
};

SMField operator+(const SMField& a, const SMField& b);
SMField operator-(const SMField& a, const SMField& b);
SMField operator*(cplx s, const SMField& a);

Vec eta(const Chart& chart, int sign, int k, const Vec& h);

enum class FrameOp { X, Xperp, V };
SMField apply_frame(FrameOp op, const SMField& u);  // X and Xperp raise N by one
SMField apply_curvature(const SMField& u);

cplx inner(const SMField& a, const SMField& b);
double norm(const SMField& a);
double mode_norm(const SMField& a, int k);
// (sum_k <k>^{2s} ||u_k||^2)^{1/2}
double mixed_norm(const SMField& a, double s);
// keeps modes with |k| >= kmin
SMField project_high(const SMField& a, int kmin);

// random field with modes |k| <= N (octagon: every allowed coefficient;
// torus: spatial wavenumbers up to `band`, decaying amplitudes)
SMField random_field(const Chart& chart, int N, std::mt19937_64& rng, int band = 3,
                     int kmin = 0);

struct PestovTerms {
  double XVu2, KVuVu, Xu2, VXu2;
  double h1_norm2;
  double residual;  // |lhs| / h1_norm2
};
PestovTerms pestov_residual(const SMField& u);

struct StructureResiduals {
  double XV_minus_Xperp;  // ||[X,V]u - X_perp u|| / ||u||_{H1}
  double VXperp_minus_X;  // ||[V,X_perp]u - X u|| / ||u||_{H1}
  double XXperp_plus_KV;  // ||[X,X_perp]u + K V u|| / ||u||_{H1}
};
StructureResiduals structure_residuals(const SMField& u);

// max over modes of |<eta_+ a, b> + <a, eta_- b>| / (||a|| ||b||)
double adjoint_defect(const Chart& chart, int k, const Vec& a, const Vec& b);

// Smallest generalized eigenvalue of (||X psi||^2 - (K psi, psi), ||X psi||^2)
// over the span of the given fields; on the kernel of X the first form is
// minimized out (Schur complement). -inf if it is negative there.
double alpha_lower_bound(const std::vector<SMField>& basis);
// standard test space: unit coefficients (octagon) or plane waves with
// spatial wavenumbers up to band (torus) on modes |k| <= N
std::vector<SMField> alpha_test_space(const Chart& chart, int N, int band = 2);
// along a periodic curvature profile, psi a trigonometric polynomial of
// degree n_fourier in t; equals 1 - 1/beta_Ter up to discretization
double alpha_along_profile(const CurvatureProfile& profile, int n_fourier = 64);

struct LeastSquaresResult {
  SMField h;
  double residual = 0;      // ||A h - f|| on the equation modes
  double rel_residual = 0;  // divided by ||f|| (or equal to residual when f = 0)
  bool ok = false;
};

// Minimum-norm ridge solution of X V T h = f with h on modes |k| <= N;
// T keeps |k| >= m+1 when m >= 1 (identity when m = 0). Equations are
// imposed on modes |k| <= N-1. Blocks with at most dense_limit unknowns
// go through an SVD, larger ones through matrix-free CGLS.
LeastSquaresResult solve_adjoint_transport(const SMField& f, int m, int N, double reg = 1e-10,
                                           double tol = 1e-8, std::size_t dense_limit = 1500);

struct LadderEntry {
  int k;
  double residual;  // ||eta_+ w_{k-1} + eta_- w_{k+1}||
  bool boundary;    // affected by truncation
};
std::vector<LadderEntry> ladder_residual(const SMField& w);

enum class Variant { w0, w1, wm };
std::string to_string(Variant v);

struct ExtensionResult {
  SMField w, h;
  std::vector<LadderEntry> ladder;
  double interior_residual = 0;  // max over |k| <= N-2 of ||(Xw)_k|| / ||w||
  double prescribed_error = 0;   // ||w_j - data_j|| on the prescribed modes
  double odd_interior = 0;       // max ||w_k|| / ||w|| over odd interior k (w0)
  double data_defect = 0;        // how far the data is from satisfying its constraint
  double decay_slope = 0;        // fit of log ||w_k|| against log <k>
  double solver_residual = 0;
  bool ok = false;
};

// w0: data on mode 0, w = V h + f
// w1: data on modes +-1 with eta_- a_1 = 0 and eta_+ a_{-1} + eta_- a_1 = 0
// wm: data q on mode m with eta_- q = 0; w = V T h + q
ExtensionResult invariant_extension(Variant variant, const SMField& data, int N, int m = 1,
                                    double reg = 1e-10, double tol = 1e-6);

struct ProductResult {
  SMField w;
  std::vector<double> l1_ratio;  // k = 0..N
  double interior_residual = 0;  // max ||(Xw)_k|| / ||w|| over interior k
  int interior_max = 0;
};
// w_k = sum_{j=0}^k u_j v_{k-j} for fields with no negative modes. The
// interior is k <= min(N_u, N_v) - 2.
ProductResult fourier_product(const SMField& u, const SMField& v, double s = 1, double t = 1);

// u = c0 + c e^{-p lambda} e^{i p theta} + u_{p+2} with eta_- u_{p+2} = -eta_+ u_p,
// invariant on modes k <= p+1; padded to N modes
SMField torus_planted_invariant(const TorusChart& chart, int p, cplx c0, cplx c, int N);

struct QuantitativeReport {
  double lhs = 0;       // ||Qu||^2
  double rhs = 0;
  double slack = 0;     // lhs - rhs
  double coef_m1 = 0;   // 1 - m^2 + alpha (m+1)^2
  double coef_m = 0;    // 1 - (m-1)^2 + alpha m^2
  double q1_defect = 0; // | ||Pu||^2 - sum_{|k|<=m} k^2 ||(Xu)_k||^2 - ||Qu||^2 |
};
QuantitativeReport verify_quantitative_inequality(const SMField& u, int m, double alpha);

}  // namespace anosov
