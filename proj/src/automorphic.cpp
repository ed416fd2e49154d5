#include "anosov/automorphic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace anosov {

DistanceJet distance_jet(cplx z, cplx q) {
  const double A = std::norm(z - q);
  const double bz = 1 - std::norm(z), bq = 1 - std::norm(q);
  const double B = bz * bq;
  DistanceJet j;
  j.u = 1 + 2 * A / B;
  const double dx = z.real() - q.real(), dy = z.imag() - q.imag();
  j.ux = 4 * (dx * B + A * z.real() * bq) / (B * B);
  j.uy = 4 * (dy * B + A * z.imag() * bq) / (B * B);
  return j;
}

InvariantBumps::InvariantBumps(const FuchsianOctagon& oct, std::vector<cplx> centers,
                               double kappa)
    : oct_(&oct), centers_(std::move(centers)), kappa_(kappa) {
  if (!(kappa > 0)) throw std::invalid_argument("InvariantBumps: kappa must be positive");
  // translates farther than d_cut from every point of the octagon
  // contribute below exp(-40)
  const double d_cut = std::acosh(1 + 40 / kappa_);
  double far = 0;
  for (cplx c : centers_) far = std::max(far, std::acosh(cosh_distance(c, 0.0)));
  const auto elems = oct.ball(oct.vertex_distance() + d_cut + far + 1e-9);
  const double lim = std::cosh(oct.vertex_distance() + d_cut);
  orbits_.resize(centers_.size());
  for (std::size_t i = 0; i < centers_.size(); ++i)
    for (const auto& g : elems) {
      cplx q = mobius_apply(g, centers_[i]);
      if (cosh_distance(q, 0.0) <= lim) orbits_[i].push_back(q);
    }
}

double InvariantBumps::value(std::size_t i, cplx z) const {
  double s = 0;
  for (cplx q : orbits_[i]) s += std::exp(-kappa_ * (cosh_distance(z, q) - 1));
  return s;
}

double InvariantBumps::laplacian(std::size_t i, cplx z) const {
  // Lap Phi(u) = Phi''(u)(u^2-1) + 2u Phi'(u) since Lap u = 2u, |grad u|^2 = u^2-1
  double s = 0;
  const double k = kappa_;
  for (cplx q : orbits_[i]) {
    const double u = cosh_distance(z, q);
    const double phi = std::exp(-k * (u - 1));
    s += phi * (k * k * (u * u - 1) - 2 * k * u);
  }
  return s;
}

double InvariantBumps::tensor(std::size_t i, int j, cplx z, double theta) const {
  const double el = 0.5 * (1 - std::norm(z));  // e^{-lambda}
  const double c = std::cos(theta), sn = std::sin(theta);
  double s = 0;
  for (cplx q : orbits_[i]) {
    DistanceJet d = distance_jet(z, q);
    const double phi = std::exp(-kappa_ * (d.u - 1));
    const double sv = el * (c * d.ux + sn * d.uy);
    s += phi * std::pow(sv, j);
  }
  return s;
}

double InvariantBumps::mixed_tensor(std::size_t i, int j, int l, cplx z, double theta) const {
  const double el = 0.5 * (1 - std::norm(z));
  const double c = std::cos(theta), sn = std::sin(theta);
  double s = 0;
  for (cplx q : orbits_[i]) {
    DistanceJet d = distance_jet(z, q);
    const double phi = std::exp(-kappa_ * (d.u - 1));
    const double sv = el * (c * d.ux + sn * d.uy);
    const double tv = el * (-sn * d.ux + c * d.uy);
    s += phi * std::pow(sv, j) * std::pow(tv, l);
  }
  return s;
}

double InvariantBumps::tensor_flow_derivative(std::size_t i, int j, cplx z,
                                              double theta) const {
  // X u = s and X s = Hess u(v,v) = u on curvature -1
  const double el = 0.5 * (1 - std::norm(z));
  const double c = std::cos(theta), sn = std::sin(theta);
  double s = 0;
  for (cplx q : orbits_[i]) {
    DistanceJet d = distance_jet(z, q);
    const double phi = std::exp(-kappa_ * (d.u - 1));
    const double sv = el * (c * d.ux + sn * d.uy);
    double term = -kappa_ * phi * std::pow(sv, j + 1);
    if (j > 0) term += j * phi * std::pow(sv, j - 1) * d.u;
    s += term;
  }
  return s;
}

double InvariantBumps::tensor_any(std::size_t i, int j, cplx z, double theta) const {
  auto r = oct_->reduce(z);
  return tensor(i, j, r.z, theta + std::arg(mobius_derivative(r.g, z)));
}

double InvariantBumps::tensor_flow_derivative_any(std::size_t i, int j, cplx z,
                                                  double theta) const {
  auto r = oct_->reduce(z);
  return tensor_flow_derivative(i, j, r.z, theta + std::arg(mobius_derivative(r.g, z)));
}

void deflated_generalized_eigen(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                double rel_tol, Eigen::VectorXd& values,
                                Eigen::MatrixXd& vectors, bool condense_kernel) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(0.5 * (B + B.transpose()));
  const Eigen::VectorXd& d = eb.eigenvalues();
  const double dmax = d.cwiseAbs().maxCoeff();
  std::vector<int> keep, drop;
  for (int i = 0; i < d.size(); ++i) (d(i) > rel_tol * dmax ? keep : drop).push_back(i);
  if (keep.empty()) throw std::runtime_error("deflated_generalized_eigen: B vanishes");
  Eigen::MatrixXd W(B.rows(), Eigen::Index(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    W.col(Eigen::Index(c)) = eb.eigenvectors().col(keep[c]) / std::sqrt(d(keep[c]));
  Eigen::MatrixXd C = W.transpose() * A * W;
  if (condense_kernel && !drop.empty()) {
    // minimize A over the kernel of B first: Schur complement of A on ker B
    Eigen::MatrixXd Z(B.rows(), Eigen::Index(drop.size()));
    for (std::size_t c = 0; c < drop.size(); ++c) Z.col(Eigen::Index(c)) = eb.eigenvectors().col(drop[c]);
    const Eigen::MatrixXd Azz = Z.transpose() * A * Z, Azw = Z.transpose() * A * W;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ez(0.5 * (Azz + Azz.transpose()));
    const double scale = std::max(A.cwiseAbs().maxCoeff(), 1e-300);
    if (ez.eigenvalues()(0) < -rel_tol * scale) {
      // A negative where B vanishes: the ratio is unbounded below
      values = Eigen::VectorXd::Constant(1, -INFINITY);
      vectors = Eigen::MatrixXd::Zero(A.rows(), 1);
      return;
    }
    for (Eigen::Index i = 0; i < ez.eigenvalues().size(); ++i) {
      const double e = ez.eigenvalues()(i);
      if (e <= rel_tol * scale) continue;
      const Eigen::VectorXd c = ez.eigenvectors().col(i).transpose() * Azw;
      C -= c * c.transpose() / e;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(0.5 * (C + C.transpose()));
  values = ec.eigenvalues();
  vectors = W * ec.eigenvectors();
}

namespace {

std::vector<cplx> ring_centers(const FuchsianOctagon& oct, int rings) {
  std::vector<cplx> c{0.0};
  for (int r = 1; r <= rings; ++r) {
    const double d = oct.side_distance() * r / (rings + 0.5);
    const int n = 8 * r;
    for (int i = 0; i < n; ++i)
      c.push_back(std::polar(std::tanh(0.5 * d), 2 * M_PI * (i + 0.5 * (r % 2)) / n));
  }
  c.push_back(std::polar(oct.vertex_radius(), M_PI / 8));  // the single vertex
  for (int k = 0; k < 4; ++k) c.push_back(std::polar(oct.side_radius(), k * M_PI / 4));
  return c;
}

}  // namespace

OctagonSpectrum::OctagonSpectrum(const FuchsianOctagon& oct, int rings, double kappa,
                                 int quad)
    : oct_(&oct), bumps_(oct, ring_centers(oct, rings), kappa), quad_(oct.quadrature(quad)) {
  const std::size_t nb = bumps_.size() + 1, nq = quad_.z.size();
  Eigen::MatrixXd F(nq, nb), L(nq, nb);
  for (std::size_t p = 0; p < nq; ++p) {
    F(Eigen::Index(p), 0) = 1;
    L(Eigen::Index(p), 0) = 0;
    for (std::size_t i = 0; i < bumps_.size(); ++i) {
      F(Eigen::Index(p), Eigen::Index(i + 1)) = bumps_.value(i, quad_.z[p]);
      L(Eigen::Index(p), Eigen::Index(i + 1)) = bumps_.laplacian(i, quad_.z[p]);
    }
  }
  Eigen::VectorXd w(nq);
  for (std::size_t p = 0; p < nq; ++p) w(Eigen::Index(p)) = quad_.w[p];
  area_ = w.sum();
  Eigen::MatrixXd M = F.transpose() * w.asDiagonal() * F;
  Eigen::MatrixXd S = -(F.transpose() * w.asDiagonal() * L);
  S = 0.5 * (S + S.transpose());
  Eigen::VectorXd vals;
  deflated_generalized_eigen(S, M, 1e-13, vals, coef_);
  mu_.assign(vals.data(), vals.data() + vals.size());
  // the constant mode is exact; pin it
  mu_[0] = 0;
  coef_.col(0).setZero();
  coef_(0, 0) = 1 / std::sqrt(area_);
}

double OctagonSpectrum::eigenfunction(std::size_t j, cplx z) const {
  double s = coef_(0, Eigen::Index(j));
  for (std::size_t i = 0; i < bumps_.size(); ++i)
    s += coef_(Eigen::Index(i + 1), Eigen::Index(j)) * bumps_.value(i, z);
  return s;
}

double OctagonSpectrum::eigenfunction_any(std::size_t j, cplx z) const {
  return eigenfunction(j, oct_->reduce(z).z);
}

double OctagonSpectrum::residual(std::size_t count) const {
  double worst = 0;
  for (std::size_t j = 1; j < std::min(count, mu_.size()); ++j) {
    double num = 0, den = 0;
    for (std::size_t p = 0; p < quad_.z.size(); ++p) {
      double f = eigenfunction(j, quad_.z[p]);
      double lf = 0;
      for (std::size_t i = 0; i < bumps_.size(); ++i)
        lf += coef_(Eigen::Index(i + 1), Eigen::Index(j)) * bumps_.laplacian(i, quad_.z[p]);
      num += quad_.w[p] * std::pow(-lf - mu_[j] * f, 2);
      den += quad_.w[p] * f * f;
    }
    worst = std::max(worst, std::sqrt(num / den) / mu_[j]);
  }
  return worst;
}

}  // namespace anosov
