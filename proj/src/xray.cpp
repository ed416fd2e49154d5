#include "anosov/xray.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "anosov/flow.hpp"

namespace anosov {

double ray_transform(const TensorFunction& f, const ClosedGeodesic& g) {
  if (g.orbit.empty()) throw std::invalid_argument("ray_transform: empty geodesic");
  double s = 0;
  for (const auto& p : g.orbit) s += f.f(p);
  return s * g.T / double(g.orbit.size());
}

double ray_transform_abs(const TensorFunction& f, const ClosedGeodesic& g) {
  double s = 0;
  for (const auto& p : g.orbit) s += std::abs(f.f(p));
  return s * g.T / double(g.orbit.size());
}

TensorFunction bump_tensor(const InvariantBumps& b, std::size_t i, int j, int l) {
  TensorFunction t;
  t.degree = j + l;
  t.potential = false;
  const InvariantBumps* bp = &b;
  t.f = [bp, i, j, l](const UnitTangent& p) {
    return bp->mixed_tensor(i, j, l, cplx(p.x, p.y), p.theta);
  };
  t.id = "bump" + std::to_string(i) + ":s^" + std::to_string(j) + "t^" + std::to_string(l);
  return t;
}

TensorFunction bump_potential(const InvariantBumps& b, std::size_t i, int j) {
  TensorFunction t;
  t.degree = j + 1;
  t.potential = true;
  const InvariantBumps* bp = &b;
  t.f = [bp, i, j](const UnitTangent& p) {
    return bp->tensor_flow_derivative(i, j, cplx(p.x, p.y), p.theta);
  };
  t.id = "X(bump" + std::to_string(i) + ":s^" + std::to_string(j) + ")";
  return t;
}

TensorFunction field_tensor(const TorusChart& chart, const SMField& u, int degree) {
  // Fourier coefficients of every mode, shared by the closure
  struct Data {
    const PeriodicGrid* grid;
    int N;
    std::vector<CGrid> F;
  };
  auto d = std::make_shared<Data>();
  d->grid = &chart.grid();
  d->N = u.N;
  for (int k = -u.N; k <= u.N; ++k)
    d->F.push_back(chart.grid().forward(CGrid(u[k].data(), u[k].data() + u[k].size())));
  TensorFunction t;
  t.degree = degree;
  t.f = [d](const UnitTangent& p) {
    const PeriodicGrid& g = *d->grid;
    cplx total = 0;
    for (int k = -d->N; k <= d->N; ++k) {
      const CGrid& F = d->F[std::size_t(k + d->N)];
      cplx s = 0;
      for (int iy = 0; iy < g.ny(); ++iy) {
        if (2 * iy == g.ny()) continue;
        for (int ix = 0; ix < g.nx(); ++ix) {
          if (2 * ix == g.nx()) continue;
          const cplx c = F[std::size_t(iy) * g.nx() + ix];
          if (c == 0.0) continue;
          const double ph = g.kx(ix) * p.x + g.ky(iy) * p.y;
          s += c * cplx(std::cos(ph), std::sin(ph));
        }
      }
      total += s / double(g.size()) * std::polar(1.0, k * p.theta);
    }
    return total.real();
  };
  t.id = "field";
  return t;
}

SMField potential_tensor(const SMField& h, int m) {
  for (int k = -h.N; k <= h.N; ++k)
    if (std::abs(k) > m - 1 && !h[k].isZero(0))
      throw std::invalid_argument("potential_tensor: h has modes beyond m - 1");
  return apply_frame(FrameOp::X, h);
}

double solenoidal_check(const SMField& A) {
  const Chart& c = *A.chart;
  Vec r = Vec::Zero(Eigen::Index(c.dim()));
  if (A.has(-1)) r += c.eta_plus(-1, A[-1]);
  if (A.has(1)) r += c.eta_minus(1, A[1]);
  return std::sqrt((c.weights().array() * r.array().abs2()).sum());
}

std::vector<ClosedGeodesic> octagon_geodesic_pool(const FuchsianOctagon& oct, int max_len,
                                                  int samples) {
  std::vector<ClosedGeodesic> pool;
  for (const auto& w : octagon_word_pool(oct, max_len))
    if (auto g = closed_geodesic_from_word(oct, w, samples)) pool.push_back(std::move(*g));
  return pool;
}

std::vector<TensorFunction> octagon_tensor_basis(const InvariantBumps& b, int m,
                                                 const std::vector<std::size_t>& pot_idx,
                                                 const std::vector<std::size_t>& other_idx) {
  std::vector<TensorFunction> out;
  if (m >= 1)
    for (std::size_t i : pot_idx) out.push_back(bump_potential(b, i, m - 1));
  std::vector<std::pair<int, int>> shapes;
  switch (m) {
    case 0: shapes = {{0, 0}}; break;
    case 1: shapes = {{0, 1}}; break;
    case 2: shapes = {{0, 0}, {2, 0}, {0, 2}}; break;
    case 3: shapes = {{0, 1}, {0, 3}}; break;
    default: throw std::invalid_argument("octagon_tensor_basis: degree must be 0..3");
  }
  for (std::size_t i : other_idx)
    for (auto [j, l] : shapes) {
      TensorFunction t = bump_tensor(b, i, j, l);
      t.degree = m;
      out.push_back(std::move(t));
    }
  if (m == 0) {
    TensorFunction c;
    c.degree = 0;
    c.f = [](const UnitTangent&) { return 1.0; };
    c.id = "constant";
    out.push_back(std::move(c));
  }
  return out;
}

SInjectivityReport sinjectivity_experiment(const std::vector<ClosedGeodesic>& pool,
                                           const std::vector<TensorFunction>& basis,
                                           const std::function<UnitTangent(std::mt19937_64&)>& sampler,
                                           double threshold, int n_samples,
                                           unsigned long long seed, int workers) {
  if (pool.empty() || basis.empty())
    throw std::invalid_argument("sinjectivity_experiment: empty pool or basis");
  SInjectivityReport rep;
  rep.pool_size = pool.size();
  rep.n_basis = basis.size();
  rep.underdetermined = pool.size() < basis.size();
  const Eigen::Index ng = Eigen::Index(pool.size()), nb = Eigen::Index(basis.size());

  // function values at sampled points fix the scale of each basis element
  std::mt19937_64 rng(seed);
  std::vector<UnitTangent> pts;
  for (int i = 0; i < n_samples; ++i) pts.push_back(sampler(rng));
  Eigen::MatrixXd F(Eigen::Index(pts.size()), nb);
  parallel_for(int(nb), workers, [&](int j) {
    for (std::size_t p = 0; p < pts.size(); ++p)
      F(Eigen::Index(p), j) = basis[std::size_t(j)].f(pts[p]);
  });
  Eigen::VectorXd scale = F.colwise().norm().transpose() / std::sqrt(double(pts.size()));
  for (Eigen::Index j = 0; j < nb; ++j)
    if (!(scale(j) > 0)) throw std::runtime_error("sinjectivity_experiment: basis element vanishes");

  Eigen::MatrixXd G(ng, nb);
  parallel_for(int(ng * nb), workers, [&](int idx) {
    const Eigen::Index g = idx / nb, j = idx % nb;
    G(g, j) = ray_transform(basis[std::size_t(j)], pool[std::size_t(g)]) / scale(j);
  });

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0;
  rep.sigma.assign(s.data(), s.data() + s.size());
  rep.sigma_min = smax > 0 ? s(s.size() - 1) / smax : 0;
  rep.sigma_gap = 0;
  std::vector<Eigen::Index> kernel;
  for (Eigen::Index i = 0; i < nb; ++i) {
    const double si = i < s.size() ? s(i) : 0;
    if (si < threshold * smax) kernel.push_back(i);
    else rep.sigma_gap = si / smax;
  }
  rep.kernel_dim = int(kernel.size());

  std::vector<Eigen::Index> pot;
  for (Eigen::Index j = 0; j < nb; ++j)
    if (basis[std::size_t(j)].potential) pot.push_back(j);
  rep.potential_count = int(pot.size());
  Eigen::MatrixXd P(F.rows(), Eigen::Index(pot.size()));
  for (std::size_t c = 0; c < pot.size(); ++c) P.col(Eigen::Index(c)) = F.col(pot[c]);
  Eigen::JacobiSVD<Eigen::MatrixXd> psvd;
  if (!pot.empty()) psvd.compute(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
  for (Eigen::Index i : kernel) {
    Eigen::VectorXd c = svd.matrixV().col(i).cwiseQuotient(scale);
    Eigen::VectorXd y = F * c;
    const double yn = y.norm();
    if (yn == 0) continue;
    double res = 1;
    if (!pot.empty()) res = (y - P * psvd.solve(y)).norm() / yn;
    rep.non_potential_residual = std::max(rep.non_potential_residual, res);
  }
  return rep;
}

}  // namespace anosov
