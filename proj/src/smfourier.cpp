#include "anosov/smfourier.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anosov {

namespace {

CGrid to_grid(const Vec& v) { return CGrid(v.data(), v.data() + v.size()); }
Vec to_vec(const CGrid& g) { return Eigen::Map<const Vec>(g.data(), Eigen::Index(g.size())); }

double jbracket(double k) { return std::sqrt(1 + k * k); }

}  // namespace

// ---------------------------------------------------------------- charts

std::vector<std::vector<std::size_t>> Chart::blocks() const {
  std::vector<std::size_t> all(dim());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return {all};
}

bool Chart::allowed(int, std::size_t) const { return true; }

Vec Chart::multiply(const Vec&, const Vec&) const {
  throw std::logic_error(name() + ": pointwise products are not available");
}

double Chart::l1(const Vec&) const {
  throw std::logic_error(name() + ": point values are not available");
}

TorusChart::TorusChart(ConformalTorus torus) : torus_(std::move(torus)) {
  K_ = torus_.curvature();
  const auto& lam = torus_.lambda();
  w_.resize(Eigen::Index(lam.size()));
  const double c = torus_.grid().cell_area() * 2 * M_PI;
  for (std::size_t i = 0; i < lam.size(); ++i) w_(Eigen::Index(i)) = std::exp(2 * lam[i]) * c;
}

Vec TorusChart::eta_plus(int k, const Vec& h) const {
  const auto& lam = torus_.lambda();
  CGrid g(lam.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = h(Eigen::Index(i)) * std::exp(-k * lam[i]);
  g = grid().del(g);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= std::exp((k - 1) * lam[i]);
  return to_vec(g);
}

Vec TorusChart::eta_minus(int k, const Vec& h) const {
  const auto& lam = torus_.lambda();
  CGrid g(lam.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = h(Eigen::Index(i)) * std::exp(k * lam[i]);
  g = grid().delbar(g);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= std::exp(-(1 + k) * lam[i]);
  return to_vec(g);
}

Vec TorusChart::mul_curvature(const Vec& h) const {
  Vec out = h;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) *= K_[std::size_t(i)];
  return out;
}

Vec TorusChart::multiply(const Vec& a, const Vec& b) const { return a.cwiseProduct(b); }

double TorusChart::l1(const Vec& a) const { return (w_.array() * a.array().abs()).sum(); }

Vec TorusChart::sample(const std::function<cplx(double, double)>& f) const {
  const auto& g = grid();
  Vec v(Eigen::Index(g.size()));
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) v(iy * g.nx() + ix) = f(g.x(ix), g.y(iy));
  return v;
}

cplx TorusChart::value(const Vec& a, double x, double y) const {
  const auto& g = grid();
  CGrid F = g.forward(to_grid(a));
  cplx s = 0;
  for (int iy = 0; iy < g.ny(); ++iy) {
    if (2 * iy == g.ny()) continue;
    for (int ix = 0; ix < g.nx(); ++ix) {
      if (2 * ix == g.nx()) continue;
      const double ph = g.kx(ix) * x + g.ky(iy) * y;
      s += F[std::size_t(iy) * g.nx() + ix] * cplx(std::cos(ph), std::sin(ph));
    }
  }
  return s / double(g.size());
}

Vec TorusChart::solve_delbar(const Vec& F) const {
  const auto& g = grid();
  CGrid Fh = g.forward(to_grid(F));
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) {
      auto& c = Fh[std::size_t(iy) * g.nx() + ix];
      const cplx sym = 0.5 * cplx(0, 1) * cplx(g.kx(ix), g.ky(iy));  // delbar symbol
      if (std::abs(sym) == 0) c = 0;
      else c /= sym;
    }
  return to_vec(g.inverse(Fh));
}

RepresentationChart::RepresentationChart(std::vector<Component> comps) : comps_(std::move(comps)) {
  w_ = Eigen::VectorXd::Ones(Eigen::Index(comps_.size()));
}

RepresentationChart RepresentationChart::octagon(const OctagonSpectrum& spec, int n_eigen,
                                                 int m_max) {
  std::vector<Component> c;
  const auto& mu = spec.eigenvalues();
  for (int j = 1; j <= n_eigen && std::size_t(j) < mu.size(); ++j)
    c.push_back({Component::principal, mu[std::size_t(j)], 0});
  c.push_back({Component::trivial, 0.0, 0});
  for (int m = 1; m <= m_max; ++m) {
    const int mult = m == 1 ? 2 : 2 * m - 1;
    for (int r = 0; r < mult; ++r) {
      c.push_back({Component::holomorphic, -double(m) * (m - 1), m});
      c.push_back({Component::antiholomorphic, -double(m) * (m - 1), m});
    }
  }
  return RepresentationChart(std::move(c));
}

double RepresentationChart::ladder(std::size_t i, int k) const {
  return 0.5 * std::sqrt(std::max(0.0, comps_[i].mu + double(k) * (k + 1)));
}

bool RepresentationChart::allowed(int k, std::size_t i) const {
  const auto& c = comps_[i];
  switch (c.kind) {
    case Component::principal: return true;
    case Component::trivial: return k == 0;
    case Component::holomorphic: return k >= c.m;
    default: return k <= -c.m;
  }
}

Vec RepresentationChart::eta_plus(int k, const Vec& h) const {
  Vec out = Vec::Zero(h.size());
  for (std::size_t i = 0; i < comps_.size(); ++i)
    if (allowed(k, i) && allowed(k + 1, i)) out(Eigen::Index(i)) = ladder(i, k) * h(Eigen::Index(i));
  return out;
}

Vec RepresentationChart::eta_minus(int k, const Vec& h) const {
  Vec out = Vec::Zero(h.size());
  for (std::size_t i = 0; i < comps_.size(); ++i)
    if (allowed(k, i) && allowed(k - 1, i))
      out(Eigen::Index(i)) = -ladder(i, k - 1) * h(Eigen::Index(i));
  return out;
}

std::vector<std::vector<std::size_t>> RepresentationChart::blocks() const {
  std::vector<std::vector<std::size_t>> b;
  for (std::size_t i = 0; i < comps_.size(); ++i) b.push_back({i});
  return b;
}

// ---------------------------------------------------------------- fields

SMField::SMField(const Chart& c, int N_) : chart(&c), N(N_) {
  modes.assign(std::size_t(2 * N + 1), Vec::Zero(Eigen::Index(c.dim())));
}

SMField SMField::padded(int N2) const {
  SMField out(*chart, std::max(N, N2));
  for (int k = -N; k <= N; ++k) out[k] = (*this)[k];
  return out;
}

SMField operator+(const SMField& a, const SMField& b) {
  SMField out = a.padded(b.N);
  for (int k = -b.N; k <= b.N; ++k) out[k] += b[k];
  return out;
}

SMField operator-(const SMField& a, const SMField& b) { return a + (-1.0 * b); }

SMField operator*(cplx s, const SMField& a) {
  SMField out = a;
  for (auto& m : out.modes) m *= s;
  return out;
}

Vec eta(const Chart& chart, int sign, int k, const Vec& h) {
  return sign > 0 ? chart.eta_plus(k, h) : chart.eta_minus(k, h);
}

SMField apply_frame(FrameOp op, const SMField& u) {
  if (op == FrameOp::V) {
    SMField out = u;
    for (int k = -u.N; k <= u.N; ++k) out[k] *= cplx(0, k);
    return out;
  }
  SMField out(*u.chart, u.N + 1);
  const cplx sp = op == FrameOp::X ? 1.0 : cplx(0, -1);
  const cplx sm = op == FrameOp::X ? 1.0 : cplx(0, 1);
  for (int k = -u.N; k <= u.N; ++k) {
    if (u[k].isZero(0)) continue;
    out[k + 1] += sp * u.chart->eta_plus(k, u[k]);
    out[k - 1] += sm * u.chart->eta_minus(k, u[k]);
  }
  return out;
}

SMField apply_curvature(const SMField& u) {
  SMField out = u;
  for (auto& m : out.modes) m = u.chart->mul_curvature(m);
  return out;
}

cplx inner(const SMField& a, const SMField& b) {
  const Eigen::VectorXd& w = a.chart->weights();
  cplx s = 0;
  const int n = std::min(a.N, b.N);
  for (int k = -n; k <= n; ++k) s += (w.cast<cplx>().array() * a[k].array() * b[k].conjugate().array()).sum();
  return s;
}

double mode_norm(const SMField& a, int k) {
  if (!a.has(k)) return 0;
  return std::sqrt((a.chart->weights().array() * a[k].array().abs2()).sum());
}

double norm(const SMField& a) {
  double s = 0;
  for (int k = -a.N; k <= a.N; ++k) s += std::pow(mode_norm(a, k), 2);
  return std::sqrt(s);
}

double mixed_norm(const SMField& a, double s) {
  double t = 0;
  for (int k = -a.N; k <= a.N; ++k) t += std::pow(jbracket(k), 2 * s) * std::pow(mode_norm(a, k), 2);
  return std::sqrt(t);
}

SMField project_high(const SMField& a, int kmin) {
  SMField out = a;
  for (int k = -a.N; k <= a.N; ++k)
    if (std::abs(k) < kmin) out[k].setZero();
  return out;
}

SMField random_field(const Chart& chart, int N, std::mt19937_64& rng, int band, int kmin) {
  std::normal_distribution<double> G(0, 1);
  SMField u(chart, N);
  if (auto t = dynamic_cast<const TorusChart*>(&chart)) {
    const auto& g = t->grid();
    for (int k = -N; k <= N; ++k) {
      if (std::abs(k) < kmin) continue;
      CGrid F(g.size(), 0.0);
      for (int ny = -band; ny <= band; ++ny)
        for (int nx = -band; nx <= band; ++nx) {
          const int ix = (nx + g.nx()) % g.nx(), iy = (ny + g.ny()) % g.ny();
          const double amp = 1.0 / (1 + nx * nx + ny * ny) / (1 + std::abs(k));
          F[std::size_t(iy) * g.nx() + ix] = amp * double(g.size()) * cplx(G(rng), G(rng));
        }
      u[k] = to_vec(g.inverse(F));
    }
    return u;
  }
  for (int k = -N; k <= N; ++k) {
    if (std::abs(k) < kmin) continue;
    for (std::size_t i = 0; i < chart.dim(); ++i)
      if (chart.allowed(k, i)) u[k](Eigen::Index(i)) = cplx(G(rng), G(rng)) / (1.0 + std::abs(k));
  }
  return u;
}

// ---------------------------------------------------------------- identities

namespace {
double h1_norm2(const SMField& u) {
  return std::pow(norm(apply_frame(FrameOp::X, u)), 2) +
         std::pow(norm(apply_frame(FrameOp::Xperp, u)), 2) +
         std::pow(norm(apply_frame(FrameOp::V, u)), 2) + std::pow(norm(u), 2);
}
}  // namespace

PestovTerms pestov_residual(const SMField& u) {
  PestovTerms t;
  const SMField Vu = apply_frame(FrameOp::V, u);
  const SMField Xu = apply_frame(FrameOp::X, u);
  t.XVu2 = std::pow(norm(apply_frame(FrameOp::X, Vu)), 2);
  t.KVuVu = inner(apply_curvature(Vu), Vu).real();
  t.Xu2 = std::pow(norm(Xu), 2);
  t.VXu2 = std::pow(norm(apply_frame(FrameOp::V, Xu)), 2);
  t.h1_norm2 = h1_norm2(u);
  const double lhs = t.XVu2 - t.KVuVu + t.Xu2 - t.VXu2;
  t.residual = t.h1_norm2 > 0 ? std::abs(lhs) / t.h1_norm2 : std::abs(lhs);
  return t;
}

StructureResiduals structure_residuals(const SMField& u) {
  using F = FrameOp;
  const double h1 = std::sqrt(h1_norm2(u));
  const double sc = h1 > 0 ? h1 : 1;
  StructureResiduals r;
  SMField a = apply_frame(F::X, apply_frame(F::V, u)) - apply_frame(F::V, apply_frame(F::X, u)) -
              apply_frame(F::Xperp, u);
  r.XV_minus_Xperp = norm(a) / sc;
  SMField b = apply_frame(F::V, apply_frame(F::Xperp, u)) -
              apply_frame(F::Xperp, apply_frame(F::V, u)) - apply_frame(F::X, u);
  r.VXperp_minus_X = norm(b) / sc;
  SMField c = apply_frame(F::X, apply_frame(F::Xperp, u)) -
              apply_frame(F::Xperp, apply_frame(F::X, u)) +
              apply_curvature(apply_frame(F::V, u));
  r.XXperp_plus_KV = norm(c) / sc;
  return r;
}

double adjoint_defect(const Chart& chart, int k, const Vec& a, const Vec& b) {
  const Eigen::VectorXd& w = chart.weights();
  auto ip = [&w](const Vec& x, const Vec& y) {
    return (w.cast<cplx>().array() * x.array() * y.conjugate().array()).sum();
  };
  const cplx s = ip(chart.eta_plus(k, a), b) + ip(a, chart.eta_minus(k + 1, b));
  const double na = std::sqrt(std::abs(ip(a, a))), nb = std::sqrt(std::abs(ip(b, b)));
  return std::abs(s) / (na * nb);
}

// ---------------------------------------------------------------- alpha

namespace {

// real symmetric form of a Hermitian matrix
Eigen::MatrixXd realify(const Eigen::MatrixXcd& H) {
  const Eigen::Index n = H.rows();
  Eigen::MatrixXd R(2 * n, 2 * n);
  R.topLeftCorner(n, n) = H.real();
  R.topRightCorner(n, n) = -H.imag();
  R.bottomLeftCorner(n, n) = H.imag();
  R.bottomRightCorner(n, n) = H.real();
  return 0.5 * (R + R.transpose());
}

}  // namespace

double alpha_lower_bound(const std::vector<SMField>& basis) {
  if (basis.empty()) throw std::invalid_argument("alpha_lower_bound: empty test space");
  const Eigen::Index n = Eigen::Index(basis.size());
  std::vector<SMField> X, K;
  for (const auto& b : basis) {
    X.push_back(apply_frame(FrameOp::X, b));
    K.push_back(apply_curvature(b));
  }
  Eigen::MatrixXcd A(n, n), B(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const cplx xx = inner(X[std::size_t(j)], X[std::size_t(i)]);
      const cplx kk = inner(K[std::size_t(j)], basis[std::size_t(i)]);
      B(i, j) = xx;
      B(j, i) = std::conj(xx);
      A(i, j) = xx - kk;
      A(j, i) = std::conj(xx - kk);
    }
  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  deflated_generalized_eigen(realify(A), realify(B), 1e-10, vals, vecs, true);
  return vals(0);
}

std::vector<SMField> alpha_test_space(const Chart& chart, int N, int band) {
  std::vector<SMField> out;
  if (auto t = dynamic_cast<const TorusChart*>(&chart)) {
    const double Lx = t->grid().Lx(), Ly = t->grid().Ly();
    for (int k = -N; k <= N; ++k)
      for (int ny = -band; ny <= band; ++ny)
        for (int nx = -band; nx <= band; ++nx) {
          SMField f(chart, N);
          f[k] = t->sample([&](double x, double y) {
            return std::polar(1.0, 2 * M_PI * (nx * x / Lx + ny * y / Ly));
          });
          out.push_back(std::move(f));
        }
    return out;
  }
  for (int k = -N; k <= N; ++k)
    for (std::size_t i = 0; i < chart.dim(); ++i)
      if (chart.allowed(k, i)) {
        SMField f(chart, N);
        f[k](Eigen::Index(i)) = 1;
        out.push_back(std::move(f));
      }
  return out;
}

double alpha_along_profile(const CurvatureProfile& profile, int n_fourier) {
  if (!profile.periodic) throw std::invalid_argument("alpha_along_profile: needs a periodic profile");
  const Eigen::Index n = Eigen::Index(profile.K.size()), m = 2 * n_fourier + 1;
  const double P = profile.dt * double(n);
  Eigen::MatrixXd Phi(n, m), dPhi(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = profile.dt * double(i);
    Phi(i, m - 1) = 1;
    dPhi(i, m - 1) = 0;
    for (int j = 1; j <= n_fourier; ++j) {
      const double w = 2 * M_PI * j / P;
      Phi(i, 2 * j - 2) = std::cos(w * t);
      Phi(i, 2 * j - 1) = std::sin(w * t);
      dPhi(i, 2 * j - 2) = -w * std::sin(w * t);
      dPhi(i, 2 * j - 1) = w * std::cos(w * t);
    }
  }
  Eigen::VectorXd K = Eigen::Map<const Eigen::VectorXd>(profile.K.data(), n);
  Eigen::MatrixXd B = profile.dt * dPhi.transpose() * dPhi;
  Eigen::MatrixXd A = B - profile.dt * Phi.transpose() * K.asDiagonal() * Phi;
  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  deflated_generalized_eigen(0.5 * (A + A.transpose()), 0.5 * (B + B.transpose()), 1e-12, vals,
                             vecs, true);
  return vals(0);
}

// ---------------------------------------------------------------- solvers

namespace {

// dense ridge solve block by block through an SVD
LeastSquaresResult dense_transport_solve(const SMField& f, int m, int N, double reg, double tol) {
  const Chart& chart = *f.chart;
  LeastSquaresResult out;
  out.h = SMField(chart, N);
  const Eigen::VectorXd& w = chart.weights();
  double res2 = 0, f2 = 0;
  auto in_T = [m](int k) { return m == 0 || std::abs(k) >= m + 1; };
  for (const auto& blk : chart.blocks()) {
    struct Slot {
      int k;
      std::size_t i;
    };
    std::vector<Slot> cols, rows;
    for (int k = -N; k <= N; ++k)
      if (in_T(k))
        for (std::size_t i : blk)
          if (chart.allowed(k, i)) cols.push_back({k, i});
    for (int k = -(N - 1); k <= N - 1; ++k)
      for (std::size_t i : blk)
        if (chart.allowed(k, i)) rows.push_back({k, i});
    if (rows.empty()) continue;
    // row lookup: (k, position in block)
    std::vector<long> pos(chart.dim(), -1);
    for (std::size_t p = 0; p < blk.size(); ++p) pos[blk[p]] = long(p);
    std::vector<long> row_of(std::size_t(2 * N + 1) * blk.size(), -1);
    for (std::size_t r = 0; r < rows.size(); ++r)
      row_of[std::size_t(rows[r].k + N) * blk.size() + std::size_t(pos[rows[r].i])] = long(r);

    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(Eigen::Index(rows.size()), Eigen::Index(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const int k = cols[c].k;
      Vec e = Vec::Zero(Eigen::Index(chart.dim()));
      e(Eigen::Index(cols[c].i)) = cplx(0, k) / std::sqrt(w(Eigen::Index(cols[c].i)));
      for (int sgn : {1, -1}) {
        const int kk = k + sgn;
        if (std::abs(kk) > N - 1) continue;
        Vec img = eta(chart, sgn, k, e);
        for (std::size_t p = 0; p < blk.size(); ++p) {
          const long r = row_of[std::size_t(kk + N) * blk.size() + p];
          if (r >= 0) A(r, Eigen::Index(c)) = std::sqrt(w(Eigen::Index(blk[p]))) * img(Eigen::Index(blk[p]));
        }
      }
    }
    Eigen::VectorXcd b(Eigen::Index(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      b(Eigen::Index(r)) = f.has(rows[r].k) ? std::sqrt(w(Eigen::Index(rows[r].i))) *
                                                  f[rows[r].k](Eigen::Index(rows[r].i))
                                            : cplx(0);
    f2 += b.squaredNorm();
    if (cols.empty()) {
      res2 += b.squaredNorm();
      continue;
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::VectorXcd c = svd.matrixU().adjoint() * b;
    for (Eigen::Index i = 0; i < s.size(); ++i) c(i) *= s(i) > 0 ? s(i) / (s(i) * s(i) + reg) : 0.0;
    Eigen::VectorXcd y = svd.matrixV() * c;
    res2 += (A * y - b).squaredNorm();
    for (std::size_t cc = 0; cc < cols.size(); ++cc)
      out.h[cols[cc].k](Eigen::Index(cols[cc].i)) = y(Eigen::Index(cc)) / std::sqrt(w(Eigen::Index(cols[cc].i)));
  }
  out.residual = std::sqrt(res2);
  out.rel_residual = f2 > 0 ? out.residual / std::sqrt(f2) : out.residual;
  out.ok = out.rel_residual <= tol;
  return out;
}

// Damped CGLS on A = R X V T, with R keeping modes |k| <= N-1. X and V are
// skew in the weighted product, so A* = T V X. Started from zero the
// iterates stay in the range of A*, giving the minimum norm ridge solution.
LeastSquaresResult iterative_transport_solve(const SMField& f, int m, int N, double reg,
                                             double tol, int max_iter) {
  const Chart& chart = *f.chart;
  auto mask = [&](SMField u, int kmax) {
    SMField out(chart, kmax);
    for (int k = -kmax; k <= kmax; ++k) {
      if (m > 0 && std::abs(k) <= m && kmax == N) continue;
      if (!u.has(k)) continue;
      out[k] = u[k];
      for (std::size_t i = 0; i < chart.dim(); ++i)
        if (!chart.allowed(k, i)) out[k](Eigen::Index(i)) = 0;
    }
    return out;
  };
  auto A = [&](const SMField& h) { return mask(apply_frame(FrameOp::X, apply_frame(FrameOp::V, h)), N - 1); };
  auto At = [&](const SMField& r) { return mask(apply_frame(FrameOp::V, apply_frame(FrameOp::X, r)), N); };

  const SMField b = mask(f, N - 1);
  const double bn = norm(b);
  LeastSquaresResult out;
  out.h = SMField(chart, N);
  if (bn == 0) {
    out.ok = true;
    return out;
  }
  SMField x(chart, N), r = b, s = At(b), p = s;
  const double s0 = norm(s);
  double gamma = s0 * s0;
  for (int it = 0; it < max_iter && gamma > 0; ++it) {
    const SMField q = A(p);
    const double delta = std::pow(norm(q), 2) + reg * std::pow(norm(p), 2);
    if (!(delta > 0)) break;
    const double alpha = gamma / delta;
    x = x + alpha * p;
    r = r - alpha * q;
    s = At(r) - reg * x;
    const double gnew = std::pow(norm(s), 2);
    if (norm(r) <= 1e-3 * tol * bn || std::sqrt(gnew) <= 1e-10 * s0) break;
    p = s + (gnew / gamma) * p;
    gamma = gnew;
  }
  out.h = x;
  out.residual = norm(A(x) - b);
  out.rel_residual = out.residual / bn;
  out.ok = out.rel_residual <= tol;
  return out;
}

}  // namespace

LeastSquaresResult solve_adjoint_transport(const SMField& f, int m, int N, double reg,
                                           double tol, std::size_t dense_limit) {
  std::size_t cols = 0;
  for (const auto& blk : f.chart->blocks()) {
    std::size_t c = 0;
    for (int k = -N; k <= N; ++k)
      if (m == 0 || std::abs(k) >= m + 1)
        for (std::size_t i : blk) c += f.chart->allowed(k, i);
    cols = std::max(cols, c);
  }
  if (cols <= dense_limit) return dense_transport_solve(f, m, N, reg, tol);
  return iterative_transport_solve(f, m, N, reg, tol, int(std::max<std::size_t>(20000, 20 * cols)));
}

std::vector<LadderEntry> ladder_residual(const SMField& w) {
  const SMField Xw = apply_frame(FrameOp::X, w);
  std::vector<LadderEntry> out;
  for (int k = -w.N; k <= w.N; ++k) out.push_back({k, mode_norm(Xw, k), std::abs(k) >= w.N - 1});
  return out;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::w0: return "w0";
    case Variant::w1: return "w1";
    default: return "wm";
  }
}

ExtensionResult invariant_extension(Variant variant, const SMField& data, int N, int m,
                                    double reg, double tol) {
  const Chart& chart = *data.chart;
  const int mm = variant == Variant::w0 ? 0 : variant == Variant::w1 ? 1 : m;
  if (mm < 0 || N < mm + 2) throw std::invalid_argument("invariant_extension: N too small");
  if (data.N < mm) throw std::invalid_argument("invariant_extension: data lacks the prescribed mode");
  // prescribed part q, on modes +-mm only
  SMField q(chart, mm);
  q[mm] = data[mm];
  q[-mm] = data[-mm];
  ExtensionResult r;
  const double qn = norm(q) > 0 ? norm(q) : 1;
  if (variant != Variant::w0) {
    // constraint: eta_- q_m = 0 (and, for m = 1, the mode 0 part of X q vanishes)
    const Eigen::VectorXd& lw = chart.weights();
    double d = std::sqrt((lw.array() * chart.eta_minus(mm, q[mm]).array().abs2()).sum());
    if (variant == Variant::w1) d = std::max(d, mode_norm(apply_frame(FrameOp::X, q), 0));
    else d = std::max(d, std::sqrt((lw.array() * chart.eta_plus(-mm, q[-mm]).array().abs2()).sum()));
    r.data_defect = d / qn;
  }
  SMField rhs = -1.0 * apply_frame(FrameOp::X, q);
  LeastSquaresResult ls = solve_adjoint_transport(rhs, mm, N, reg);
  r.solver_residual = ls.rel_residual;
  SMField Th = mm == 0 ? ls.h : project_high(ls.h, mm + 1);
  r.h = ls.h;
  r.w = apply_frame(FrameOp::V, Th) + q;
  r.w = r.w.padded(N);

  const double wn = norm(r.w) > 0 ? norm(r.w) : 1;
  r.ladder = ladder_residual(r.w);
  for (const auto& e : r.ladder)
    if (std::abs(e.k) <= N - 2) r.interior_residual = std::max(r.interior_residual, e.residual / wn);
  r.prescribed_error = std::hypot(std::sqrt((chart.weights().array() * (r.w[mm] - q[mm]).array().abs2()).sum()),
                                  std::sqrt((chart.weights().array() * (r.w[-mm] - q[-mm]).array().abs2()).sum()));
  if (variant == Variant::w0)
    for (int k = -(N - 2); k <= N - 2; ++k)
      if (k % 2 != 0) r.odd_interior = std::max(r.odd_interior, mode_norm(r.w, k) / wn);
  // decay of ||w_k|| against <k>
  std::vector<double> xs, ys;
  for (int k = mm + 1; k <= N - 2; ++k) {
    const double nk = std::hypot(mode_norm(r.w, k), mode_norm(r.w, -k));
    if (nk > 1e-12 * wn) {
      xs.push_back(std::log(jbracket(k)));
      ys.push_back(std::log(nk));
    }
  }
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= double(xs.size());
    my /= double(xs.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    r.decay_slope = sxy / sxx;
  }
  r.ok = ls.ok && r.interior_residual <= tol;
  return r;
}

// ---------------------------------------------------------------- products

ProductResult fourier_product(const SMField& u, const SMField& v, double s, double t) {
  if (u.chart != v.chart) throw std::invalid_argument("fourier_product: different charts");
  const Chart& chart = *u.chart;
  for (const SMField* f : {&u, &v})
    for (int k = -f->N; k < 0; ++k)
      if (!(*f)[k].isZero(0)) throw std::invalid_argument("fourier_product: negative modes present");
  ProductResult r;
  const int N = u.N + v.N;
  r.w = SMField(chart, N);
  for (int k = 0; k <= N; ++k)
    for (int j = std::max(0, k - v.N); j <= std::min(k, u.N); ++j)
      r.w[k] += chart.multiply(u[j], v[k - j]);
  const double un = mixed_norm(u, -s), vn = mixed_norm(v, -t);
  for (int k = 0; k <= N; ++k)
    r.l1_ratio.push_back(chart.l1(r.w[k]) / (std::pow(jbracket(k), s + t) * un * vn));
  r.interior_max = std::min(u.N, v.N) - 2;
  const SMField Xw = apply_frame(FrameOp::X, r.w);
  const double wn = norm(r.w) > 0 ? norm(r.w) : 1;
  for (int k = -1; k <= r.interior_max; ++k)
    r.interior_residual = std::max(r.interior_residual, mode_norm(Xw, k) / wn);
  return r;
}

SMField torus_planted_invariant(const TorusChart& chart, int p, cplx c0, cplx c, int N) {
  if (p < 1 || N < p + 2) throw std::invalid_argument("torus_planted_invariant: need 1 <= p, p + 2 <= N");
  const auto& lam = chart.torus().lambda();
  SMField u(chart, N);
  u[0].setConstant(c0);
  for (std::size_t i = 0; i < lam.size(); ++i) u[p](Eigen::Index(i)) = c * std::exp(-p * lam[i]);
  Vec F = chart.eta_plus(p, u[p]);
  for (std::size_t i = 0; i < lam.size(); ++i) F(Eigen::Index(i)) *= -std::exp((p + 3) * lam[i]);
  F.array() -= F.mean();
  Vec g = chart.solve_delbar(F);
  for (std::size_t i = 0; i < lam.size(); ++i) u[p + 2](Eigen::Index(i)) = g(Eigen::Index(i)) * std::exp(-(p + 2) * lam[i]);
  return u;
}

// ---------------------------------------------------------------- estimates

QuantitativeReport verify_quantitative_inequality(const SMField& u, int m, double alpha) {
  if (m < 1) throw std::invalid_argument("verify_quantitative_inequality: m >= 1");
  for (int k = -(m - 1); k <= m - 1; ++k)
    if (u.has(k) && !u[k].isZero(0))
      throw std::invalid_argument("verify_quantitative_inequality: u has modes below m");
  const Chart& chart = *u.chart;
  const Eigen::VectorXd& w = chart.weights();
  auto n2 = [&w](const Vec& x) { return (w.array() * x.array().abs2()).sum(); };
  auto md = [&](int k) { return u.has(k) ? u[k] : Vec(Vec::Zero(Eigen::Index(chart.dim()))); };

  const SMField Xu = apply_frame(FrameOp::X, u);
  const SMField Pu = apply_frame(FrameOp::V, Xu);
  const SMField Qu = project_high(Pu, m + 1);
  const SMField XVu = apply_frame(FrameOp::X, apply_frame(FrameOp::V, u));
  const double e1 = n2(chart.eta_minus(m + 1, md(m + 1))) + n2(chart.eta_plus(-m - 1, md(-m - 1)));
  const double e0 = n2(chart.eta_minus(m, md(m))) + n2(chart.eta_plus(-m, md(-m)));
  const double v2 = std::pow(norm(project_high(Xu, m + 1)), 2);
  const double w2 = std::pow(norm(project_high(XVu, m + 1)), 2);

  QuantitativeReport r;
  r.coef_m1 = 1 - m * m + alpha * (m + 1) * (m + 1);
  r.coef_m = 1 - (m - 1) * (m - 1) + alpha * m * m;
  r.lhs = std::pow(norm(Qu), 2);
  r.rhs = r.coef_m1 * e1 + r.coef_m * e0 + alpha * w2 + v2;
  r.slack = r.lhs - r.rhs;
  double low = 0;
  for (int k = -m; k <= m; ++k) low += double(k) * k * std::pow(mode_norm(Xu, k), 2);
  const double P2 = std::pow(norm(Pu), 2);
  r.q1_defect = std::abs(P2 - low - r.lhs) / (P2 > 0 ? P2 : 1);
  return r;
}

}  // namespace anosov
