#include "anosov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace anosov {

double wrap_angle(double theta) {
  double t = std::fmod(theta, 2 * M_PI);
  if (t < 0) t += 2 * M_PI;
  if (t >= 2 * M_PI) t = 0;
  return t;
}

// ---------------------------------------------------------------- torus

ConformalTorus::ConformalTorus(const PeriodicGrid& grid, std::vector<double> lambda)
    : grid_(grid), lambda_(std::move(lambda)) {
  if (lambda_.size() != grid_.size())
    throw std::invalid_argument("ConformalTorus: lambda grid has wrong size");
  for (double v : lambda_)
    if (!std::isfinite(v)) throw std::invalid_argument("ConformalTorus: non-finite lambda");

  CGrid f(lambda_.begin(), lambda_.end());
  CGrid F = grid_.forward(f);
  const double n = double(grid_.size());
  double scale = 0;
  for (const auto& c : F) scale = std::max(scale, std::abs(c) / n);
  for (int iy = 0; iy < grid_.ny(); ++iy)
    for (int ix = 0; ix < grid_.nx(); ++ix) {
      cplx c = F[std::size_t(iy) * grid_.nx() + ix] / n;
      if (std::abs(c) <= 1e-15 * std::max(scale, 1.0)) continue;
      // keep Nyquist slots out, as the derivatives do
      if (2 * ix == grid_.nx() || 2 * iy == grid_.ny()) continue;
      if (ix == 0 && iy == 0) {
        terms_.push_back({0.0, 0.0, c});
        continue;
      }
      terms_.push_back({grid_.kx(ix), grid_.ky(iy), c});
    }
}

ConformalTorus ConformalTorus::flat(int nx, int ny, double Lx, double Ly) {
  return ConformalTorus(PeriodicGrid(nx, ny, Lx, Ly), std::vector<double>(std::size_t(nx) * ny, 0.0));
}

ConformalTorus ConformalTorus::from_function(int nx, int ny, double Lx, double Ly,
                                             const std::function<double(double, double)>& f) {
  PeriodicGrid g(nx, ny, Lx, Ly);
  std::vector<double> lam(g.size());
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) lam[std::size_t(iy) * nx + ix] = f(g.x(ix), g.y(iy));
  return ConformalTorus(g, std::move(lam));
}

std::vector<double> ConformalTorus::curvature() const {
  CGrid f(lambda_.begin(), lambda_.end());
  CGrid lap = grid_.laplacian(f);
  std::vector<double> K(grid_.size());
  for (std::size_t i = 0; i < K.size(); ++i) {
    K[i] = -std::exp(-2 * lambda_[i]) * lap[i].real();
    if (!std::isfinite(K[i])) throw std::runtime_error("curvature: non-finite value");
  }
  return K;
}

LambdaJet ConformalTorus::jet(double x, double y) const {
  LambdaJet j;
  for (const auto& t : terms_) {
    const double ph = t.kx * x + t.ky * y;
    const cplx e = t.c * cplx(std::cos(ph), std::sin(ph));
    // real part of c e^{i ph} and its derivatives
    j.l += e.real();
    j.lx += (cplx(0, t.kx) * e).real();
    j.ly += (cplx(0, t.ky) * e).real();
    j.lxx += -t.kx * t.kx * e.real();
    j.lxy += -t.kx * t.ky * e.real();
    j.lyy += -t.ky * t.ky * e.real();
  }
  return j;
}

double ConformalTorus::curvature_at(double x, double y) const {
  LambdaJet j = jet(x, y);
  double K = -std::exp(-2 * j.l) * (j.lxx + j.lyy);
  if (!std::isfinite(K)) throw std::runtime_error("curvature_at: non-finite value");
  return K;
}

bool ConformalTorus::is_flat() const {
  for (const auto& t : terms_)
    if (t.kx != 0 || t.ky != 0) return false;
  return true;
}

void ConformalTorus::wrap(double& x, double& y) const {
  x = std::fmod(x, grid_.Lx());
  if (x < 0) x += grid_.Lx();
  y = std::fmod(y, grid_.Ly());
  if (y < 0) y += grid_.Ly();
}

ConformalTorus ConformalTorus::resampled(int nx, int ny) const {
  PeriodicGrid g(nx, ny, grid_.Lx(), grid_.Ly());
  std::vector<double> lam(g.size());
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) lam[std::size_t(iy) * nx + ix] = jet(g.x(ix), g.y(iy)).l;
  return ConformalTorus(g, std::move(lam));
}

LambdaJet ConstantCurvature::jet(double x, double y) const {
  // lambda = log 2 - log(1 + K r^2)
  const double q = 1 + K0 * (x * x + y * y);
  LambdaJet j;
  j.l = std::log(2.0 / q);
  j.lx = -2 * K0 * x / q;
  j.ly = -2 * K0 * y / q;
  j.lxx = -2 * K0 / q + 4 * K0 * K0 * x * x / (q * q);
  j.lyy = -2 * K0 / q + 4 * K0 * K0 * y * y / (q * q);
  j.lxy = 4 * K0 * K0 * x * y / (q * q);
  return j;
}

// ---------------------------------------------------------------- disk

cplx mobius_apply(const Mobius& g, cplx z) {
  return (g(0, 0) * z + g(0, 1)) / (g(1, 0) * z + g(1, 1));
}

cplx mobius_derivative(const Mobius& g, cplx z) {
  const cplx d = g(1, 0) * z + g(1, 1);
  const cplx det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  return det / (d * d);
}

double disk_lambda(cplx z) { return std::log(2.0 / (1.0 - std::norm(z))); }

double cosh_distance(cplx z, cplx w) {
  return 1 + 2 * std::norm(z - w) / ((1 - std::norm(z)) * (1 - std::norm(w)));
}

cplx disk_geodesic_point(cplx p, double theta, double t) {
  const cplx w = std::polar(std::tanh(0.5 * t), theta);
  return (w + p) / (std::conj(p) * w + 1.0);
}

double disk_geodesic_angle(cplx p, double theta, double t) {
  const cplx w = std::polar(std::tanh(0.5 * t), theta);
  return theta - 2 * std::arg(std::conj(p) * w + 1.0);
}

// ---------------------------------------------------------------- octagon

FuchsianOctagon::FuchsianOctagon() {
  // right triangle (center, side midpoint, vertex) with angles pi/8, pi/8
  d_side_ = std::acosh(1 / std::tan(M_PI / 8));
  d_vertex_ = std::acosh(1 / (std::tan(M_PI / 8) * std::tan(M_PI / 8)));
  rho_side_ = std::tanh(0.5 * d_side_);
  rho_vertex_ = std::tanh(0.5 * d_vertex_);
  arc_center_ = (1 + rho_side_ * rho_side_) / (2 * rho_side_);
  arc_radius_ = (1 - rho_side_ * rho_side_) / (2 * rho_side_);

  const double ch = std::cosh(d_side_), sh = std::sinh(d_side_);
  // disk -> upper half plane: z = C(w) with C = [[1,-i],[1,i]]
  Mobius C;
  C << 1.0, cplx(0, -1), 1.0, cplx(0, 1);
  const Mobius Cinv = C.inverse();
  for (int k = 0; k < 8; ++k) {
    const cplx e = std::polar(1.0, k * M_PI / 4);
    Mobius g;
    g << ch, e * sh, std::conj(e) * sh, ch;
    disk_[k] = g;
    const Mobius h = Cinv * g * C;
    real_[k] = h.real();
  }
}

bool FuchsianOctagon::contains(cplx z, double tol) const {
  if (std::abs(z) >= 1) return false;
  for (int k = 0; k < 8; ++k) {
    const cplx c = std::polar(arc_center_, k * M_PI / 4);
    if (std::abs(z - c) < arc_radius_ - tol) return false;
  }
  return true;
}

FuchsianOctagon::Reduced FuchsianOctagon::reduce(cplx z, int max_steps) const {
  if (!(std::abs(z) < 1 - 1e-12))
    throw std::domain_error("reduce: point too close to the boundary circle");
  Reduced r{z, Mobius::Identity(), 0};
  for (; r.steps < max_steps; ++r.steps) {
    int best = -1;
    double best_abs = std::abs(r.z);
    for (int k = 0; k < 8; ++k) {
      const double a = std::abs(mobius_apply(disk_[k], r.z));
      if (a < best_abs - 1e-14) {
        best_abs = a;
        best = k;
      }
    }
    if (best < 0) return r;
    r.z = mobius_apply(disk_[best], r.z);
    r.g = disk_[best] * r.g;
  }
  throw std::runtime_error("reduce: step limit reached");
}

std::vector<int> FuchsianOctagon::relation() { return {0, 5, 2, 7, 4, 1, 6, 3}; }

Mobius FuchsianOctagon::word_matrix(const std::vector<int>& word) const {
  Mobius M = Mobius::Identity();
  for (int k : word) M = M * disk_.at(std::size_t(k));
  return M;
}

Eigen::Matrix2d FuchsianOctagon::word_matrix_real(const std::vector<int>& word) const {
  Eigen::Matrix2d M = Eigen::Matrix2d::Identity();
  for (int k : word) M = M * real_.at(std::size_t(k));
  return M;
}

std::vector<Mobius> FuchsianOctagon::ball(double R) const {
  const double cR = std::cosh(R);
  std::vector<Mobius> out{Mobius::Identity()};
  std::map<std::pair<long long, long long>, bool> seen;
  auto key = [](cplx w) {
    return std::make_pair(std::llround(w.real() * 1e9), std::llround(w.imag() * 1e9));
  };
  seen[key(0.0)] = true;
  std::size_t head = 0;
  while (head < out.size()) {
    const Mobius g = out[head++];
    for (int k = 0; k < 8; ++k) {
      Mobius h = disk_[k] * g;
      cplx w = mobius_apply(h, 0.0);
      if (cosh_distance(w, 0.0) > cR) continue;
      auto kk = key(w);
      if (seen.count(kk)) continue;
      seen[kk] = true;
      out.push_back(h);
    }
  }
  return out;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  auto legendre = [n](double z, double& p, double& dp) {
    double p0 = 1, p1 = z;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    p = p1;
    dp = n * (z * p1 - p0) / (z * z - 1);
  };
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5)), p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre(z, p, dp);
      const double dz = p / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    legendre(z, p, dp);
    x[i] = z;
    w[i] = 2 / ((1 - z * z) * dp * dp);
  }
}

FuchsianOctagon::Quadrature FuchsianOctagon::quadrature(int n) const {
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  Quadrature q;
  const double c = arc_center_;
  for (int k = 0; k < 8; ++k)
    for (int s = -1; s <= 1; s += 2)
      for (int i = 0; i < n; ++i) {
        // offset from the side normal in [0, pi/8] times s
        const double psi = 0.5 * (gx[i] + 1) * (M_PI / 8);
        const double wpsi = 0.5 * gw[i] * (M_PI / 8);
        const double cp = std::cos(psi);
        const double rmax = c * cp - std::sqrt(c * c * cp * cp - 1);
        for (int j = 0; j < n; ++j) {
          const double r = 0.5 * (gx[j] + 1) * rmax;
          const double wr = 0.5 * gw[j] * rmax;
          const double e2l = 4 / ((1 - r * r) * (1 - r * r));
          q.z.push_back(std::polar(r, k * M_PI / 4 + s * psi));
          q.w.push_back(wpsi * wr * r * e2l);
        }
      }
  return q;
}

FuchsianOctagon build_octagon() { return FuchsianOctagon(); }

double curvature_at(const SurfaceModel& model, double x, double y) {
  if (auto t = std::get_if<ConformalTorus>(&model)) return t->curvature_at(x, y);
  if (auto c = std::get_if<ConstantCurvature>(&model)) return c->K0;
  return -1.0;
}

// ---------------------------------------------------------------- closed geodesics

double word_length(const FuchsianOctagon& oct, const std::vector<int>& word) {
  const double tr = std::abs(oct.word_matrix(word).trace().real());
  if (tr <= 2) return 0;
  return 2 * std::acosh(tr / 2);
}

std::optional<ClosedGeodesic> closed_geodesic_from_word(const FuchsianOctagon& oct,
                                                        const std::vector<int>& word,
                                                        int samples) {
  if (word.empty()) throw std::invalid_argument("closed_geodesic_from_word: empty word");
  Mobius M = oct.word_matrix(word);
  const double tr = M.trace().real();
  if (std::abs(tr) <= 2 + 1e-12) return std::nullopt;
  if (tr < 0) M = -M;
  const double T = 2 * std::acosh(std::abs(tr) / 2);

  // fixed points: c z^2 + (d - a) z - b = 0
  const cplx a = M(0, 0), b = M(0, 1), c = M(1, 0), d = M(1, 1);
  const cplx disc = std::sqrt((d - a) * (d - a) + 4.0 * b * c);
  cplx z1 = (-(d - a) + disc) / (2.0 * c), z2 = (-(d - a) - disc) / (2.0 * c);
  z1 /= std::abs(z1);
  z2 /= std::abs(z2);
  // attracting point has |M'| < 1
  cplx zp = z1, zm = z2;
  if (std::abs(mobius_derivative(M, z1)) > 1) std::swap(zp, zm);

  // point of the axis nearest the origin, heading to zp
  const double half = 0.5 * std::abs(std::arg(zp / zm));
  cplx p;
  double theta;
  if (std::abs(half - M_PI / 2) < 1e-14) {
    p = 0;
    theta = std::arg(zp);
  } else {
    const cplx dir = (zp + zm) / std::abs(zp + zm);
    p = dir * ((1 - std::sin(half)) / std::cos(half));
    cplx tang = dir * cplx(0, 1);
    if ((std::conj(tang) * (zp - p)).real() < 0) tang = -tang;
    theta = std::arg(tang);
  }

  ClosedGeodesic g;
  g.T = T;
  g.source = "octagon-word";
  g.word = word;
  g.orbit.reserve(std::size_t(samples));
  for (int i = 0; i < samples; ++i) {
    const double t = T * i / samples;
    cplx z = disk_geodesic_point(p, theta, t);
    double th = disk_geodesic_angle(p, theta, t);
    auto r = oct.reduce(z);
    th += std::arg(mobius_derivative(r.g, z));
    g.orbit.push_back({r.z.real(), r.z.imag(), wrap_angle(th)});
  }
  // closure: the flow at time T returns to M(start)
  const cplx zT = disk_geodesic_point(p, theta, T);
  g.closure_residual = std::abs(zT - mobius_apply(M, p));
  return g;
}

std::vector<std::vector<int>> octagon_word_pool(const FuchsianOctagon& oct, int max_len,
                                                double trace_tol) {
  struct Item {
    double tr;
    std::vector<int> w;
  };
  std::vector<Item> items;
  std::vector<int> w;
  std::vector<Mobius> stack{Mobius::Identity()};
  std::function<void()> rec = [&]() {
    if (!w.empty()) {
      const double tr = std::abs(stack.back().trace().real());
      // cyclically reduced words only
      if (tr > 2 + 1e-9 && (w.size() == 1 || (w.front() + 4) % 8 != w.back()))
        items.push_back({tr, w});
    }
    if (int(w.size()) == max_len) return;
    for (int k = 0; k < 8; ++k) {
      if (!w.empty() && (w.back() + 4) % 8 == k) continue;
      w.push_back(k);
      stack.push_back(stack.back() * oct.disk_generators()[std::size_t(k)]);
      rec();
      stack.pop_back();
      w.pop_back();
    }
  };
  rec();
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.tr != b.tr) return a.tr < b.tr;
    return a.w.size() < b.w.size();
  });
  std::vector<std::vector<int>> out;
  double last = -1;
  for (const auto& it : items) {
    if (last > 0 && std::abs(it.tr - last) <= trace_tol * last) continue;
    out.push_back(it.w);
    last = it.tr;
  }
  return out;
}

std::pair<cplx, Mobius> reduce_to_fundamental_domain(const FuchsianOctagon& oct, cplx p) {
  auto r = oct.reduce(p, 200);
  return {r.z, r.g};
}

}  // namespace anosov
