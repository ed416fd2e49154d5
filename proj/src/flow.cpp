#include "anosov/flow.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace anosov {

double CurvatureProfile::at(double t) const {
  const std::size_t n = K.size();
  if (n == 0) return 0;
  double u = t / dt;
  if (periodic) {
    u = std::fmod(u, double(n));
    if (u < 0) u += double(n);
  } else {
    u = std::clamp(u, 0.0, double(n - 1));
  }
  const std::size_t i = std::size_t(std::floor(u));
  const double f = u - double(i);
  const std::size_t j = periodic ? (i + 1) % n : std::min(i + 1, n - 1);
  return (1 - f) * K[i % n] + f * K[j];
}

CurvatureProfile CurvatureProfile::constant(double K0, double length, double dt, bool periodic) {
  CurvatureProfile p;
  const auto n = std::size_t(std::max(1.0, std::round(length / dt)));
  p.dt = length / double(n);
  p.K.assign(n, K0);
  p.periodic = periodic;
  p.id = "constant";
  return p;
}

CurvatureProfile CurvatureProfile::from_function(const std::function<double(double)>& f,
                                                 double length, double dt, bool periodic) {
  CurvatureProfile p;
  const auto n = std::size_t(std::max(1.0, std::round(length / dt)));
  p.dt = length / double(n);
  p.K.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.K[i] = f(p.dt * double(i));
  p.periodic = periodic;
  p.id = "function";
  return p;
}

void geodesic_rhs(const LambdaJet& j, double theta, double out[3]) {
  const double e = std::exp(-j.l), c = std::cos(theta), s = std::sin(theta);
  out[0] = e * c;
  out[1] = e * s;
  out[2] = e * (-j.lx * s + j.ly * c);
}

namespace {

template <class JetFn>
UnitTangent rk4(const JetFn& jet, UnitTangent s, double h) {
  double k1[3], k2[3], k3[3], k4[3];
  geodesic_rhs(jet(s.x, s.y), s.theta, k1);
  geodesic_rhs(jet(s.x + 0.5 * h * k1[0], s.y + 0.5 * h * k1[1]), s.theta + 0.5 * h * k1[2], k2);
  geodesic_rhs(jet(s.x + 0.5 * h * k2[0], s.y + 0.5 * h * k2[1]), s.theta + 0.5 * h * k2[2], k3);
  geodesic_rhs(jet(s.x + h * k3[0], s.y + h * k3[1]), s.theta + h * k3[2], k4);
  s.x += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
  s.y += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
  s.theta += h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]);
  return s;
}

// move a point back into a comfortable part of its chart
UnitTangent normalize(const SurfaceModel& model, UnitTangent s) {
  if (auto t = std::get_if<ConformalTorus>(&model)) {
    t->wrap(s.x, s.y);
  } else if (auto c = std::get_if<ConstantCurvature>(&model)) {
    const double r2 = s.x * s.x + s.y * s.y;
    if (c->K0 > 0 && c->K0 * r2 > 1) {
      // inversion z -> 1/(K0 conj z) is an isometry of the round chart
      const cplx z(s.x, s.y);
      const cplx w = 1.0 / (c->K0 * std::conj(z));
      s.theta = M_PI - s.theta + 2 * std::arg(z);
      s.x = w.real();
      s.y = w.imag();
    } else if (c->K0 < 0 && -c->K0 * r2 > 0.25) {
      // a disk automorphism moves the point to the origin keeping the angle
      s.x = s.y = 0;
    }
  } else {
    const auto& oct = std::get<FuchsianOctagon>(model);
    const cplx z(s.x, s.y);
    auto r = oct.reduce(z);
    s.theta += std::arg(mobius_derivative(r.g, z));
    s.x = r.z.real();
    s.y = r.z.imag();
  }
  s.theta = wrap_angle(s.theta);
  return s;
}

}  // namespace

UnitTangent flow_step(const SurfaceModel& model, UnitTangent s, double h) {
  if (auto t = std::get_if<ConformalTorus>(&model))
    return rk4([t](double x, double y) { return t->jet(x, y); }, s, h);
  if (auto c = std::get_if<ConstantCurvature>(&model))
    return rk4([c](double x, double y) { return c->jet(x, y); }, s, h);
  const cplx p(s.x, s.y);
  const cplx z = disk_geodesic_point(p, s.theta, h);
  return {z.real(), z.imag(), disk_geodesic_angle(p, s.theta, h)};
}

GeodesicOrbit integrate_geodesic(const SurfaceModel& model, UnitTangent start, double T,
                                 double dt) {
  if (!(dt > 0) || !(T > 0)) throw std::invalid_argument("integrate_geodesic: need T, dt > 0");
  const auto n = std::size_t(std::ceil(T / dt - 1e-9));
  if (n > 200000000) throw std::runtime_error("integrate_geodesic: step size underflow");
  const double h = T / double(n);
  GeodesicOrbit o;
  o.dt = h;
  o.t.reserve(n + 1);
  o.samples.reserve(n + 1);
  UnitTangent s = normalize(model, start);
  o.t.push_back(0);
  o.samples.push_back(s);
  for (std::size_t i = 1; i <= n; ++i) {
    s = normalize(model, flow_step(model, s, h));
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.theta))
      throw std::runtime_error("integrate_geodesic: non-finite state");
    o.t.push_back(h * double(i));
    o.samples.push_back(s);
  }
  return o;
}

namespace {

// lifted (unwrapped) endpoint on a torus
UnitTangent shoot(const ConformalTorus& torus, UnitTangent s, double T, double dt) {
  const auto n = std::size_t(std::max(1.0, std::ceil(std::abs(T) / dt)));
  const double h = T / double(n);
  auto jet = [&torus](double x, double y) { return torus.jet(x, y); };
  for (std::size_t i = 0; i < n; ++i) s = rk4(jet, s, h);
  return s;
}

double angle_diff(double a) {
  a = std::remainder(a, 2 * M_PI);
  return a;
}

}  // namespace

ClosedGeodesicSearch find_closed_geodesics(const ConformalTorus& torus, int p, int q, double tol,
                                           int samples, double dt, int max_iter) {
  if (p == 0 && q == 0) throw std::invalid_argument("find_closed_geodesics: (p,q) = (0,0)");
  const double Dx = p * torus.grid().Lx(), Dy = q * torus.grid().Ly();
  const double len = std::hypot(Dx, Dy);
  const double nx = Dx / len, ny = Dy / len;
  const double mx = -ny, my = nx;

  // initial length: straight segment measured in the metric
  double T0 = 0;
  const int nseg = 512;
  for (int i = 0; i < nseg; ++i) {
    const double u = (i + 0.5) / nseg;
    T0 += std::exp(torus.jet(u * Dx, u * Dy).l) * len / nseg;
  }

  Eigen::Vector3d z(0.0, std::atan2(Dy, Dx), T0);  // (offset, angle, length)
  auto F = [&](const Eigen::Vector3d& v) {
    UnitTangent s0{v(0) * mx, v(0) * my, v(1)};
    UnitTangent e = shoot(torus, s0, v(2), dt);
    return Eigen::Vector3d(e.x - s0.x - Dx, e.y - s0.y - Dy, angle_diff(e.theta - s0.theta));
  };

  ClosedGeodesicSearch out;
  Eigen::Vector3d r = F(z);
  for (out.iterations = 0; out.iterations < max_iter && r.norm() >= tol; ++out.iterations) {
    Eigen::Matrix3d J;
    const double eps = 1e-6;
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d a = z, b = z;
      a(c) += eps;
      b(c) -= eps;
      J.col(c) = (F(a) - F(b)) / (2 * eps);
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-8);
    Eigen::Vector3d step = svd.solve(-r);
    double damp = 1;
    bool improved = false;
    for (int k = 0; k < 30; ++k, damp *= 0.5) {
      Eigen::Vector3d zn = z + damp * step;
      if (!(zn(2) > 0)) continue;
      Eigen::Vector3d rn = F(zn);
      if (rn.norm() < r.norm()) {
        z = zn;
        r = rn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  out.residual = r.norm();
  out.converged = out.residual < tol;
  if (!out.converged) {
    out.message = "Newton did not reach the tolerance";
    return out;
  }

  ClosedGeodesic& g = out.geodesic;
  g.T = z(2);
  g.source = "torus-shooting";
  g.closure_residual = out.residual;
  UnitTangent s{z(0) * mx, z(0) * my, z(1)};
  const int sub = std::max(1, int(std::ceil(g.T / samples / dt)));
  const double h = g.T / samples / sub;
  for (int i = 0; i < samples; ++i) {
    UnitTangent w = s;
    torus.wrap(w.x, w.y);
    w.theta = wrap_angle(w.theta);
    g.orbit.push_back(w);
    s = shoot(torus, s, h * sub, h);
  }
  return out;
}

CurvatureProfile curvature_profile_along(const SurfaceModel& model, const ClosedGeodesic& geo,
                                         double dt) {
  if (geo.orbit.empty() || !(geo.T > 0))
    throw std::invalid_argument("curvature_profile_along: empty geodesic");
  GeodesicOrbit o = integrate_geodesic(model, geo.orbit.front(), geo.T, dt);
  CurvatureProfile p;
  p.dt = o.dt;
  p.periodic = true;
  p.K.reserve(o.samples.size() - 1);
  for (std::size_t i = 0; i + 1 < o.samples.size(); ++i)
    p.K.push_back(curvature_at(model, o.samples[i].x, o.samples[i].y));
  p.id = geo.source;
  for (int k : geo.word) p.id += (p.id == geo.source ? ":" : ",") + std::to_string(k);
  return p;
}

CurvatureProfile curvature_profile_along(const SurfaceModel& model, const GeodesicOrbit& orbit) {
  CurvatureProfile p;
  p.dt = orbit.dt;
  p.periodic = false;
  p.K.reserve(orbit.samples.size());
  for (const auto& s : orbit.samples) p.K.push_back(curvature_at(model, s.x, s.y));
  p.id = "orbit";
  return p;
}

double max_abs_curvature_along(const SurfaceModel& model, UnitTangent start, double T_window,
                               double dt) {
  if (!(T_window > 0)) throw std::invalid_argument("max_abs_curvature_along: T_window <= 0");
  if (std::holds_alternative<FuchsianOctagon>(model)) return 1.0;
  if (auto c = std::get_if<ConstantCurvature>(&model)) return std::abs(c->K0);
  const auto& t = std::get<ConformalTorus>(model);
  if (t.is_flat()) return 0.0;
  GeodesicOrbit o = integrate_geodesic(model, start, T_window, dt);
  double m = 0;
  for (const auto& s : o.samples) m = std::max(m, std::abs(t.curvature_at(s.x, s.y)));
  return m;
}

UnitTangent random_unit_tangent(const SurfaceModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0, 1);
  UnitTangent s;
  if (auto t = std::get_if<ConformalTorus>(&model)) {
    s.x = U(rng) * t->grid().Lx();
    s.y = U(rng) * t->grid().Ly();
  } else if (auto c = std::get_if<ConstantCurvature>(&model)) {
    // inside the part of the chart that normalize() keeps
    const double R = c->K0 == 0 ? 1.0 : 0.5 / std::sqrt(std::abs(c->K0));
    const double r = R * std::sqrt(U(rng)), a = 2 * M_PI * U(rng);
    s.x = r * std::cos(a);
    s.y = r * std::sin(a);
  } else {
    const auto& oct = std::get<FuchsianOctagon>(model);
    for (;;) {
      const double r = oct.vertex_radius() * std::sqrt(U(rng)), a = 2 * M_PI * U(rng);
      const cplx z = std::polar(r, a);
      if (oct.contains(z)) {
        s.x = z.real();
        s.y = z.imag();
        break;
      }
    }
  }
  s.theta = 2 * M_PI * U(rng);
  return s;
}

TrappingReport trapping_surrogate(const SurfaceModel& model, int n_dir, double T_window,
                                  double kappa_floor, unsigned long long seed, int workers,
                                  double dt) {
  TrappingReport rep;
  rep.n_dir = n_dir;
  rep.T_window = T_window;
  rep.kappa_floor = kappa_floor;
  std::mt19937_64 rng(seed);
  std::vector<UnitTangent> starts;
  for (int i = 0; i < n_dir; ++i) starts.push_back(random_unit_tangent(model, rng));
  std::vector<double> m(starts.size());
  parallel_for(n_dir, workers, [&](int i) {
    m[std::size_t(i)] = max_abs_curvature_along(model, starts[std::size_t(i)], T_window, dt);
  });
  rep.min_max_abs_K = m.empty() ? 0 : *std::min_element(m.begin(), m.end());
  rep.trapped = !m.empty() && rep.min_max_abs_K < kappa_floor;
  rep.note = rep.trapped ? "trapping detected (finite test)"
                         : "no trapping detected (finite test)";
  return rep;
}

std::string orbit_csv(const SurfaceModel& model, const GeodesicOrbit& orbit) {
  std::string out = "t,x,y,theta,K\n";
  char buf[160];
  for (std::size_t i = 0; i < orbit.samples.size(); ++i) {
    const auto& s = orbit.samples[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", orbit.t[i], s.x, s.y, s.theta,
                  curvature_at(model, s.x, s.y));
    out += buf;
  }
  return out;
}

std::string profile_csv(const CurvatureProfile& profile) {
  std::string out = "t,K\n";
  char buf[64];
  for (std::size_t i = 0; i < profile.K.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", profile.dt * double(i), profile.K[i]);
    out += buf;
  }
  return out;
}

void parallel_for(int n, int workers, const std::function<void(int)>& f) {
  if (workers <= 0) workers = int(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i; (i = next++) < n && !failed;) {
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace anosov
