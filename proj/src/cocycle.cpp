#include "anosov/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace anosov {

namespace {

struct JState {
  double y, yd;
};

JState jacobi_step(const CurvatureProfile& p, double beta, double t, JState s, double h) {
  auto f = [&](double tt, double y, double yd, double& dy, double& ddy) {
    dy = yd;
    ddy = -beta * p.at(tt) * y;
  };
  double a1, b1, a2, b2, a3, b3, a4, b4;
  f(t, s.y, s.yd, a1, b1);
  f(t + 0.5 * h, s.y + 0.5 * h * a1, s.yd + 0.5 * h * b1, a2, b2);
  f(t + 0.5 * h, s.y + 0.5 * h * a2, s.yd + 0.5 * h * b2, a3, b3);
  f(t + h, s.y + h * a3, s.yd + h * b3, a4, b4);
  return {s.y + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4), s.yd + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)};
}

std::size_t steps_for(const CurvatureProfile& p, double T) {
  return std::size_t(std::max(1.0, std::round(T / p.dt)));
}

}  // namespace

JacobiSolution integrate_beta_jacobi(const CurvatureProfile& profile, double beta, double y0,
                                     double yd0, double T, double t0) {
  if (!(T > 0)) throw std::invalid_argument("integrate_beta_jacobi: T <= 0");
  const std::size_t n = steps_for(profile, T);
  const double h = T / double(n);
  JacobiSolution out;
  JState s{y0, yd0};
  out.t.push_back(0);
  out.y.push_back(y0);
  out.yd.push_back(yd0);
  for (std::size_t i = 0; i < n; ++i) {
    s = jacobi_step(profile, beta, t0 + h * double(i), s, h);
    out.t.push_back(h * double(i + 1));
    out.y.push_back(s.y);
    out.yd.push_back(s.yd);
  }
  return out;
}

Eigen::Matrix2d cocycle_matrix(const CurvatureProfile& profile, double beta, double T,
                               double t0) {
  const std::size_t n = steps_for(profile, T);
  const double h = T / double(n);
  JState a{1, 0}, b{0, 1};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + h * double(i);
    a = jacobi_step(profile, beta, t, a, h);
    b = jacobi_step(profile, beta, t, b, h);
  }
  Eigen::Matrix2d M;
  M << a.y, b.y, a.yd, b.yd;
  return M;
}

std::optional<double> first_conjugate_time(const CurvatureProfile& profile, double beta,
                                           double T_max, double t0) {
  if (!(T_max > 0)) throw std::invalid_argument("first_conjugate_time: T_max <= 0");
  if (!profile.periodic) T_max = std::min(T_max, profile.dt * double(profile.K.size() - 1) - t0);
  if (!(T_max > 0)) return std::nullopt;
  const std::size_t n = steps_for(profile, T_max);
  const double h = T_max / double(n);
  JState s{0, 1};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + h * double(i);
    JState nx = jacobi_step(profile, beta, t, s, h);
    if (i > 0 ? (s.y > 0) != (nx.y > 0) || nx.y == 0 : nx.y <= 0) {
      // bisection on the length of the last step
      double lo = 0, hi = h;
      const bool pos = s.y > 0 || i == 0;
      while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double ym = jacobi_step(profile, beta, t, s, mid).y;
        if ((ym > 0) == pos && ym != 0) lo = mid;
        else hi = mid;
      }
      return h * double(i) + 0.5 * (lo + hi);
    }
    s = nx;
    // the zero set is scale invariant
    const double m = std::max(std::abs(s.y), std::abs(s.yd));
    if (m > 1e100) {
      s.y /= m;
      s.yd /= m;
    }
  }
  return std::nullopt;
}

RiccatiPath riccati_integrate(const CurvatureProfile& profile, double beta, double t0, double r0,
                              double t1) {
  RiccatiPath out;
  const std::size_t n = steps_for(profile, std::abs(t1 - t0));
  const double h = (t1 - t0) / double(n);
  bool recip = !(std::abs(r0) <= 1);
  double v = recip ? (std::isinf(r0) ? 0.0 : 1 / r0) : r0;
  auto rhs = [&](double t, double x, bool rec) {
    const double bk = beta * profile.at(t);
    return rec ? 1 + bk * x * x : -x * x - bk;
  };
  auto record = [&](double t) {
    out.t.push_back(t);
    if (!recip) out.r.push_back(v);
    else if (v == 0) out.r.push_back(h > 0 ? std::numeric_limits<double>::infinity()
                                           : -std::numeric_limits<double>::infinity());
    else out.r.push_back(1 / v);
  };
  record(t0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!recip && std::abs(v) > 1) {
      v = 1 / v;
      recip = true;
    } else if (recip && std::abs(v) > 1) {
      v = 1 / v;
      recip = false;
    }
    const double t = t0 + h * double(i);
    const double k1 = rhs(t, v, recip);
    const double k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1, recip);
    const double k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2, recip);
    const double k4 = rhs(t + h, v + h * k3, recip);
    const double nv = v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (recip && v != 0 && ((v > 0) != (nv > 0) || nv == 0)) {
      out.blew_up = true;
      out.blowup_time = t + h * std::abs(v) / (std::abs(v) + std::abs(nv));
      return out;
    }
    if (!std::isfinite(nv)) {
      out.blew_up = true;
      out.blowup_time = t;
      return out;
    }
    v = nv;
    record(t + h);
  }
  return out;
}

HopfPair riccati_hopf(const CurvatureProfile& profile, double beta, double R, double cap) {
  if (!(R > 0)) throw std::invalid_argument("riccati_hopf: R <= 0");
  const double dt = profile.dt;
  const double L = dt * double(profile.K.size());
  HopfPair hp;
  double a, b;  // reporting window
  RiccatiPath plus, minus;
  if (profile.periodic) {
    const double Rn = dt * std::round(R / dt);
    a = 0;
    b = L;
    plus = riccati_integrate(profile, beta, -Rn, cap, b);
    minus = riccati_integrate(profile, beta, b + Rn, -cap, a);
    hp.R_used = Rn;
  } else {
    const double Lend = dt * double(profile.K.size() - 1);
    const double Rn = dt * std::round(R / dt);
    if (2 * Rn >= Lend) throw std::invalid_argument("riccati_hopf: profile shorter than 2R");
    a = Rn;
    b = Lend - Rn;
    plus = riccati_integrate(profile, beta, 0, cap, Lend);
    minus = riccati_integrate(profile, beta, Lend, -cap, 0);
    hp.R_used = Rn;
  }
  if (plus.blew_up)
    throw ConjugatePointError("riccati_hopf: r+ blew up (conjugate point)", plus.blowup_time);
  if (minus.blew_up)
    throw ConjugatePointError("riccati_hopf: r- blew up (conjugate point)", minus.blowup_time);
  // minus runs backwards in time
  std::reverse(minus.t.begin(), minus.t.end());
  std::reverse(minus.r.begin(), minus.r.end());
  auto index_of = [dt](const RiccatiPath& p, double t) {
    return std::size_t(std::llround((t - p.t.front()) / dt));
  };
  const std::size_t n = std::size_t(std::llround((b - a) / dt));
  const std::size_t ip = index_of(plus, a), im = index_of(minus, a);
  hp.gap_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    hp.t.push_back(a + dt * double(i));
    hp.r_plus.push_back(plus.r[ip + i]);
    hp.r_minus.push_back(minus.r[im + i]);
    hp.gap_min = std::min(hp.gap_min, hp.r_plus.back() - hp.r_minus.back());
  }
  return hp;
}

std::string to_string(Hyperbolicity h) {
  switch (h) {
    case Hyperbolicity::hyperbolic: return "hyperbolic";
    case Hyperbolicity::not_hyperbolic: return "not-hyperbolic";
    default: return "inconclusive";
  }
}

HyperbolicityReport hyperbolicity_test(const CurvatureProfile& profile, double beta,
                                       double gap_tol, double R) {
  HyperbolicityReport rep;
  rep.gap_R = riccati_hopf(profile, beta, R).gap_min;
  rep.gap_2R = riccati_hopf(profile, beta, 2 * R).gap_min;
  rep.gap_4R = riccati_hopf(profile, beta, 4 * R).gap_min;
  const double g1 = rep.gap_R, g2 = rep.gap_2R, g4 = rep.gap_4R;
  if (g4 > gap_tol && std::abs(g4 - g2) <= 0.1 * g4 && std::abs(g2 - g1) <= 0.1 * g2)
    rep.verdict = Hyperbolicity::hyperbolic;
  else if (g4 <= gap_tol || (g4 < 0.9 * g2 && g2 < 0.9 * g1))
    rep.verdict = Hyperbolicity::not_hyperbolic;
  const double T = std::max(4 * R, profile.dt * double(profile.K.size()));
  if (profile.periodic || T < profile.dt * double(profile.K.size())) {
    Eigen::Matrix2d M = cocycle_matrix(profile, beta, T);
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(M);
    rep.growth_rate = std::log(svd.singularValues()(0)) / T;
  }
  return rep;
}

ConjugateRecord conjugate_scan(const std::vector<CurvatureProfile>& profiles, double beta,
                               const TerminatorOptions& opt) {
  struct Job {
    std::size_t p;
    double t0;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& pr = profiles[i];
    const double L = pr.dt * double(pr.K.size());
    const double span = pr.periodic ? L : 0.5 * L;
    const int nph = std::max(1, opt.phases);
    for (int k = 0; k < nph; ++k) jobs.push_back({i, pr.dt * std::round(span * k / nph / pr.dt)});
  }
  std::vector<std::optional<double>> res(jobs.size());
  parallel_for(int(jobs.size()), opt.workers, [&](int j) {
    const auto& jb = jobs[std::size_t(j)];
    res[std::size_t(j)] = first_conjugate_time(profiles[jb.p], beta, opt.T_max, jb.t0);
  });
  ConjugateRecord rec;
  rec.beta = beta;
  for (std::size_t j = 0; j < jobs.size(); ++j)
    if (res[j]) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "@%.4g", jobs[j].t0);
      rec.profile = profiles[jobs[j].p].id + buf;
      rec.time = res[j];
      break;
    }
  return rec;
}

TerminatorCertificate terminator_bisect(const std::vector<CurvatureProfile>& profiles,
                                        const TerminatorOptions& opt) {
  if (profiles.empty()) throw std::invalid_argument("terminator_bisect: empty profile pool");
  if (!(opt.beta_max > 0) || !(opt.tol > 0))
    throw std::invalid_argument("terminator_bisect: beta_max and tol must be positive");
  TerminatorCertificate c;
  c.beta_max = opt.beta_max;
  for (const auto& p : profiles) c.profiles.push_back(p.id);
  auto top = conjugate_scan(profiles, opt.beta_max, opt);
  c.evidence.push_back(top);
  if (!top.time) {
    c.exceeds_beta_max = true;
    c.beta_lo = opt.beta_max;
    c.beta_hi = std::numeric_limits<double>::infinity();
    return c;
  }
  double lo = 0, hi = opt.beta_max;
  while (hi - lo > opt.tol) {
    const double mid = 0.5 * (lo + hi);
    auto rec = conjugate_scan(profiles, mid, opt);
    c.evidence.push_back(rec);
    (rec.time ? hi : lo) = mid;
  }
  c.beta_lo = lo;
  c.beta_hi = hi;
  return c;
}

ComparisonResult comparison_oracle(const CurvatureProfile& K0, const CurvatureProfile& K1,
                                   double w0, double w1, double t0, double tol) {
  if (std::abs(K0.dt - K1.dt) > 1e-15 * K0.dt)
    throw std::invalid_argument("comparison_oracle: profiles must share the time step");
  ComparisonResult out;
  RiccatiPath r0 = riccati_integrate(K0, 1.0, 0, w0, t0);
  if (r0.blew_up) {
    out.precondition_ok = false;
    out.holds = false;
    return out;
  }
  RiccatiPath r1 = riccati_integrate(K1, 1.0, 0, w1, t0);
  out.min_difference = std::numeric_limits<double>::infinity();
  if (r1.blew_up) {
    // r1 escaped to -infinity
    out.holds = false;
    out.min_difference = -std::numeric_limits<double>::infinity();
    return out;
  }
  for (std::size_t i = 0; i < r0.r.size(); ++i) {
    const double d = r1.r[i] - r0.r[i];
    if (std::isnan(d)) continue;  // both infinite at the start
    out.min_difference = std::min(out.min_difference, d);
  }
  out.holds = out.min_difference >= -tol;
  return out;
}

std::vector<CurvatureProfile> sample_profiles(const SurfaceModel& model,
                                              const VerdictOptions& opt) {
  std::vector<CurvatureProfile> pool;
  if (auto oct = std::get_if<FuchsianOctagon>(&model)) {
    auto words = octagon_word_pool(*oct, 6);
    for (std::size_t i = 0; i < words.size() && int(pool.size()) < opt.n_closed; ++i)
      if (auto g = closed_geodesic_from_word(*oct, words[i], 64))
        pool.push_back(curvature_profile_along(model, *g, opt.dt));
  } else if (auto t = std::get_if<ConformalTorus>(&model)) {
    const int cls[][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}, {2, -1}, {1, -2}};
    for (const auto& c : cls) {
      if (int(pool.size()) >= opt.n_closed) break;
      auto s = find_closed_geodesics(*t, c[0], c[1], 1e-9, 64, opt.dt);
      if (s.converged) pool.push_back(curvature_profile_along(model, s.geodesic, opt.dt));
    }
  } else if (auto c = std::get_if<ConstantCurvature>(&model); c->K0 > 0) {
    // every geodesic of the round sphere closes after 2 pi / sqrt(K0)
    std::mt19937_64 rng(opt.seed + 7);
    const double P = 2 * M_PI / std::sqrt(c->K0);
    for (int i = 0; i < std::min(opt.n_closed, 4); ++i) {
      GeodesicOrbit o = integrate_geodesic(model, random_unit_tangent(model, rng), P, opt.dt);
      o.samples.pop_back();
      CurvatureProfile p = curvature_profile_along(model, o);
      p.periodic = true;
      p.id = "great-circle:" + std::to_string(i);
      pool.push_back(p);
    }
  }
  std::mt19937_64 rng(opt.seed);
  for (int i = 0; i < opt.n_random; ++i) {
    GeodesicOrbit o =
        integrate_geodesic(model, random_unit_tangent(model, rng), opt.random_length, opt.dt);
    CurvatureProfile p = curvature_profile_along(model, o);
    p.id = "orbit:" + std::to_string(i);
    pool.push_back(std::move(p));
  }
  return pool;
}

AnosovReport anosov_verdict(const SurfaceModel& model, const VerdictOptions& opt) {
  AnosovReport rep;
  rep.trapping = trapping_surrogate(model, opt.n_dir, opt.T_window, opt.kappa_floor, opt.seed,
                                    opt.terminator.workers, opt.dt);
  auto pool = sample_profiles(model, opt);
  rep.certificate = terminator_bisect(pool, opt.terminator);
  const auto& c = rep.certificate;
  rep.notes.push_back(rep.trapping.note);
  rep.notes.push_back("terminator estimated over a finite pool of " + std::to_string(pool.size()) +
                      " profiles");
  if (c.exceeds_beta_max)
    rep.notes.push_back("no conjugate points up to beta_max; reported as exceeding beta_max");
  if (rep.trapping.trapped) rep.verdict = "not-Anosov";
  else if (c.beta_hi <= 1) rep.verdict = "not-Anosov";
  else if (c.beta_lo > 1) rep.verdict = "Anosov-consistent";
  else rep.verdict = "inconclusive";
  return rep;
}

}  // namespace anosov
