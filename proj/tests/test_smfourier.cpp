#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "anosov/cocycle.hpp"
#include "anosov/smfourier.hpp"

using namespace anosov;
using C = RepresentationChart::Component;

namespace {

ConformalTorus smooth(int n) {
  return ConformalTorus::from_function(n, n, 2 * M_PI, 2 * M_PI, [](double x, double y) {
    return 0.2 * std::cos(x) + 0.1 * std::sin(2 * y) + 0.05 * std::cos(x - y);
  });
}

RepresentationChart small_rep() {
  return RepresentationChart({{C::trivial, 0, 0},
                              {C::principal, 2.5, 0},
                              {C::principal, 7.0, 0},
                              {C::holomorphic, -2, 2},
                              {C::antiholomorphic, -2, 2},
                              {C::holomorphic, -6, 3},
                              {C::antiholomorphic, -6, 3}});
}

// plane wave e^{i(ax+by)} times c
struct Wave {
  cplx c;
  int a, b;
  cplx operator()(double x, double y) const { return c * std::exp(cplx(0, a * x + b * y)); }
};

}  // namespace

TEST_CASE("V multiplies mode k by ik") {
  TorusChart chart(smooth(16));
  std::mt19937_64 rng(1);
  const SMField u = random_field(chart, 4, rng);
  const SMField Vu = apply_frame(FrameOp::V, u);
  for (int k = -4; k <= 4; ++k) CHECK((Vu[k] - cplx(0, k) * u[k]).norm() < 1e-14 * (1 + u[k].norm()));
}

TEST_CASE("X agrees with the geodesic vector field pointwise") {
  const ConformalTorus t = smooth(32);
  TorusChart chart(t);
  const std::vector<std::pair<int, Wave>> parts{
      {-2, {cplx(0.3, 0.1), 1, -1}}, {0, {cplx(1, 0), 0, 1}}, {1, {cplx(-0.2, 0.5), 2, 0}}, {3, {cplx(0.1, 0), 1, 1}}};
  SMField u(chart, 3);
  for (const auto& [k, w] : parts) u[k] += chart.sample([&w](double x, double y) { return w(x, y); });
  const SMField Xu = apply_frame(FrameOp::X, u);
  const Vec xs = chart.sample([](double x, double) { return cplx(x); });
  const Vec ys = chart.sample([](double, double y) { return cplx(y); });
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<Eigen::Index> I(0, xs.size() - 1);
  std::uniform_real_distribution<double> Th(0, 2 * M_PI);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index i = I(rng);
    const double x = xs(i).real(), y = ys(i).real(), th = Th(rng);
    double d[3];
    geodesic_rhs(t.jet(x, y), th, d);
    cplx expect = 0;
    for (const auto& [k, w] : parts) {
      const cplx h = w(x, y);
      expect += (d[0] * cplx(0, w.a) * h + d[1] * cplx(0, w.b) * h + d[2] * cplx(0, k) * h) *
                std::exp(cplx(0, k * th));
    }
    cplx got = 0;
    for (int k = -Xu.N; k <= Xu.N; ++k) got += Xu[k](i) * std::exp(cplx(0, k * th));
    CHECK(std::abs(got - expect) < 1e-10);
  }
}

TEST_CASE("flat torus raising and lowering") {
  TorusChart chart(ConformalTorus::flat(16, 16, 2 * M_PI, 2 * M_PI));
  const Wave w{cplx(1, 0), 2, -3};
  const Vec h = chart.sample([&](double x, double y) { return w(x, y); });
  // X = cos(theta) d_x + sin(theta) d_y splits into (d_x -+ i d_y)/2 on e^{+-i theta}
  const cplx up = cplx(0, 0.5) * cplx(w.a, -w.b), down = cplx(0, 0.5) * cplx(w.a, w.b);
  for (int k : {-2, 0, 3}) {
    CHECK((chart.eta_plus(k, h) - up * h).norm() < 1e-12 * h.norm());
    CHECK((chart.eta_minus(k, h) - down * h).norm() < 1e-12 * h.norm());
  }
}

TEST_CASE("eta operators are skew adjoint") {
  std::mt19937_64 rng(3);
  TorusChart torus(smooth(32));
  const SMField a = random_field(torus, 3, rng), b = random_field(torus, 3, rng);
  for (int k = -2; k <= 2; ++k) CHECK(adjoint_defect(torus, k, a[k], b[k + 1]) < 1e-12);
  const RepresentationChart rep = small_rep();
  const SMField c = random_field(rep, 5, rng), d = random_field(rep, 5, rng);
  for (int k = -4; k <= 4; ++k) CHECK(adjoint_defect(rep, k, c[k], d[k + 1]) < 1e-14);
}

TEST_CASE("representation ladders") {
  const RepresentationChart rep = small_rep();
  CHECK(rep.dim() == 7);
  CHECK(rep.ladder(1, 3) == doctest::Approx(0.5 * std::sqrt(2.5 + 12)));
  // the discrete ladders terminate: lowering the lowest vector gives zero
  Vec e = Vec::Zero(7);
  e(3) = 1;
  CHECK(rep.eta_minus(2, e).norm() < 1e-15);
  CHECK(rep.eta_plus(2, e).norm() == doctest::Approx(rep.ladder(3, 2)));
  CHECK_FALSE(rep.allowed(1, 3));
  CHECK(rep.allowed(2, 3));
  CHECK(rep.allowed(-2, 4));
  CHECK_FALSE(rep.allowed(2, 4));
  CHECK(rep.allowed(0, 0));
  CHECK_FALSE(rep.allowed(1, 0));
  CHECK(rep.mul_curvature(e).isApprox(-e));
}

TEST_CASE("structure equations") {
  std::mt19937_64 rng(4);
  TorusChart torus(smooth(64));
  const auto r = structure_residuals(random_field(torus, 4, rng));
  CHECK(r.XV_minus_Xperp < 1e-12);
  CHECK(r.VXperp_minus_X < 1e-12);
  CHECK(r.XXperp_plus_KV < 1e-12);
  const RepresentationChart rep = small_rep();
  const auto q = structure_residuals(random_field(rep, 6, rng));
  CHECK(q.XXperp_plus_KV < 1e-13);
}

TEST_CASE("energy identity") {
  std::mt19937_64 rng(5);
  TorusChart flat(ConformalTorus::flat(16, 16, 1, 2));
  const auto f = pestov_residual(random_field(flat, 4, rng));
  CHECK(f.residual < 1e-13);
  CHECK(f.KVuVu == 0);
  TorusChart torus(smooth(64));
  const auto t = pestov_residual(random_field(torus, 4, rng));
  CHECK(t.residual < 1e-12);
  const auto o = pestov_residual(random_field(small_rep(), 6, rng));
  CHECK(o.residual < 1e-13);
  CHECK(o.KVuVu < 0);
}

TEST_CASE("alpha estimates") {
  TorusChart flat(ConformalTorus::flat(8, 8, 1, 1));
  CHECK(alpha_lower_bound(alpha_test_space(flat, 2, 2)) == doctest::Approx(1).epsilon(1e-10));
  const RepresentationChart rep = small_rep();
  CHECK(alpha_lower_bound(alpha_test_space(rep, 4)) >= 1 - 1e-12);

  CHECK(std::isinf(alpha_along_profile(CurvatureProfile::constant(1, 5, 0.01), 16)));
  CHECK(alpha_along_profile(CurvatureProfile::constant(1, 5, 0.01), 16) < 0);
  const double neg = alpha_along_profile(CurvatureProfile::constant(-1, 5, 0.01), 16);
  CHECK(neg >= 1);
  // min of 1 + ||psi||^2/||psi'||^2 over degree 16 on a length 5 circle
  CHECK(neg == doctest::Approx(1 + std::pow(5 / (2 * M_PI * 16), 2)).epsilon(1e-6));

  // 1 - 1/beta for the ground state of the Hill operator: K = -1 + 1.5 cos t
  auto p = CurvatureProfile::from_function([](double t) { return -1 + 1.5 * std::cos(t); },
                                           2 * M_PI, 0.005, true);
  TerminatorOptions o;
  o.tol = 1e-4;
  o.phases = 8;
  const auto cert = terminator_bisect({p}, o);
  const double beta = 0.5 * (cert.beta_lo + cert.beta_hi);
  CHECK(alpha_along_profile(p, 48) == doctest::Approx(1 - 1 / beta).epsilon(2e-3));
}

TEST_CASE("minimum norm transport solver") {
  std::mt19937_64 rng(6);
  TorusChart torus(smooth(8));
  const SMField h0 = random_field(torus, 5, rng, 2);
  const SMField f = apply_frame(FrameOp::X, apply_frame(FrameOp::V, h0));
  SMField rhs(torus, 5);
  for (int k = -5; k <= 5; ++k) rhs[k] = f[k];
  // h0 solves the system exactly; a small ridge keeps the bias below 1e-8
  const auto r = solve_adjoint_transport(rhs, 0, 6, 1e-14);
  CHECK(r.ok);
  CHECK(r.rel_residual < 1e-8);
  const SMField g = apply_frame(FrameOp::X, apply_frame(FrameOp::V, r.h));
  double err = 0;
  for (int k = -5; k <= 5; ++k) err = std::max(err, mode_norm(g - rhs, k));
  CHECK(err < 1e-8 * norm(rhs));
  CHECK(norm(r.h) <= norm(h0) * (1 + 1e-8));

  const auto z = solve_adjoint_transport(SMField(torus, 5), 0, 6);
  CHECK(norm(z.h) == 0);
  CHECK(z.ok);
  // exact zero singular values with no ridge
  const auto nr = solve_adjoint_transport(rhs, 0, 6, 0.0);
  CHECK(std::isfinite(nr.rel_residual));
}

TEST_CASE("dense and iterative transport solves agree") {
  std::mt19937_64 rng(16);
  TorusChart torus(smooth(8));
  for (int m : {0, 2}) {
    const SMField f = random_field(torus, 4, rng, 2);
    const auto d = solve_adjoint_transport(f, m, 5, 1e-10, 1e-8, 1u << 30);
    const auto c = solve_adjoint_transport(f, m, 5, 1e-10, 1e-8, 0);
    CHECK(c.rel_residual == doctest::Approx(d.rel_residual).epsilon(1e-6).scale(1e-9));
    CHECK(norm(c.h - d.h) < 1e-6 * norm(d.h));
    for (int k = -m; k <= m && m > 0; ++k) CHECK(mode_norm(c.h, k) == 0);
  }
}

TEST_CASE("iterative solve reaches the ridge floor on a large truncation") {
  // N = 24 on 8x8 takes over 20000 CGLS steps; the SVD floor here is 8.2e-11
  TorusChart torus(ConformalTorus::from_function(8, 8, 2 * M_PI, 2 * M_PI, [](double x, double y) {
    return 0.2 * std::cos(x) + 0.1 * std::sin(2 * y);
  }));
  SMField q(torus, 1);
  const auto& lam = torus.torus().lambda();
  for (std::size_t i = 0; i < lam.size(); ++i) {
    q[1](Eigen::Index(i)) = cplx(0.5, 0.25) * std::exp(-lam[i]);
    q[-1](Eigen::Index(i)) = cplx(0.5, -0.25) * std::exp(-lam[i]);
  }
  const auto ls = solve_adjoint_transport(-1.0 * apply_frame(FrameOp::X, q), 1, 24);
  CHECK(ls.ok);
  CHECK(ls.rel_residual < 1e-9);
}

TEST_CASE("invariant extensions") {
  TorusChart torus(smooth(8));
  SMField c(torus, 0);
  c[0].setConstant(cplx(0.7, -0.2));
  const auto w0 = invariant_extension(Variant::w0, c, 6);
  CHECK(w0.ok);
  CHECK(w0.prescribed_error < 1e-12);
  CHECK(norm(w0.w - c.padded(w0.w.N)) < 1e-10);
  CHECK_THROWS(invariant_extension(Variant::w0, c, 1));
  CHECK(to_string(Variant::wm) == "wm");

  // flat torus: constant data on modes +-1 is already invariant
  TorusChart flat(ConformalTorus::flat(8, 8, 1, 1));
  SMField fd(flat, 1);
  fd[1].setConstant(cplx(0.5, 0.25));
  fd[-1].setConstant(cplx(0.5, -0.25));
  const auto fw = invariant_extension(Variant::w1, fd, 6);
  CHECK(fw.ok);
  CHECK(norm(fw.w - fd.padded(fw.w.N)) < 1e-12);

  // representation chart: the lowest vectors of the m = 1 ladders
  const RepresentationChart rep({{C::principal, 3.0, 0}, {C::holomorphic, 0, 1}, {C::antiholomorphic, 0, 1}});
  SMField rd(rep, 1);
  rd[1](1) = cplx(0.6, 0.1);
  rd[-1](2) = cplx(0.6, -0.1);
  const auto rw = invariant_extension(Variant::w1, rd, 24);
  CHECK(rw.ok);
  CHECK(rw.data_defect < 1e-14);
  CHECK(rw.prescribed_error < 1e-12);
  CHECK(rw.interior_residual < 1e-9);
  for (const auto& e : rw.ladder)
    if (!e.boundary) CHECK(e.residual < 1e-9 * norm(rw.w));

  // prescribed data violating its constraint is reported
  SMField bad(torus, 1);
  bad[1] = torus.sample([](double x, double) { return cplx(std::cos(x)); });
  CHECK(invariant_extension(Variant::w1, bad, 4).data_defect > 0.1);
}

TEST_CASE("curved torus w1 data: truncation leaves an inconsistent system") {
  TorusChart torus(smooth(8));
  SMField d(torus, 1);
  const auto& lam = torus.torus().lambda();
  for (std::size_t i = 0; i < lam.size(); ++i) {
    d[1](Eigen::Index(i)) = cplx(0.5, 0.25) * std::exp(-lam[i]);
    d[-1](Eigen::Index(i)) = cplx(0.5, -0.25) * std::exp(-lam[i]);
  }
  const auto w = invariant_extension(Variant::w1, d, 6);
  CHECK(w.data_defect < 1e-12);
  CHECK(w.prescribed_error < 1e-12);
  CHECK_FALSE(w.ok);
  CHECK(w.solver_residual > 1e-6);
  CHECK(w.solver_residual < 1e-2);
}

TEST_CASE("ladder residual separates invariants from random fields") {
  std::mt19937_64 rng(7);
  TorusChart torus(smooth(32));
  const SMField u = torus_planted_invariant(torus, 1, 0.5, cplx(0.2, 0.3), 5);
  for (const auto& e : ladder_residual(u))
    if (e.k <= 2) CHECK(e.residual < 1e-10);
  const SMField r = random_field(torus, 5, rng);
  double worst = 0;
  for (const auto& e : ladder_residual(r)) worst = std::max(worst, e.residual);
  CHECK(worst > 0.1 * norm(r));
}

TEST_CASE("products of fields") {
  TorusChart torus(smooth(32));
  SMField a(torus, 2);
  a[0].setConstant(2.0);
  const auto sq = fourier_product(a, a);
  CHECK(mode_norm(sq.w, 0) == doctest::Approx(4 * std::sqrt(torus.weights().sum())));
  for (int k = 1; k <= 4; ++k) CHECK(mode_norm(sq.w, k) == 0);

  // w_2 = a_1^2 for a field with one mode
  SMField b(torus, 2);
  b[1] = torus.sample([](double x, double y) { return cplx(std::sin(x), std::cos(y)); });
  const auto b2 = fourier_product(b, b);
  CHECK((b2.w[2] - b[1].cwiseProduct(b[1])).norm() == 0);
  CHECK(mode_norm(b2.w, 1) == 0);

  const SMField u = torus_planted_invariant(torus, 1, 0.7, cplx(0.4, 0.2), 5);
  const SMField v = torus_planted_invariant(torus, 2, cplx(0.3, -0.5), 0.8, 5);
  const auto uv = fourier_product(u, v);
  CHECK(uv.interior_max == 3);
  CHECK(uv.interior_residual < 1e-10);
  TorusChart other(smooth(32));
  CHECK_THROWS(fourier_product(u, SMField(other, 2)));
  SMField neg(torus, 1);
  neg[-1].setConstant(1);
  CHECK_THROWS(fourier_product(u, neg));
}

TEST_CASE("quantitative inequality") {
  std::mt19937_64 rng(8);
  const RepresentationChart rep = small_rep();
  for (int m : {1, 2, 3}) {
    const SMField u = random_field(rep, 7, rng, 3, m);
    const auto q = verify_quantitative_inequality(u, m, 1.0);
    CHECK(q.slack >= -1e-10 * q.lhs);
    CHECK(q.q1_defect < 1e-12);
    CHECK(q.coef_m1 == doctest::Approx(1 - m * m + (m + 1) * (m + 1)));
  }
  const auto z = verify_quantitative_inequality(SMField(rep, 5), 2, 1.0);
  CHECK(z.lhs == 0);
  CHECK(z.rhs == 0);
  CHECK_THROWS(verify_quantitative_inequality(random_field(rep, 4, rng), 2, 1.0));
  CHECK_THROWS(verify_quantitative_inequality(SMField(rep, 4), 0, 1.0));
}

TEST_CASE("norms and projections") {
  TorusChart flat(ConformalTorus::flat(8, 8, 1, 1));
  SMField u(flat, 4);
  u[3].setConstant(2.0);
  const double n = norm(u);
  CHECK(n == doctest::Approx(2 * std::sqrt(flat.weights().sum())));
  CHECK(mixed_norm(u, 1) == doctest::Approx(std::sqrt(10.0) * n));
  CHECK(mixed_norm(u, -0.5) == doctest::Approx(std::pow(10.0, -0.25) * n));
  CHECK(norm(project_high(u, 4)) == 0);
  CHECK(norm(project_high(u, 3)) == doctest::Approx(n));
  CHECK(std::abs(inner(u, cplx(0, 1) * u) - cplx(0, -1) * n * n) < 1e-12);
}

TEST_CASE("X changes the parity of modes") {
  std::mt19937_64 rng(9);
  TorusChart torus(smooth(16));
  SMField u = random_field(torus, 4, rng);
  for (int k = -3; k <= 3; k += 2) u[k].setZero();
  const SMField Xu = apply_frame(FrameOp::X, u);
  CHECK(Xu.N == 5);
  for (int k = -4; k <= 4; k += 2) CHECK(mode_norm(Xu, k) == 0);
  CHECK(mode_norm(Xu, 1) > 0);
}
