#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anosov/cocycle.hpp"

using namespace anosov;

namespace {

CurvatureProfile wobbly(double scale = 1) {
  auto p = CurvatureProfile::from_function(
      [scale](double t) { return scale * (-1 + 1.5 * std::cos(t)); }, 2 * M_PI, 0.01, true);
  p.id = "wobbly";
  return p;
}

TerminatorOptions quick() {
  TerminatorOptions o;
  o.phases = 4;
  o.T_max = 100;
  return o;
}

}  // namespace

TEST_CASE("Jacobi solutions for constant curvature") {
  const auto flat = CurvatureProfile::constant(0, 10, 0.01);
  const auto s0 = integrate_beta_jacobi(flat, 3, 2, -0.5, 10);
  for (std::size_t i = 0; i < s0.t.size(); ++i) CHECK(s0.y[i] == doctest::Approx(2 - 0.5 * s0.t[i]));

  const auto sph = CurvatureProfile::constant(1, 10, 0.01);
  const auto s1 = integrate_beta_jacobi(sph, 4, 0, 1, 3);
  for (std::size_t i = 0; i < s1.t.size(); i += 17) {
    CHECK(std::abs(s1.y[i] - std::sin(2 * s1.t[i]) / 2) < 1e-8);
    CHECK(std::abs(s1.yd[i] - std::cos(2 * s1.t[i])) < 1e-8);
  }
  const auto hyp = CurvatureProfile::constant(-1, 10, 0.01);
  const auto s2 = integrate_beta_jacobi(hyp, 1, 0, 1, 4);
  for (std::size_t i = 0; i < s2.t.size(); i += 17)
    CHECK(s2.y[i] == doctest::Approx(std::sinh(s2.t[i])).epsilon(1e-8));
  CHECK_THROWS(integrate_beta_jacobi(flat, 1, 0, 1, 0));
}

TEST_CASE("first conjugate times") {
  const auto sph = CurvatureProfile::constant(1, 2 * M_PI, 0.01);
  CHECK(first_conjugate_time(sph, 1, 10).value() == doctest::Approx(M_PI).epsilon(1e-9));
  CHECK(first_conjugate_time(sph, 4, 10).value() == doctest::Approx(M_PI / 2).epsilon(1e-9));
  CHECK(first_conjugate_time(sph, 0.25, 10, 1.3).value() == doctest::Approx(2 * M_PI).epsilon(1e-9));
  CHECK_FALSE(first_conjugate_time(sph, 0.01, 10).has_value());  // first zero at 10 pi
  CHECK_FALSE(first_conjugate_time(CurvatureProfile::constant(-1, 5, 0.01), 1, 300).has_value());
  CHECK_FALSE(first_conjugate_time(CurvatureProfile::constant(0, 5, 0.01), 1, 300).has_value());
  // a finite, non-periodic profile stops at its end
  const auto shortp = CurvatureProfile::constant(1, 2, 0.01, false);
  CHECK_FALSE(first_conjugate_time(shortp, 1, 100).has_value());
}

TEST_CASE("cocycle matrices") {
  const double b = 2.0, T = 1.5;
  const Eigen::Matrix2d M = cocycle_matrix(CurvatureProfile::constant(-1, 5, 0.005), b, T);
  const double w = std::sqrt(b);
  Eigen::Matrix2d E;
  E << std::cosh(w * T), std::sinh(w * T) / w, w * std::sinh(w * T), std::cosh(w * T);
  CHECK((M - E).norm() < 1e-9 * E.norm());
  // Wronskian conservation, relative to the cancellation in ad - bc
  for (double beta : {0.3, 1.0, 5.0})
    for (double t0 : {0.0, 1.0}) {
      const Eigen::Matrix2d C = cocycle_matrix(wobbly(), beta, 7, t0);
      CHECK(std::abs(C.determinant() - 1) < 1e-10 * std::max(1.0, C.squaredNorm()));
    }
}

TEST_CASE("Riccati solution is the log derivative of a Jacobi field") {
  const auto p = wobbly(0.4);
  const double beta = 1.3;
  const auto J = integrate_beta_jacobi(p, beta, 1, 0.3, 3);
  const auto R = riccati_integrate(p, beta, 0, 0.3, 3);
  REQUIRE_FALSE(R.blew_up);
  REQUIRE(R.r.size() == J.y.size());
  for (std::size_t i = 0; i < J.y.size(); ++i) CHECK(std::abs(R.r[i] - J.yd[i] / J.y[i]) < 1e-6);

  // r = cot t blows up at pi; starts from a pole
  const auto cot = riccati_integrate(CurvatureProfile::constant(1, 10, 0.001), 1, 0,
                                     std::numeric_limits<double>::infinity(), 5);
  CHECK(cot.blew_up);
  CHECK(cot.blowup_time == doctest::Approx(M_PI).epsilon(1e-4));
  CHECK(cot.r[1000] == doctest::Approx(1 / std::tan(1.0)).epsilon(1e-8));

  // backward direction: r = tanh(t) for K = -1 integrated from 0 to -2
  const auto back = riccati_integrate(CurvatureProfile::constant(-1, 10, 0.01), 1, 0, 0, -2);
  CHECK(back.t.back() == doctest::Approx(-2));
  CHECK(back.r.back() == doctest::Approx(std::tanh(-2.0)).epsilon(1e-8));
}

TEST_CASE("Hopf solutions") {
  const auto hyp = CurvatureProfile::constant(-1, 2, 0.01);
  const auto hp = riccati_hopf(hyp, 4, 20);
  for (std::size_t i = 0; i < hp.t.size(); ++i) {
    CHECK(hp.r_plus[i] == doctest::Approx(2).epsilon(1e-8));
    CHECK(hp.r_minus[i] == doctest::Approx(-2).epsilon(1e-8));
  }
  CHECK(hp.gap_min == doctest::Approx(4).epsilon(1e-8));

  // flat: r+ = 1/(t + R), r- = -1/(L + R - t); the gap is smallest at L/2
  const auto flat = CurvatureProfile::constant(0, 1, 0.01);
  double prev = INFINITY;
  for (double R : {10.0, 20.0, 40.0, 80.0}) {
    const double g = riccati_hopf(flat, 1, R).gap_min;
    CHECK(g < prev);
    CHECK(g == doctest::Approx(2 / (R + 0.5)).epsilon(1e-6));
    prev = g;
  }
  CHECK_THROWS_AS(riccati_hopf(CurvatureProfile::constant(1, 1, 0.01), 1, 20), ConjugatePointError);
  CHECK_THROWS(riccati_hopf(hyp, 1, 0));
  CHECK_THROWS(riccati_hopf(CurvatureProfile::constant(-1, 5, 0.01, false), 1, 3));
}

TEST_CASE("the stable direction decays at rate sqrt(beta)") {
  const double beta = 2.25;
  const auto hyp = CurvatureProfile::constant(-1, 1, 0.01);
  const auto hp = riccati_hopf(hyp, beta, 30);
  const double rm = hp.r_minus[0];
  const auto J = integrate_beta_jacobi(hyp, beta, 1, rm, 4);
  for (std::size_t i = 0; i < J.y.size(); i += 50)
    CHECK(J.y[i] == doctest::Approx(std::exp(-1.5 * J.t[i])).epsilon(0.02));
}

TEST_CASE("hyperbolicity verdicts") {
  const auto h = hyperbolicity_test(CurvatureProfile::constant(-1, 2, 0.01), 1);
  CHECK(h.verdict == Hyperbolicity::hyperbolic);
  CHECK(h.growth_rate == doctest::Approx(1).epsilon(1e-3));
  const auto f = hyperbolicity_test(CurvatureProfile::constant(0, 2, 0.01), 1);
  CHECK(f.verdict == Hyperbolicity::not_hyperbolic);
  CHECK(f.gap_4R < f.gap_2R);
  CHECK(to_string(Hyperbolicity::inconclusive) == "inconclusive");
  CHECK(to_string(Hyperbolicity::hyperbolic) == "hyperbolic");
}

TEST_CASE("terminator brackets") {
  auto opt = quick();
  const auto pos = terminator_bisect({CurvatureProfile::constant(1, 1, 0.01)}, opt);
  // the first zero pi/sqrt(beta) fits into T_max once beta >= (pi/T_max)^2
  const double edge = std::pow(M_PI / opt.T_max, 2);
  CHECK(pos.beta_lo <= edge);
  CHECK(pos.beta_hi >= edge);
  CHECK(pos.beta_hi - pos.beta_lo <= opt.tol);
  const auto neg = terminator_bisect({CurvatureProfile::constant(-1, 1, 0.01)}, opt);
  CHECK(neg.exceeds_beta_max);
  CHECK(neg.beta_lo == opt.beta_max);
  CHECK(std::isinf(neg.beta_hi));

  const auto c = terminator_bisect({wobbly()}, opt);
  REQUIRE_FALSE(c.exceeds_beta_max);
  CHECK(c.beta_hi - c.beta_lo <= opt.tol);
  CHECK(c.profiles == std::vector<std::string>{"wobbly"});
  // monotone: free below the bracket, conjugate above
  CHECK_FALSE(conjugate_scan({wobbly()}, c.beta_lo * 0.9, opt).time.has_value());
  const auto above = conjugate_scan({wobbly()}, c.beta_hi * 1.1, opt);
  CHECK(above.time.has_value());
  CHECK(above.profile.rfind("wobbly@", 0) == 0);

  // scaling K by s scales the terminator by 1/s
  const auto c2 = terminator_bisect({wobbly(2)}, opt);
  CHECK(c2.beta_lo <= c.beta_hi / 2 + opt.tol);
  CHECK(c2.beta_hi >= c.beta_lo / 2 - opt.tol);

  // adding a profile can only lower the terminator
  const auto both = terminator_bisect({wobbly(), wobbly(2)}, opt);
  CHECK(both.beta_hi <= c2.beta_hi + opt.tol);

  CHECK_THROWS(terminator_bisect({}, opt));
  opt.tol = 0;
  CHECK_THROWS(terminator_bisect({wobbly()}, opt));
}

TEST_CASE("Riccati comparison") {
  const auto sph = CurvatureProfile::constant(1, 5, 0.001);
  const auto hyp = CurvatureProfile::constant(-1, 5, 0.001);
  // equality case
  const auto eq = comparison_oracle(hyp, hyp, 0.2, 0.2, 3);
  CHECK(eq.holds);
  CHECK(std::abs(eq.min_difference) < 1e-12);
  // r0 = -tan t, r1 = tanh t
  const auto tt = comparison_oracle(sph, hyp, 0, 0, 1.2);
  CHECK(tt.precondition_ok);
  CHECK(tt.holds);
  CHECK(tt.min_difference == doctest::Approx(0).scale(1));
  // swapped roles violate the ordering
  CHECK_FALSE(comparison_oracle(hyp, sph, 0, 0, 1.2).holds);
  // -tan t blows up at pi/2
  CHECK_FALSE(comparison_oracle(sph, hyp, 0, 0, 2).precondition_ok);
  CHECK_THROWS(comparison_oracle(sph, CurvatureProfile::constant(-1, 5, 0.01), 0, 0, 1));
}

TEST_CASE("verdicts on constant curvature surfaces") {
  VerdictOptions o;
  o.n_dir = 8;
  o.T_window = 10;
  o.n_random = 1;
  o.random_length = 10;
  o.terminator = quick();
  const auto hyp = anosov_verdict(ConstantCurvature{-1}, o);
  CHECK(hyp.verdict == "Anosov-consistent");
  CHECK(hyp.certificate.exceeds_beta_max);
  const auto sph = anosov_verdict(ConstantCurvature{1}, o);
  CHECK(sph.verdict == "not-Anosov");
  CHECK(sph.certificate.beta_hi <= 1);
  const auto flat = anosov_verdict(ConformalTorus::flat(8, 8, 1, 1), o);
  CHECK(flat.verdict == "not-Anosov");
  CHECK(flat.trapping.trapped);
}

TEST_CASE("profile pools") {
  VerdictOptions o;
  o.n_closed = 3;
  o.n_random = 2;
  o.random_length = 5;
  const auto pool = sample_profiles(ConformalTorus::flat(8, 8, 1, 2), o);
  REQUIRE(pool.size() == 5);
  CHECK(pool[0].periodic);
  CHECK(pool[0].length() == doctest::Approx(1).epsilon(1e-9));
  CHECK(pool[1].length() == doctest::Approx(2).epsilon(1e-9));
  CHECK(pool[3].id == "orbit:0");
  CHECK_FALSE(pool[4].periodic);
  const auto sph = sample_profiles(ConstantCurvature{4}, o);
  CHECK(sph[0].length() == doctest::Approx(M_PI).epsilon(0.01));
}
