#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anosov/gulliver.hpp"

using namespace anosov;

namespace {

const double kCap = M_PI / (2 * M_SQRT2);

// trace of the exact monodromy of y'' + beta K y = 0 over one period of
// the two-piece profile: cap K = b^2 of length 2 r3, then K = -1 on R'
double monodromy_trace(const GulliverParams& p, double beta) {
  const double w = std::sqrt(beta) * p.b, c = 2 * p.r3, s = std::sqrt(beta);
  Eigen::Matrix2d A, B;
  A << std::cos(w * c), std::sin(w * c) / w, -w * std::sin(w * c), std::cos(w * c);
  B << std::cosh(s * p.Rp), std::sinh(s * p.Rp) / s, s * std::sinh(s * p.Rp), std::cosh(s * p.Rp);
  return (B * A).trace();
}

// ground state of the periodic problem reaches zero where the trace drops to 2
double exact_terminator(const GulliverParams& p) {
  double lo = 1, hi = 2;
  REQUIRE(monodromy_trace(p, lo) > 2);
  REQUIRE(monodromy_trace(p, hi) < 2);
  while (hi - lo > 1e-12) {
    const double m = 0.5 * (lo + hi);
    (monodromy_trace(p, m) > 2 ? lo : hi) = m;
  }
  return lo;
}

}  // namespace

TEST_CASE("r2 from the matching condition") {
  const double b = 0.02, r1 = kCap / b + 0.1;
  const double r2 = solve_r2(b, r1);
  CHECK(std::abs(std::sin(b * r1) / b - std::sinh(r1 - r2)) <= 1e-12);
  CHECK(r2 > 0);
  CHECK(r2 < r1);

  // b -> 0: sinh(r1 - r2) -> r1
  CHECK(solve_r2(1e-7, 1.0) == doctest::Approx(1 - std::asinh(1.0)).epsilon(1e-9));

  // b r1 just below pi/2
  const double rr = (M_PI / 2 - 1e-15) / 0.3;
  const double r2d = solve_r2(0.3, rr);
  CHECK(std::abs(std::sin(0.3 * rr) / 0.3 - std::sinh(rr - r2d)) <= 1e-10);

  CHECK_THROWS_AS(solve_r2(0, 1), std::domain_error);
  CHECK_THROWS_AS(solve_r2(1, 2), std::domain_error);
}

TEST_CASE("feasibility of the two conditions") {
  GulliverParams p;
  p.b = 0.02;
  p.delta = 0.1;
  p.eps = 0.05;
  p.r1 = kCap / p.b + p.delta;
  p.r2 = solve_r2(p.b, p.r1);
  p.r3 = p.r1 + p.eps;
  p.R = 6;
  p.Rp = p.R + p.r2 - p.r3;
  REQUIRE(p.Rp > 1);
  CHECK(validate(p).empty());
  const Feasibility f = feasibility(p, 1.75);
  CHECK(f.cond1);
  CHECK(f.cond2);
  CHECK(f.feasible());
  CHECK(f.margin1 == doctest::Approx(M_PI / 2 - std::sqrt(1.75) * p.b * p.r3));
  CHECK(f.caps_below_two);
  // the cap condition forces sqrt(2) b r3 > pi/2
  const Feasibility two = feasibility(p, 2);
  CHECK_FALSE(two.cond1);
  CHECK_FALSE(two.feasible());
  CHECK(feasibility(p, 0).feasible());

  // longer passages through the negative part raise the second margin
  double prev = -INFINITY;
  for (double R : {1.0, 2.0, 4.0, 8.0}) {
    GulliverParams q = p;
    q.R = R;
    q.Rp = R + q.r2 - q.r3;
    const double m2 = feasibility(q, 1.75).margin2;
    CHECK(m2 > prev);
    prev = m2;
  }

  GulliverParams bad = p;
  bad.r3 = p.r1;
  CHECK_FALSE(validate(bad).empty());
}

TEST_CASE("parameter search") {
  for (double beta : {1.51, 1.75, 1.999}) {
    const GulliverParams p = search_params(beta);
    INFO("beta_target " << beta);
    CHECK(validate(p).empty());
    CHECK(feasibility(p, beta).feasible());
    CHECK(feasibility(p, beta).caps_below_two);
    CHECK(std::tanh(std::sqrt(beta) * p.Rp) > 0.5);
  }
  // closer to 2 needs a smaller cap curvature
  CHECK(search_params(1.999).b < search_params(1.75).b);
  CHECK(search_params(1.75).b <= search_params(1.51).b);
  CHECK_THROWS_AS(search_params(2.05), std::domain_error);
  CHECK_THROWS_AS(search_params(1.5), std::domain_error);
}

TEST_CASE("extremal profile shape") {
  const GulliverParams p = search_params(1.75);
  const CurvatureProfile prof = synth_profile(p, 0.01);
  CHECK(prof.periodic);
  CHECK(prof.length() == doctest::Approx(2 * p.r3 + p.Rp).epsilon(1e-12));
  CHECK(prof.at(1.0) == doctest::Approx(p.b * p.b));
  CHECK(prof.at(2 * p.r3 + 0.5 * p.Rp) == -1);

  GulliverParams flat = p;
  flat.b = 0;
  const auto c = terminator_bisect({synth_profile(flat, 0.01)});
  CHECK(c.exceeds_beta_max);
}

TEST_CASE("certified windows agree with the exact monodromy") {
  TerminatorOptions o;
  o.phases = 2;
  for (double beta : {1.55, 1.65, 1.75, 1.85, 1.95}) {
    const GulliverRun run = gulliver_certify(beta, o);
    const double exact = exact_terminator(run.params);
    const auto& c = run.certificate;
    CHECK_FALSE(c.exceeds_beta_max);
    CHECK(c.beta_lo >= beta - o.tol);
    CHECK(c.beta_hi < 2);
    CHECK(c.beta_hi - c.beta_lo <= o.tol);
    // the profile grid shifts the bracket by discretization error only
    CHECK(exact >= c.beta_lo - 5e-4);
    CHECK(exact <= c.beta_hi + 5e-4);
    const double hill = periodic_terminator_estimate(synth_profile(run.params, run.dt));
    CHECK(hill == doctest::Approx(exact).epsilon(5e-4));
  }
}

TEST_CASE("a target close to 2 still certifies a terminator below 2") {
  TerminatorOptions o;
  o.phases = 1;
  const GulliverRun run = gulliver_certify(1.999, o);
  const auto& c = run.certificate;
  CHECK(run.T_max >= 4 * (2 * run.params.r3 + run.params.Rp));
  CHECK_FALSE(c.exceeds_beta_max);
  CHECK(c.beta_lo >= 1.999 - o.tol);
  // a conjugate point is detected at beta_hi <= 2, so the terminator is below 2
  CHECK(c.beta_hi <= 2);
  REQUIRE(c.evidence.size() >= 2);
  bool seen = false;
  for (const auto& e : c.evidence)
    if (e.beta == c.beta_hi) seen = e.time.has_value();
  CHECK(seen);
  const double exact = exact_terminator(run.params);
  CHECK(exact >= c.beta_lo);
  CHECK(exact < 2);
}

TEST_CASE("Hill estimate") {
  // K = -1 everywhere: no finite terminator
  CHECK(std::isinf(periodic_terminator_estimate(CurvatureProfile::constant(-1, 5, 0.01))));
  // K = +1: conjugate points for every beta > 0
  CHECK(periodic_terminator_estimate(CurvatureProfile::constant(1, 5, 0.01)) < 1e-5);
  CHECK_THROWS(periodic_terminator_estimate(CurvatureProfile::constant(1, 5, 0.01, false)));
}
