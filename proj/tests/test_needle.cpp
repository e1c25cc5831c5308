#include <doctest.h>

#include "generators.hpp"
#include "reach/endpoint.hpp"
#include "reach/needle.hpp"

using namespace reach;

TEST_CASE("single needle replaces the control on [tau, tau + alpha)") {
  const auto u = ControlSignal::constant(gen::v1(0.0), 1.0);
  const auto w = single_needle(u, 0.4, gen::v1(2.0), 0.1);
  CHECK(w.eval(0.45)[0] == 2.0);
  CHECK(w.eval(0.5)[0] == 0.0);
  const auto U = ConstraintSet::box(gen::v1(-1), gen::v1(1));
  CHECK_THROWS(single_needle(u, 0.4, gen::v1(2.0), 0.1, &U));
}

TEST_CASE("package validation and stacking") {
  NeedlePackage chi;
  chi.taus = {0.2, 0.6};
  chi.omegas = {{gen::v1(1.0), gen::v1(-1.0)}, {gen::v1(0.5)}};
  chi.beta = 0.1;
  CHECK(chi.total() == 3);
  CHECK(chi.max_stack() == 2);
  CHECK_NOTHROW(chi.validate(1.0));
  chi.beta = 0.3;
  CHECK_THROWS(chi.validate(1.0));
  chi.beta = 0.1;
  const auto u = ControlSignal::constant(gen::v1(0.0), 1.0);
  Vec a(3);
  a << 0.05, 0.02, 0.1;
  const auto ua = apply_package(u, chi, a);
  CHECK(ua.eval(0.21)[0] == 1.0);
  CHECK(ua.eval(0.26)[0] == -1.0);
  CHECK(ua.eval(0.28)[0] == 0.0);
  CHECK(ua.eval(0.65)[0] == 0.5);
}

TEST_CASE("closed forms: f = u and the double integrator") {
  gen::Rng r(81);
  const auto s1 = gen::expr_system(1.0, gen::v1(0.0), {"u1"}, 1, ConstraintSet::all(1));
  const auto s2 = gen::expr_system(2.0, gen::v2(0.0, 0.0), {"x2", "u1"}, 1, ConstraintSet::all(1));
  const auto u1 = ControlSignal::analytic(std::vector<std::string>{"cos(t)"}, 1.0);
  const auto u2 = ControlSignal::analytic(std::vector<std::string>{"cos(t)"}, 2.0);
  const auto b1 = integrate_state(s1, u1, 200), b2 = integrate_state(s2, u2, 200);
  for (int k = 0; k < 30; ++k) {
    const double om = r.uniform(-2, 2);
    const double t1 = b1.times()[r.integer(1, b1.steps() - 1)];
    const double t2 = b2.times()[r.integer(1, b2.steps() - 1)];
    CHECK(strong_variation_vector(s1, u1, b1, t1, gen::v1(om))[0] == doctest::Approx(om - std::cos(t1)));
    const double d = om - std::cos(t2);
    CHECK((strong_variation_vector(s2, u2, b2, t2, gen::v1(om)) - gen::v2((2.0 - t2) * d, d)).norm() <= 1e-9);
    CHECK((needle_jump(s2, u2, b2, t2, gen::v1(om)) - gen::v2(0, d)).norm() <= 1e-12);
  }
}

TEST_CASE("property: needle times avoid breakpoints") {
  gen::Rng r(82);
  const auto sys = gen::expr_system(1.0, gen::v1(0.0), {"u1"}, 1, ConstraintSet::all(1));
  for (int k = 0; k < 20; ++k) {
    const auto u = gen::pc_control(r, ConstraintSet::all(1), 1.0, r.integer(2, 6));
    const auto base = integrate_state(sys, u, 100, u.breakpoints());
    const auto taus = needle_times(base, u, 16);
    CHECK_FALSE(taus.empty());
    for (double t : taus) {
      for (double b : u.breakpoints()) CHECK(std::abs(t - b) >= 0.01 - 1e-12);
    }
  }
}

TEST_CASE("property: package jacobian matches finite differences at first order") {
  gen::Rng r(83);
  for (int k = 0; k < 10; ++k) {
    const int n = r.integer(1, 3), m = r.integer(1, 2);
    const auto sys = gen::expr_system(1.0, r.vec(n, -0.5, 0.5), gen::polynomial_rows(r, n, m), m, ConstraintSet::all(m));
    const auto u = gen::smooth_control(r, m, 1.0);
    NeedlePackage chi;
    chi.taus = {r.uniform(0.1, 0.3), r.uniform(0.5, 0.7)};
    chi.omegas = {{r.vec(m)}, {r.vec(m), r.vec(m)}};
    chi.beta = 0.1;
    const Vec dir = r.vec(3, 0.2, 1.0);
    const auto rep = fd_check_package(sys, u, chi, dir, {0.02, 0.01, 0.005}, 500);
    for (double q : rep.deviation_ratios()) {
      CHECK(q >= 0.3);
      CHECK(q <= 0.7);
    }
  }
}

TEST_CASE("property: jacobian at an interior amplitude matches central differences") {
  gen::Rng r(84);
  for (int k = 0; k < 10; ++k) {
    const auto sys = gen::expr_system(1.0, r.vec(2, -0.5, 0.5), gen::polynomial_rows(r, 2, 1), 1, ConstraintSet::all(1));
    const auto u = gen::smooth_control(r, 1, 1.0);
    NeedlePackage chi;
    chi.taus = {0.2, 0.6};
    chi.omegas = {{r.vec(1)}, {r.vec(1)}};
    chi.beta = 0.1;
    const Vec alpha = r.vec(2, 0.02, 0.08);
    Vec value;
    const Mat J = package_jacobian_at(sys, u, chi, alpha, 1000, &value);
    CHECK((value - endpoint(sys, apply_package(u, chi, alpha), 1000)).norm() <= 1e-9);
    for (int j = 0; j < 2; ++j) {
      Vec ap = alpha, am = alpha;
      ap[j] += 1e-4;
      am[j] -= 1e-4;
      const Vec fd = (endpoint(sys, apply_package(u, chi, ap), 1000) - endpoint(sys, apply_package(u, chi, am), 1000)) /
                     2e-4;
      CHECK((fd - J.col(j)).norm() <= 1e-5 * (1.0 + fd.norm()));
    }
  }
}
