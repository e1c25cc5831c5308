#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "reach/errors.hpp"
#include "reach/ode.hpp"

using namespace reach;

TEST_CASE("grid contains breakpoints and respects the step density") {
  const auto g = build_grid(0.0, 2.0, {0.3, 1.7}, 10);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 2.0);
  CHECK(std::find(g.begin(), g.end(), 0.3) != g.end());
  CHECK(std::find(g.begin(), g.end(), 1.7) != g.end());
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] > g[i - 1]);
    CHECK(g[i] - g[i - 1] <= 0.1 + 1e-12);
  }
}

TEST_CASE("RK4 is fourth order") {
  const auto sys = gen::expr_system(2.0, gen::v1(1.0), {"cos(t)*x1 + 0*u1"}, 1, ConstraintSet::all(1));
  const auto u = ControlSignal::constant(gen::v1(0), 2.0);
  const double exact = std::exp(std::sin(2.0));
  const double e1 = std::abs(integrate_state(sys, u, 4).final_state()[0] - exact);
  const double e2 = std::abs(integrate_state(sys, u, 8).final_state()[0] - exact);
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("discontinuous controls are integrated exactly for f = u") {
  gen::Rng r(61);
  const auto sys = gen::expr_system(1.0, gen::v1(0.0), {"u1"}, 1, ConstraintSet::all(1));
  for (int k = 0; k < 50; ++k) {
    const auto u = gen::pc_control(r, ConstraintSet::all(1), 1.0, r.integer(1, 10));
    const auto* pc = u.as_piecewise_constant();
    double want = 0.0;
    for (int i = 0; i < pc->partition.intervals(); ++i) want += pc->values[i][0] * pc->partition.length(i);
    CHECK(integrate_state(sys, u, 50).final_state()[0] == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("dense output interpolates the cubic solution exactly") {
  // x' = 3 t^2 has x = t^3, which Hermite cubics reproduce.
  const auto sys = gen::expr_system(1.0, gen::v1(0.0), {"3*t^2 + 0*u1"}, 1, ConstraintSet::all(1));
  const auto tr = integrate_state(sys, ControlSignal::constant(gen::v1(0), 1.0), 7);
  for (double t : {0.05, 0.33, 0.5, 0.91}) CHECK(tr.eval(t)[0] == doctest::Approx(t * t * t).epsilon(1e-13));
  CHECK(tr.sup_norm() == doctest::Approx(1.0));
}

TEST_CASE("blow-up raises IntegrationError") {
  const auto sys = gen::expr_system(5.0, gen::v1(1.0), {"x1^2 + 0*u1"}, 1, ConstraintSet::all(1));
  CHECK_THROWS_AS(integrate_state(sys, ControlSignal::constant(gen::v1(0), 5.0), 100), IntegrationError);
}

TEST_CASE("property: fundamental adjoint equals the transition matrix of linear systems") {
  gen::Rng r(62);
  for (int k = 0; k < 20; ++k) {
    Mat A = Mat::Random(2, 2), B = Mat::Random(2, 1);
    const auto sys =
        ControlSystem::make(1.0, r.vec(2), std::make_shared<LinearDynamics>(A, B, Vec::Zero(2)), ConstraintSet::all(1));
    const auto u = gen::smooth_control(r, 1, 1.0);
    const auto tr = integrate_state(sys, u, 200);
    const auto P = integrate_adjoint_matrix(sys, u, tr, Mat::Identity(2, 2));
    const int k0 = tr.steps() / 3;
    const double tau = tr.times()[k0];
    // exp(A (T - tau)) by a long Taylor series.
    Mat E = Mat::Identity(2, 2), term = Mat::Identity(2, 2);
    for (int j = 1; j < 30; ++j) {
      term = term * A * (1.0 - tau) / j;
      E += term;
    }
    CHECK((P[k0].transpose() - E).norm() <= 1e-10);
  }
}

TEST_CASE("property: Hamiltonian gradient is fu^T p") {
  gen::Rng r(63);
  for (int k = 0; k < 50; ++k) {
    const auto sys = gen::expr_system(1.0, r.vec(2), gen::polynomial_rows(r, 2, 2), 2, ConstraintSet::all(2));
    const Vec x = r.vec(2), u = r.vec(2), p = r.vec(2);
    const Vec gr = hamiltonian_control_gradient(sys, x, u, p, 0.2);
    for (int j = 0; j < 2; ++j) {
      Vec up = u, um = u;
      up[j] += 1e-6;
      um[j] -= 1e-6;
      const double fd = (hamiltonian(sys, x, up, p, 0.2) - hamiltonian(sys, x, um, p, 0.2)) / 2e-6;
      CHECK(gr[j] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}
