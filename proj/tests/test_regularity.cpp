#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "reach/regularity.hpp"

using namespace reach;

namespace {

// In the plane, finitely many nonzero vectors positively span iff the largest angular gap is below pi.
double largest_angular_gap(const std::vector<Vec>& vs) {
  std::vector<double> ang;
  for (const auto& v : vs) ang.push_back(std::atan2(v[1], v[0]));
  std::sort(ang.begin(), ang.end());
  double gap = ang.front() + 2 * gen::kPi - ang.back();
  for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
  return gap;
}

}  // namespace

TEST_CASE("coordinate cross spans with margin 1/sqrt(n)") {
  for (int n = 1; n <= 4; ++n) {
    std::vector<Vec> vs;
    for (int j = 0; j < n; ++j) {
      vs.push_back(Vec::Unit(n, j));
      vs.push_back(-Vec::Unit(n, j));
    }
    vs.push_back(Vec::Zero(n));
    const auto s = cone_spans(vs, n);
    CHECK(s.spans);
    CHECK(s.margin == doctest::Approx(1.0 / std::sqrt(n)));
    CHECK(s.max_residual <= 1e-12);
  }
}

TEST_CASE("half-space samples fail with a separating direction") {
  gen::Rng r(101);
  for (int k = 0; k < 100; ++k) {
    const int n = r.integer(1, 4);
    const Vec normal = r.vec(n).normalized();
    std::vector<Vec> vs;
    for (int i = 0; i < 12; ++i) {
      Vec v = r.vec(n);
      if (v.dot(normal) > 0.0) v -= 2.0 * v.dot(normal) * normal;
      vs.push_back(v);
    }
    const auto s = cone_spans(vs, n);
    CHECK_FALSE(s.spans);
    CHECK(s.margin == 0.0);
    REQUIRE(s.separating.has_value());
    CHECK(s.separating->norm() == doctest::Approx(1.0));
    for (const auto& v : vs) CHECK(s.separating->dot(v) <= 1e-6);
  }
}

TEST_CASE("property: planar spanning agrees with the angular-gap oracle") {
  gen::Rng r(102);
  int spanning = 0;
  for (int k = 0; k < 400; ++k) {
    std::vector<Vec> vs;
    const int count = r.integer(2, 6);
    for (int i = 0; i < count; ++i) {
      const double a = r.uniform(0, 2 * gen::kPi);
      vs.push_back(r.uniform(0.5, 2.0) * gen::v2(std::cos(a), std::sin(a)));
    }
    const double gap = largest_angular_gap(vs);
    const bool want = gap < gen::kPi;
    const auto s = cone_spans(vs, 2);
    // Near-degenerate draws are left to tolerance.
    if (std::abs(gap - gen::kPi) > 1e-3) CHECK(s.spans == want);
    spanning += want;
    if (s.spans) {
      for (std::size_t t = 0; t < s.weights.size(); ++t) {
        Vec comb = Vec::Zero(2);
        for (std::size_t i = 0; i < vs.size(); ++i) comb += s.weights[t][i] * vs[i];
        const Vec target = (t % 2 ? -1.0 : 1.0) * Vec::Unit(2, t / 2);
        CHECK((comb - target).norm() <= 1e-6);
        CHECK(s.weights[t].minCoeff() >= 0.0);
      }
    }
  }
  CHECK(spanning > 50);
  CHECK(spanning < 350);
}

TEST_CASE("Kalman rank and linear structure") {
  Mat A(2, 2);
  A << 0, 1, 0, 0;
  Mat B(2, 1);
  B << 0, 1;
  CHECK(kalman_check(A, B));
  Mat B2(2, 1);
  B2 << 1, 0;
  CHECK_FALSE(kalman_check(A, B2));
  const auto sys = gen::expr_system(1.0, gen::v2(0, 0), {"x2 + 2", "3*u1 - x1"}, 1, ConstraintSet::all(1));
  const auto ls = linear_structure(sys);
  REQUIRE(ls.has_value());
  CHECK(ls->first(1, 0) == doctest::Approx(-1.0));
  CHECK(ls->second(1, 0) == doctest::Approx(3.0));
  CHECK_FALSE(linear_structure(gen::expr_system(1.0, gen::v1(0), {"x1^2 + u1"}, 1, ConstraintSet::all(1))));
  CHECK(control_affine_detect(gen::expr_system(1.0, gen::v1(0), {"x1^2 + sin(x1)*u1"}, 1, ConstraintSet::all(1)))
            .affine);
  CHECK_FALSE(control_affine_detect(gen::expr_system(1.0, gen::v1(0), {"u1^2"}, 1, ConstraintSet::all(1))).affine);
}

TEST_CASE("classifiers on textbook systems") {
  const auto box = ConstraintSet::box(gen::v1(-1), gen::v1(1));
  // f = u with u = 1 at the upper face: linearly regular, one-sided cones.
  const auto s = gen::expr_system(1.0, gen::v1(0), {"u1"}, 1, box);
  const auto one = ControlSignal::constant(gen::v1(1.0), 1.0);
  const auto dict = dyadic_dictionary(1.0, 1, 3);
  CHECK(classify_strongly_regular(s, one, dict).verdict == Verdict::Regular);
  CHECK(classify_strongly_U_regular(s, one, dict).verdict == Verdict::NotDetected);
  const auto w = classify_weakly_U_regular(s, one, 16, 4, 0);
  CHECK(w.verdict == Verdict::NotDetected);
  REQUIRE(w.psi.has_value());
  CHECK((*w.psi)[0] == doctest::Approx(1.0));
  // Interior value: every notion holds.
  const auto zero = ControlSignal::constant(gen::v1(0.0), 1.0);
  CHECK(classify_strongly_U_regular(s, zero, dict).verdict == Verdict::Regular);
  CHECK(classify_weakly_U_regular(s, zero, 16, 4, 0).verdict == Verdict::Regular);
  // f = u^2 at u = 0: linearisation vanishes but needles only push up.
  const auto q = gen::expr_system(1.0, gen::v1(0), {"u1^2"}, 1, box);
  CHECK(classify_strongly_regular(q, zero, dict).verdict == Verdict::NotDetected);
  CHECK(classify_weakly_U_regular(q, zero, 16, 4, 0).verdict == Verdict::NotDetected);
}

TEST_CASE("lift residuals and certificate search") {
  const auto box = ConstraintSet::box(gen::v1(-1), gen::v1(1));
  const auto s = gen::expr_system(1.0, gen::v1(0), {"u1"}, 1, box);
  const auto one = ControlSignal::constant(gen::v1(1.0), 1.0);
  CHECK(lift_residual(s, one, gen::v1(1.0), LiftKind::HM).residual <= 1e-9);
  CHECK(lift_residual(s, one, gen::v1(-1.0), LiftKind::HM).residual >= 1.0);
  const auto ex1 = gen::expr_system(1.0, gen::v1(0), {"1 + (u1 - t)^2"}, 1, ConstraintSet::all(1));
  const auto ut = ControlSignal::analytic(std::vector<std::string>{"t"}, 1.0);
  const auto cs = singular_certificate_search(ex1, ut, LiftKind::NHG);
  CHECK(cs.min_residual <= 1e-9);
  CHECK(std::abs(cs.psi[0]) == doctest::Approx(1.0));
  CHECK(regularity_kind_from_string("weak-U") == RegularityKind::WeaklyURegular);
  CHECK(lift_kind_from_string("HG") == LiftKind::HG);
  CHECK_THROWS(lift_kind_from_string("XX"));
}

TEST_CASE("linear interior route") {
  Mat A(2, 2);
  A << 0, 1, 0, 0;
  Mat B(2, 1);
  B << 0, 1;
  const auto sys = ControlSystem::make(2.0, gen::v2(0, 0), std::make_shared<LinearDynamics>(A, B, Vec::Zero(2)),
                                       ConstraintSet::box(gen::v1(-1), gen::v1(1)));
  const auto bang = ControlSignal::piecewise_constant(Partition({0.0, 1.0, 2.0}), {gen::v1(-1), gen::v1(1)});
  const auto chk = linear_interior_check(sys, bang);
  CHECK(chk.linear);
  CHECK(chk.kalman);
  CHECK_FALSE(chk.interior_interval);
  const auto ramp = ControlSignal::analytic(std::vector<std::string>{"t - 1"}, 2.0);
  const auto chk2 = linear_interior_check(sys, ramp);
  CHECK(chk2.regular());
  CHECK(chk2.interior_length == doctest::Approx(2.0).epsilon(0.01));
}
