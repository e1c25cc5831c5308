#include <doctest.h>

#include "generators.hpp"
#include "reach/control.hpp"
#include "reach/errors.hpp"

using reach::ControlSignal;
using reach::Partition;
using reach::Side;
using reach::Vec;

TEST_CASE("partition basics") {
  const Partition p({0.0, 0.5, 2.0});
  CHECK(p.intervals() == 2);
  CHECK(p.norm() == doctest::Approx(1.5));
  CHECK(p.interval_of(0.5) == 1);
  CHECK(p.interval_of(0.5, Side::Left) == 0);
  CHECK(p.interval_of(2.0) == 1);
  CHECK_THROWS(Partition({0.0, 1.0, 1.0}));
  CHECK_THROWS(Partition({0.5, 1.0}));
  CHECK(Partition::uniform(3.0, 6).norm() == doctest::Approx(0.5));
}

TEST_CASE("piecewise constant one-sided limits") {
  const auto u = ControlSignal::piecewise_constant(Partition({0.0, 1.0, 2.0}), {gen::v1(3.0), gen::v1(-1.0)});
  CHECK(u.eval(1.0)[0] == -1.0);
  CHECK(u.eval(1.0, Side::Left)[0] == 3.0);
  CHECK(u.eval(2.0)[0] == -1.0);
  REQUIRE(u.breakpoints().size() == 1);
  CHECK(u.breakpoints()[0] == 1.0);
  CHECK(u.as_piecewise_constant() != nullptr);
}

TEST_CASE("grid sampled holds") {
  const auto lin = ControlSignal::grid_sampled({0.0, 1.0, 3.0}, {gen::v1(0.0), gen::v1(2.0), gen::v1(0.0)},
                                               reach::Hold::Linear);
  CHECK(lin.eval(0.5)[0] == doctest::Approx(1.0));
  CHECK(lin.eval(2.0)[0] == doctest::Approx(1.0));
  const auto zoh = ControlSignal::grid_sampled({0.0, 1.0, 3.0}, {gen::v1(0.0), gen::v1(2.0), gen::v1(0.0)});
  CHECK(zoh.eval(0.5)[0] == 0.0);
  CHECK(zoh.eval(1.5)[0] == 2.0);
}

TEST_CASE("spliced, projected and combined signals") {
  const auto base = ControlSignal::analytic(std::vector<std::string>{"t"}, 2.0);
  const auto s = ControlSignal::spliced(base, {{0.5, 0.75, gen::v1(9.0)}});
  CHECK(s.eval(0.6)[0] == 9.0);
  CHECK(s.eval(0.75)[0] == doctest::Approx(0.75));
  CHECK(s.eval(0.75, Side::Left)[0] == 9.0);
  const auto bp = s.breakpoints();
  CHECK(std::find(bp.begin(), bp.end(), 0.5) != bp.end());
  const auto c = ControlSignal::combination({{2.0, base}, {-1.0, ControlSignal::constant(gen::v1(1.0), 2.0)}});
  CHECK(c.eval(1.5)[0] == doctest::Approx(2.0));
  const auto U = reach::ConstraintSet::box(gen::v1(0.0), gen::v1(1.0));
  const auto ref = ControlSignal::constant(gen::v1(1.0), 2.0);
  const auto tp = ControlSignal::tangent_projected(ref, base, U);
  CHECK(tp.eval(1.5)[0] == doctest::Approx(0.0));
  CHECK_THROWS(ControlSignal::spliced(base, {{0.5, 1.0, gen::v1(0)}, {0.9, 1.2, gen::v1(0)}}));
}

TEST_CASE("property: merge_times is sorted, unique and inside (0, T)") {
  gen::Rng r(31);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> t;
    for (int i = 0; i < 20; ++i) t.push_back(r.uniform(-0.5, 1.5));
    t.push_back(t[0] + 1e-15);
    const auto m = reach::merge_times(t, 1.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m[i] > 0.0);
      CHECK(m[i] < 1.0);
      if (i) CHECK(m[i] > m[i - 1] + 1e-13);
    }
  }
}

TEST_CASE("property: PC values are piecewise equal to the data") {
  gen::Rng r(32);
  for (int k = 0; k < 100; ++k) {
    const auto U = gen::box(r, 2);
    const auto u = gen::pc_control(r, U, 2.0, r.integer(1, 12));
    const auto* pc = u.as_piecewise_constant();
    REQUIRE(pc);
    for (int i = 0; i < pc->partition.intervals(); ++i) {
      const double mid = 0.5 * (pc->partition.times()[i] + pc->partition.times()[i + 1]);
      CHECK((u.eval(mid) - pc->values[i]).norm() == 0.0);
    }
  }
}
