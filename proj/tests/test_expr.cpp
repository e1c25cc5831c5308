#include <doctest.h>

#include <cmath>
#include <functional>

#include "generators.hpp"
#include "reach/errors.hpp"
#include "reach/expr.hpp"

using reach::Expression;
using reach::ParseError;
using reach::Vec;

namespace {

double ev(const std::string& s, double x1 = 0.0, double u1 = 0.0, double t = 0.0) {
  return Expression::parse(s, 1, 1).eval(gen::v1(x1), gen::v1(u1), t);
}

std::string random_expr(gen::Rng& r, int depth) {
  const int k = r.integer(0, depth > 0 ? 10 : 3);
  std::ostringstream os;
  os << std::setprecision(6);
  switch (k) {
    case 0: os << "x" << r.integer(1, 2); break;
    case 1: os << "u1"; break;
    case 2: os << "t"; break;
    case 3: os << r.uniform(-2, 2); break;
    case 4: os << "(" << random_expr(r, depth - 1) << " + " << random_expr(r, depth - 1) << ")"; break;
    case 5: os << "(" << random_expr(r, depth - 1) << " * " << random_expr(r, depth - 1) << ")"; break;
    case 6: os << "(" << random_expr(r, depth - 1) << " - " << random_expr(r, depth - 1) << ")"; break;
    case 7: os << "cos(" << random_expr(r, depth - 1) << ")"; break;
    case 8: os << "sqrt(1 + (" << random_expr(r, depth - 1) << ")^2)"; break;
    case 9: os << "log(2 + sin(" << random_expr(r, depth - 1) << "))"; break;
    default: os << "(" << random_expr(r, depth - 1) << ")^3"; break;
  }
  return os.str();
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(ev("1 + 2 * 3") == doctest::Approx(7));
  CHECK(ev("(1 + 2) * 3") == doctest::Approx(9));
  CHECK(ev("8 / 4 / 2") == doctest::Approx(1));
  CHECK(ev("2 - 3 - 4") == doctest::Approx(-5));
  CHECK(ev("2 * 3 ^ 2") == doctest::Approx(18));
  // Unary minus binds tighter than the power.
  CHECK(ev("-x1^2", 3.0) == doctest::Approx(9));
  CHECK(ev("-(x1^2)", 3.0) == doctest::Approx(-9));
  CHECK(ev("pi") == doctest::Approx(gen::kPi));
}

TEST_CASE("functions and variables") {
  CHECK(ev("sin(t) + cos(t)", 0, 0, 0.3) == doctest::Approx(std::sin(0.3) + std::cos(0.3)));
  CHECK(ev("exp(x1) * log(u1)", 0.5, 2.0) == doctest::Approx(std::exp(0.5) * std::log(2.0)));
  CHECK(ev("sqrt(u1) + tanh(x1)", 0.2, 4.0) == doctest::Approx(2.0 + std::tanh(0.2)));
  const auto e = Expression::parse("x2 * u2 + t", 2, 2);
  CHECK(e.eval(gen::v2(1, 3), gen::v2(0, 5), 2.0) == doctest::Approx(17));
  CHECK(e.depends_on_time());
  CHECK_FALSE(Expression::parse("x1", 1, 1).depends_on_time());
}

TEST_CASE("parse errors carry offsets and expectations") {
  CHECK_THROWS_AS(Expression::parse("x1 +", 1, 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("x2", 1, 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("u0", 1, 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(x1)", 1, 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("(x1", 1, 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("x1 ^ 1.5", 1, 1), ParseError);
  try {
    Expression::parse("x1 + y", 1, 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
    CHECK_FALSE(e.expected().empty());
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(ev("log(x1)", -1.0), reach::DomainError);
  CHECK_THROWS_AS(ev("sqrt(x1)", -1.0), reach::DomainError);
  CHECK_THROWS_AS(ev("1 / x1", 0.0), reach::DomainError);
}

TEST_CASE("property: to_string round-trips to the same values") {
  gen::Rng r(11);
  for (int k = 0; k < 300; ++k) {
    const auto e = Expression::parse(random_expr(r, 4), 2, 1);
    const auto back = Expression::parse(e.to_string(), 2, 1);
    const Vec x = r.vec(2), u = r.vec(1);
    const double t = r.uniform();
    CHECK(back.eval(x, u, t) == doctest::Approx(e.eval(x, u, t)).epsilon(1e-12));
  }
}

TEST_CASE("property: forward-mode gradient matches central differences") {
  gen::Rng r(12);
  double worst = 0.0;
  for (int k = 0; k < 300; ++k) {
    const auto e = Expression::parse(random_expr(r, 4), 2, 1);
    const Vec x = r.vec(2), u = r.vec(1);
    const double t = r.uniform();
    const auto g = e.eval_with_gradient(x, u, t);
    CHECK(g.value == doctest::Approx(e.eval(x, u, t)).epsilon(1e-14));
    auto fd = [&](const std::function<double(double)>& f, double at) {
      const double h = 1e-5 * (1.0 + std::abs(at));
      return (f(at + h) - f(at - h)) / (2.0 * h);
    };
    for (int i = 0; i < 2; ++i) {
      const double d = fd([&](double s) { Vec y = x; y[i] = s; return e.eval(y, u, t); }, x[i]);
      worst = std::max(worst, std::abs(d - g.grad_x[i]) / std::max(1.0, std::abs(d)));
    }
    const double du = fd([&](double s) { return e.eval(x, gen::v1(s), t); }, u[0]);
    const double dt = fd([&](double s) { return e.eval(x, u, s); }, t);
    worst = std::max(worst, std::abs(du - g.grad_u[0]) / std::max(1.0, std::abs(du)));
    worst = std::max(worst, std::abs(dt - g.d_t) / std::max(1.0, std::abs(dt)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("raw partials agree with the vector interface") {
  const auto e = Expression::parse("x1*x2*u1 + sin(t*u1)", 2, 1);
  const double x[2] = {0.3, -0.7}, u[1] = {1.1};
  double gx[2], gu[1], gt;
  const double v = e.eval_partials_raw(x, u, 0.4, gx, gu, &gt);
  const auto g = e.eval_with_gradient(gen::v2(0.3, -0.7), gen::v1(1.1), 0.4);
  CHECK(v == doctest::Approx(g.value));
  CHECK(gx[0] == doctest::Approx(g.grad_x[0]));
  CHECK(gx[1] == doctest::Approx(g.grad_x[1]));
  CHECK(gu[0] == doctest::Approx(g.grad_u[0]));
  CHECK(gt == doctest::Approx(g.d_t));
  CHECK(e.eval_raw(x, u, 0.4) == doctest::Approx(v));
}
