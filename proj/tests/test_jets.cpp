#include <cmath>

#include "doctest.h"
#include "spherevar/jets.hpp"

using namespace spherevar;

TEST_CASE("Jet2 arithmetic reproduces closed-form derivatives") {
  // f(t) = 1/(1-t) at 0: (1, 1, 2)
  Jet2d t = Jet2d::variable(0.0);
  Jet2d f = 1.0 / (1.0 - t);
  CHECK(f.v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.d1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.d2 == doctest::Approx(2.0).epsilon(1e-15));

  // g(t) = sqrt(1+2t) at 0: (1, 1, -1)
  Jet2d g = sqrt(1.0 + t * 2.0);
  CHECK(g.v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.d1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.d2 == doctest::Approx(-1.0).epsilon(1e-15));

  // product/quotient rules at a generic point against hand-derived values:
  // p(t) = (t^2+3t+1)/(t+2), p(0.5) = 11/10, p'(t) = (t^2+4t+5)/(t+2)^2
  Jet2d s = Jet2d::variable(0.5);
  Jet2d p = (s * s + s * 3.0 + 1.0) / (s + 2.0);
  CHECK(p.v == doctest::Approx(2.75 / 2.5).epsilon(1e-14));
  CHECK(p.d1 == doctest::Approx(7.25 / 6.25).epsilon(1e-14));
  // p = t + 1 - 1/(t+2), so p''(t) = -2/(t+2)^3 and p''(0.5) = -0.128 exactly
  CHECK(p.d2 == doctest::Approx(-2.0 / (2.5 * 2.5 * 2.5)).epsilon(1e-14));
  // finite differences as the independent route (limited by roundoff in h^2)
  auto eval = [](double x) { return (x * x + 3 * x + 1) / (x + 2); };
  double h = 1e-5;
  double fd2 = (eval(0.5 + h) - 2 * eval(0.5) + eval(0.5 - h)) / (h * h);
  CHECK(p.d2 == doctest::Approx(fd2).epsilon(1e-5));
}

TEST_CASE("nested Jet2 carries mixed second partials") {
  // F(t,s) = (1+ts)^2 = 1 + 2ts + t^2 s^2, d2F/dtds at 0 = 2.
  using TS = Jet2<Jet2d>;
  TS t = TS::variable(Jet2d(0.0));  // outer parameter t
  TS s(Jet2d::variable(0.0));       // inner parameter s, constant in t
  TS F = (1.0 + t * s) * (1.0 + t * s);
  CHECK(F.v.v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(F.d1.d1 == doctest::Approx(2.0).epsilon(1e-15));  // d^2/dtds
  CHECK(F.d2.v == doctest::Approx(0.0).epsilon(1e-15));   // d^2/dt^2 at s=0
  CHECK(F.v.d2 == doctest::Approx(0.0).epsilon(1e-15));   // d^2/ds^2 at t=0
}

TEST_CASE("DualN propagates gradient and Hessian") {
  double x0 = 0.3, x1 = 0.8;
  DualN a = DualN::variable(2, 0, x0);
  DualN b = DualN::variable(2, 1, x1);
  DualN u = sin(a) * b + a * a;

  CHECK(u.v == doctest::Approx(std::sin(x0) * x1 + x0 * x0).epsilon(1e-15));
  CHECK(u.g(0) == doctest::Approx(std::cos(x0) * x1 + 2 * x0).epsilon(1e-15));
  CHECK(u.g(1) == doctest::Approx(std::sin(x0)).epsilon(1e-15));
  CHECK(u.h(0, 0) == doctest::Approx(-std::sin(x0) * x1 + 2).epsilon(1e-15));
  CHECK(u.h(0, 1) == doctest::Approx(std::cos(x0)).epsilon(1e-14));
  CHECK(u.h(1, 0) == doctest::Approx(std::cos(x0)).epsilon(1e-14));
  CHECK(u.h(1, 1) == doctest::Approx(0.0).epsilon(1e-15));

  // inverse round trip: u * (1/u) = 1 with flat derivatives
  DualN one = u * inverse(u);
  CHECK(one.v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.g.norm() == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(one.h.norm() == doctest::Approx(0.0).epsilon(1e-13));

  // sqrt chain rule against the square
  DualN r = sqrt(u);
  DualN back = r * r;
  CHECK(back.v == doctest::Approx(u.v).epsilon(1e-14));
  CHECK((back.g - u.g).norm() == doctest::Approx(0.0).epsilon(1e-13));
  CHECK((back.h - u.h).norm() == doctest::Approx(0.0).epsilon(1e-13));
}
