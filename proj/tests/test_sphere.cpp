#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spherevar/sphere.hpp"

using namespace spherevar;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("sphereVolume matches the closed form in low dimensions") {
  CHECK(sphereVolume(1) == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(sphereVolume(2) == doctest::Approx(4 * kPi).epsilon(1e-14));
  CHECK(sphereVolume(3) == doctest::Approx(2 * kPi * kPi).epsilon(1e-14));
  CHECK(sphereVolume(4) == doctest::Approx(8 * kPi * kPi / 3).epsilon(1e-14));
}

TEST_CASE("gaussJacobiSymmetric integrates weighted polynomials exactly") {
  // alpha = 0 is Gauss-Legendre: int u^8 du = 2/9, weights sum to 2.
  GaussRule gl = gaussJacobiSymmetric(16, 0.0);
  CHECK(gl.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
  double m8 = 0.0;
  for (int i = 0; i < gl.nodes.size(); ++i) m8 += gl.weights(i) * std::pow(gl.nodes(i), 8);
  CHECK(m8 == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
  // node symmetry
  for (int i = 0; i < gl.nodes.size(); ++i)
    CHECK(gl.nodes(i) == doctest::Approx(-gl.nodes(gl.nodes.size() - 1 - i)).epsilon(1e-13));

  // alpha = 3/2: int (1-u^2)^{3/2} du = 3 pi / 8, int u^2 (1-u^2)^{3/2} du = pi/16.
  GaussRule gj = gaussJacobiSymmetric(10, 1.5);
  CHECK(gj.weights.sum() == doctest::Approx(3 * kPi / 8).epsilon(1e-13));
  double m2 = 0.0;
  for (int i = 0; i < gj.nodes.size(); ++i) m2 += gj.weights(i) * gj.nodes(i) * gj.nodes(i);
  CHECK(m2 == doctest::Approx(kPi / 16).epsilon(1e-13));
}

TEST_CASE("quadrature grids carry the full sphere measure") {
  GridPtr g2 = QuadratureGrid::make(2, 24);
  CHECK(g2->size() == 24 * 48);
  CHECK(g2->weights().sum() == doctest::Approx(4 * kPi).epsilon(1e-12));
  for (int r = 0; r < g2->size(); r += 97)
    CHECK(g2->unitPoints().row(r).norm() == doctest::Approx(1.0).epsilon(1e-13));

  GridPtr g3 = QuadratureGrid::make(3, 16);
  CHECK(g3->size() == 16 * 16 * 32);
  CHECK(g3->weights().sum() == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));

  // integrate: first ambient coordinate integrates to zero, squared to vol/(n+1)
  Eigen::VectorXd x0 = g2->unitPoints().col(0);
  CHECK(g2->integrate(x0) == doctest::Approx(0.0).epsilon(1e-12));
  Eigen::VectorXd x0sq = x0.array().square();
  CHECK(g2->integrate(x0sq) == doctest::Approx(4 * kPi / 3).epsilon(1e-12));
}

TEST_CASE("charts are inverse-consistent and centered correctly") {
  Chart std2 = Chart::standard(2);
  Eigen::VectorXd ref = std2.referenceCoords();
  CHECK((std2.point(ref) - Eigen::Vector3d(1, 0, 0)).norm() == doctest::Approx(0.0).epsilon(1e-14));

  // polar axis is the last coordinate: angles (t, 0) trace a meridian through e1
  Eigen::VectorXd a(2);
  a << 0.3, 0.0;
  Eigen::VectorXd p = std2.point(a);
  CHECK(p(2) == doctest::Approx(std::cos(0.3)).epsilon(1e-14));
  CHECK(p(0) == doctest::Approx(std::sin(0.3)).epsilon(1e-14));

  // centeredAt: reference coords map to the requested point
  Eigen::VectorXd q(4);
  q << 0.2, -0.5, 0.7, 0.4;
  q.normalize();
  Chart c3 = Chart::centeredAt(q);
  CHECK((c3.point(c3.referenceCoords()) - q).norm() == doctest::Approx(0.0).epsilon(1e-13));
  CHECK((c3.rotation() * c3.rotation().transpose() - Eigen::MatrixXd::Identity(4, 4)).norm() ==
        doctest::Approx(0.0).epsilon(1e-13));

  // angles() inverts point()
  Eigen::VectorXd b(3);
  b << 1.1, 0.8, 2.5;
  Eigen::VectorXd pb = c3.point(b);
  CHECK((c3.point(c3.angles(pb)) - pb).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("chart jets match finite differences of the embedding") {
  Chart chart = Chart::centeredAt(Eigen::Vector3d(0.48, -0.6, 0.64).normalized());
  Eigen::VectorXd a = chart.referenceCoords();
  a(0) += 0.2;
  a(1) -= 0.35;
  ChartJets jets = chart.jets(a);
  CHECK((jets.p - chart.point(a)).norm() == doctest::Approx(0.0).epsilon(1e-14));

  double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd ap = a, am = a;
    ap(i) += h;
    am(i) -= h;
    Eigen::VectorXd fd = (chart.point(ap) - chart.point(am)) / (2 * h);
    CHECK((jets.dp.col(i) - fd).norm() == doctest::Approx(0.0).epsilon(1e-9));
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd app = ap, apm = ap, amp = am, amm = am;
      app(j) += h;
      apm(j) -= h;
      amp(j) += h;
      amm(j) -= h;
      Eigen::VectorXd fd2 = (chart.point(app) - chart.point(apm) - chart.point(amp) +
                             chart.point(amm)) /
                            (4 * h * h);
      CHECK((jets.d2p[i][j] - fd2).norm() == doctest::Approx(0.0).epsilon(1e-5));
    }
  }
}

TEST_CASE("metricOf reproduces the round metric of S^2") {
  Chart chart = Chart::standard(2);
  Eigen::VectorXd a(2);
  a << kPi / 3, 0.7;
  SphereMetric m = metricOf(chart.jets(a));
  CHECK(m.g(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m.g(0, 1) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(m.g(1, 1) == doctest::Approx(std::sin(kPi / 3) * std::sin(kPi / 3)).epsilon(1e-13));
  CHECK(m.sqrtG == doctest::Approx(std::sin(kPi / 3)).epsilon(1e-13));
  CHECK((m.g * m.gInv - Eigen::MatrixXd::Identity(2, 2)).norm() ==
        doctest::Approx(0.0).epsilon(1e-13));
  // Gamma^0_{11} = -sin(t)cos(t), Gamma^1_{01} = cot(t)
  CHECK(m.christoffel[0](1, 1) ==
        doctest::Approx(-std::sin(kPi / 3) * std::cos(kPi / 3)).epsilon(1e-12));
  CHECK(m.christoffel[1](0, 1) ==
        doctest::Approx(std::cos(kPi / 3) / std::sin(kPi / 3)).epsilon(1e-12));
}
