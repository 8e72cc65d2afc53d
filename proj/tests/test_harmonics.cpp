#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spherevar/harmonics.hpp"

using namespace spherevar;

namespace {
constexpr double kPi = std::numbers::pi;

double innerProduct(const QuadratureGrid& grid, const SphereFunction& a, const SphereFunction& b) {
  Eigen::VectorXd prod(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    Eigen::VectorXd p = grid.unitPoints().row(i).transpose();
    prod(i) = a.value(p) * b.value(p);
  }
  return grid.integrate(prod);
}
}  // namespace

TEST_CASE("laplaceEigenvalue is k(k+n-1)") {
  CHECK(laplaceEigenvalue(2, 0) == doctest::Approx(0.0));
  CHECK(laplaceEigenvalue(2, 1) == doctest::Approx(2.0));
  CHECK(laplaceEigenvalue(2, 2) == doctest::Approx(6.0));
  CHECK(laplaceEigenvalue(3, 2) == doctest::Approx(8.0));
  CHECK(laplaceEigenvalue(3, 1) == doctest::Approx(3.0));
  CHECK(laplaceEigenvalue(4, 2) == doctest::Approx(10.0));
}

TEST_CASE("spherical harmonics are orthonormal on the quadrature grid") {
  GridPtr grid = QuadratureGrid::make(2, 24);
  SphericalHarmonic y00(0, 0);
  CHECK(y00.value(Eigen::Vector3d(0, 0, 1)) ==
        doctest::Approx(1.0 / std::sqrt(4 * kPi)).epsilon(1e-13));
  CHECK(y00.value(Eigen::Vector3d(1, 0, 0)) ==
        doctest::Approx(1.0 / std::sqrt(4 * kPi)).epsilon(1e-13));

  std::vector<std::pair<int, int>> modes = {{0, 0}, {1, -1}, {1, 0}, {2, 1},
                                            {3, -2}, {4, 0}, {6, 5}};
  for (size_t i = 0; i < modes.size(); ++i) {
    SphericalHarmonic yi(modes[i].first, modes[i].second);
    for (size_t j = i; j < modes.size(); ++j) {
      SphericalHarmonic yj(modes[j].first, modes[j].second);
      double expect = (i == j) ? 1.0 : 0.0;
      CHECK(innerProduct(*grid, yi, yj) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("zonal harmonics are orthonormal and match Y_{l,0} on S^2") {
  GridPtr g3 = QuadratureGrid::make(3, 12);
  for (int k = 0; k <= 4; ++k) {
    ZonalHarmonic zk(3, k);
    for (int l = k; l <= 4; ++l) {
      ZonalHarmonic zl(3, l);
      double expect = (k == l) ? 1.0 : 0.0;
      CHECK(innerProduct(*g3, zk, zl) == doctest::Approx(expect).epsilon(1e-10));
    }
  }

  for (int l = 0; l <= 5; ++l) {
    for (double theta : {0.3, 1.1, 2.4}) {
      Eigen::Vector3d p(std::sin(theta), 0.0, std::cos(theta));
      CHECK(ZonalHarmonic::at(2, l, theta) ==
            doctest::Approx(SphericalHarmonic::at(l, 0, p)).epsilon(1e-11));
    }
  }
}

TEST_CASE("chartJets agree with the numeric fallback") {
  SphericalHarmonic y(3, 2);
  auto fn = [&y](const Eigen::VectorXd& p) { return y.value(p); };
  NumericSphereFunction numeric(2, fn);
  Chart chart = Chart::centeredAt(Eigen::Vector3d(0.1, 0.7, -0.7).normalized());
  Eigen::VectorXd a = chart.referenceCoords();
  a(0) += 0.15;
  a(1) += 0.4;
  FieldJets exact = y.chartJets(chart, a);
  FieldJets approx = numeric.chartJets(chart, a);
  CHECK(exact.f == doctest::Approx(approx.f).epsilon(1e-12));
  CHECK((exact.fi - approx.fi).norm() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK((exact.fij - approx.fij).norm() == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("randomBandLimited is deterministic, sup-normalized, band-limited") {
  GridPtr grid = QuadratureGrid::make(2, 16);
  FuncPtr f1 = randomBandLimited(2, 5, 42, *grid);
  FuncPtr f2 = randomBandLimited(2, 5, 42, *grid);
  FuncPtr g = randomBandLimited(2, 5, 43, *grid);
  ScalarField s1 = sampleField(f1, grid);
  ScalarField s2 = sampleField(f2, grid);
  ScalarField sg = sampleField(g, grid);
  CHECK((s1.values - s2.values).norm() == 0.0);
  CHECK((s1.values - sg.values).norm() > 1e-3);
  CHECK(s1.values.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f1->maxDegree() <= 5);

  FuncPtr z = randomBandLimited(3, 4, 7, *QuadratureGrid::make(3, 10));
  CHECK(z->zonal());
  CHECK(z->dim() == 3);
}

TEST_CASE("randomUnitPoint is deterministic and unit length") {
  Eigen::VectorXd p1 = randomUnitPoint(3, 99);
  Eigen::VectorXd p2 = randomUnitPoint(3, 99);
  Eigen::VectorXd q = randomUnitPoint(3, 100);
  CHECK(p1.size() == 4);
  CHECK((p1 - p2).norm() == 0.0);
  CHECK((p1 - q).norm() > 1e-3);
  CHECK(p1.norm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("expression parser builds harmonic combinations") {
  FuncPtr f = parseHarmonicExpression(2, "0.5*Y(2,1) - Y(3,-2) + 2*Y(1,0)");
  SphericalHarmonic y21(2, 1), y3m2(3, -2), y10(1, 0);
  Eigen::Vector3d p = Eigen::Vector3d(0.3, -0.8, 0.52).normalized();
  double expect = 0.5 * y21.value(p) - y3m2.value(p) + 2 * y10.value(p);
  CHECK(f->value(p) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(f->maxDegree() == 3);

  FuncPtr z = parseHarmonicExpression(3, "Z(2) + 0.25*Z(4)");
  Eigen::VectorXd q(4);
  q << 0.1, 0.2, -0.3, 0.9;
  q.normalize();
  double zv = ZonalHarmonic(3, 2).value(q) + 0.25 * ZonalHarmonic(3, 4).value(q);
  CHECK(z->value(q) == doctest::Approx(zv).epsilon(1e-13));

  CHECK_THROWS(parseHarmonicExpression(2, "Y(2,1) + + Z"));
  CHECK_THROWS(parseHarmonicExpression(2, "Q(1)"));
}

TEST_CASE("projection recovers coefficients and synthesis round-trips") {
  GridPtr grid = QuadratureGrid::make(2, 24);
  auto y21 = std::make_shared<SphericalHarmonic>(2, 1);
  auto y43 = std::make_shared<SphericalHarmonic>(4, 3);
  auto sum = std::make_shared<HarmonicSum>(
      2, std::vector<std::pair<double, FuncPtr>>{{0.3, y21}, {0.7, y43}});
  ScalarField field = sampleField(sum, grid);
  HarmonicCoeffs coeffs = projectOntoHarmonics(field, 6);
  CHECK(coeffs.coefficient(2 * 3 + 1) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(coeffs.coefficient(4 * 5 + 3) == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(coeffs.coefficient(2 * 3 - 2) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(coeffs.residual <= 1e-10);

  Eigen::VectorXd back = synthesize(coeffs, *grid);
  CHECK((back - field.values).cwiseAbs().maxCoeff() <= 1e-10);

  FuncPtr rebuilt = functionFromCoeffs(coeffs);
  Eigen::Vector3d p = Eigen::Vector3d(-0.5, 0.1, 0.86).normalized();
  CHECK(rebuilt->value(p) == doctest::Approx(sum->value(p)).epsilon(1e-9));

  // zonal route for n = 3
  GridPtr g3 = QuadratureGrid::make(3, 12);
  auto z2 = std::make_shared<ZonalHarmonic>(3, 2);
  ScalarField zf = sampleField(z2, g3);
  HarmonicCoeffs zc = projectOntoHarmonics(zf, 5);
  CHECK(zc.zonalBasis);
  CHECK(zc.coefficient(2) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(zc.residual <= 1e-10);
}
