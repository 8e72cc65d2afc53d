#include <cmath>
#include <numbers>

#include "doctest.h"
#include "spherevar/io.hpp"
#include "spherevar/willmore.hpp"

using namespace spherevar;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("willmore functionals are exact on round spheres") {
  GridPtr g2 = QuadratureGrid::make(2, 20);
  CHECK(willmoreClassical(SphereShape(2, 1.0), *g2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(willmoreOfShape(SphereShape(2, 1.0), *g2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(willmoreOfShape(SphereShape(2, 3.0), *g2) == doctest::Approx(2.0).epsilon(1e-12));

  GridPtr g3 = QuadratureGrid::make(3, 12);
  CHECK(willmoreOfShape(SphereShape(3, 1.0), *g3) == doctest::Approx(3.0).epsilon(1e-12));
  // for n >= 3 the functional scales as r^(n-2); claims compare volume-normalized shapes
  CHECK(willmoreOfShape(SphereShape(3, 1.7), *g3) == doctest::Approx(3.0 * 1.7).epsilon(1e-12));
  CHECK_THROWS(willmoreClassical(SphereShape(3, 1.0), *g3));

  // translated spheres are round spheres
  Eigen::Vector3d c(0.4, 0.0, 0.1);
  CHECK(willmoreOfShape(TranslatedSphereShape(c), *g2) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("ellipsoids sit strictly above the sphere value") {
  GridPtr grid = QuadratureGrid::make(2, 24);
  double w = willmoreOfShape(EllipsoidShape(Eigen::Vector3d(1.2, 1.0, 0.9)), *grid);
  CHECK(w > 2.0 + 1e-4);
  // scale invariance of the normalized functional
  double ws = willmoreOfShape(EllipsoidShape(Eigen::Vector3d(1.2, 1.0, 0.9), 2.5), *grid);
  CHECK(ws == doctest::Approx(w).epsilon(1e-11));
}

TEST_CASE("stability polynomial has integer coefficients and roots") {
  StabilityPolynomial q2 = StabilityPolynomial::make(2);
  CHECK(q2.coeffs[0] == 2);
  CHECK(q2.coeffs[1] == -4);
  CHECK(q2.coeffs[2] == 0);
  CHECK(q2.roots[0] == 0);
  CHECK(q2.roots[1] == 2);
  CHECK(q2.eval(6) == 48);
  CHECK(q2.eval(0) == 0);
  CHECK(q2.eval(2) == 0);
  CHECK(q2.evalReal(6.0) == doctest::Approx(48.0));

  StabilityPolynomial q3 = StabilityPolynomial::make(3);
  CHECK(q3.coeffs[0] == 2);
  CHECK(q3.coeffs[1] == 0);
  CHECK(q3.coeffs[2] == -18);
  CHECK(q3.roots[0] == -3);
  CHECK(q3.roots[1] == 3);
  CHECK(q3.eval(8) == 110);

  for (int n = 2; n <= 6; ++n) {
    StabilityPolynomial q = StabilityPolynomial::make(n);
    CHECK(q.roots[0] == std::min<long long>(2 * n - n * n, n));
    CHECK(q.roots[1] == std::max<long long>(2 * n - n * n, n));
    CHECK(q.eval(q.roots[0]) == 0);
    CHECK(q.eval(q.roots[1]) == 0);
  }
}

TEST_CASE("first variation vanishes in closed form and by finite differences") {
  GridPtr grid = QuadratureGrid::make(2, 24);
  RadialVariation var(grid, std::make_shared<SphericalHarmonic>(2, 0));
  FirstVariationResult fv = willmoreFirstVariation(var);
  CHECK(std::abs(fv.closedForm) <= 1e-12);
  CHECK(std::abs(fv.fdEstimate) <= 1e-6);
}

TEST_CASE("second variation: finite differences meet the spectral sum") {
  GridPtr grid = QuadratureGrid::make(2, 24);

  // beta = 6 unit mode: W''(0) = q(6)/(n vol) = 48/(8 pi) = 6/pi
  RadialVariation v20(grid, std::make_shared<SphericalHarmonic>(2, 0));
  SpectralSecondVariation sp = willmoreSecondVariationSpectral(v20);
  CHECK(sp.value == doctest::Approx(6.0 / kPi).epsilon(1e-10));
  CHECK(sp.projectionResidual <= 1e-8);
  REQUIRE(sp.modes.size() == 1);
  CHECK(sp.modes[0].beta == doctest::Approx(6.0));
  CHECK(std::abs(sp.modes[0].a) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sp.modes[0].polyValue == doctest::Approx(48.0));
  double fd = willmoreSecondVariationFD(v20);
  CHECK(std::abs(fd - sp.value) / std::abs(sp.value) <= 1e-4);

  // beta = 12 mode
  RadialVariation v32(grid, std::make_shared<SphericalHarmonic>(3, 2));
  SpectralSecondVariation sp32 = willmoreSecondVariationSpectral(v32);
  CHECK(sp32.value == doctest::Approx(240.0 / (8 * kPi)).epsilon(1e-10));
  CHECK(std::abs(willmoreSecondVariationFD(v32) - sp32.value) / sp32.value <= 1e-4);

  // mixed mode adds contributions
  auto mix = std::make_shared<HarmonicSum>(
      2, std::vector<std::pair<double, FuncPtr>>{
             {0.6, std::make_shared<SphericalHarmonic>(2, 0)},
             {0.8, std::make_shared<SphericalHarmonic>(3, 1)}});
  RadialVariation vmix(grid, mix);
  SpectralSecondVariation spm = willmoreSecondVariationSpectral(vmix);
  double expect = (0.36 * 48.0 + 0.64 * (2 * 144 - 4 * 12)) / (8 * kPi);
  CHECK(spm.value == doctest::Approx(expect).epsilon(1e-9));
  CHECK(std::abs(willmoreSecondVariationFD(vmix) - spm.value) / spm.value <= 1e-4);

  // n = 3 zonal: beta = 8, q(8) = 110, vol = 2 pi^2
  GridPtr g3 = QuadratureGrid::make(3, 12);
  RadialVariation vz(g3, std::make_shared<ZonalHarmonic>(3, 2));
  SpectralSecondVariation spz = willmoreSecondVariationSpectral(vz);
  CHECK(spz.value == doctest::Approx(110.0 / (3 * 2 * kPi * kPi)).epsilon(1e-9));
  CHECK(std::abs(willmoreSecondVariationFD(vz) - spz.value) / spz.value <= 1e-4);
}

TEST_CASE("willmore curve stays above n with tiny refinement error") {
  GridPtr grid = QuadratureGrid::make(2, 24);
  RadialVariation var(grid, std::make_shared<SphericalHarmonic>(2, 0));
  std::vector<double> ts = {-0.05, -0.02, 0.0, 0.02, 0.05};
  WillmoreCurve curve = willmoreCurve(var, ts, true);
  REQUIRE(curve.points.size() == ts.size());
  CHECK_FALSE(curve.usedTranslationFamily);
  for (const auto& pt : curve.points) {
    CHECK(pt.value >= 2.0 - 1e-8);
    CHECK(pt.errorEstimate <= 1e-6);
  }
  CHECK(curve.points[2].value == doctest::Approx(2.0).epsilon(1e-12));
  // curve curvature consistent with the second variation
  CHECK(curve.fdSecondVariation == doctest::Approx(6.0 / kPi).epsilon(1e-4));
  double quad = (curve.points[4].value - 2 * curve.points[2].value + curve.points[0].value) /
                (0.05 * 0.05);
  CHECK(quad == doctest::Approx(6.0 / kPi).epsilon(0.05));

  // consistency of the two W(t) routes
  double t = 0.05;
  CHECK(willmoreNormalized(var, t) ==
        doctest::Approx(willmoreOfShape(*var.slice(t), *grid)).epsilon(1e-12));
}

TEST_CASE("degree-1 directions ride the exact translation family") {
  GridPtr grid = QuadratureGrid::make(2, 24);
  auto y11 = std::make_shared<SphericalHarmonic>(1, 1);
  RadialVariation var(grid, y11);
  std::vector<double> ts = {-0.08, -0.04, 0.0, 0.04, 0.08};
  WillmoreCurve curve = willmoreCurve(var, ts, true);
  CHECK(curve.usedTranslationFamily);
  for (const auto& pt : curve.points) CHECK(std::abs(pt.value - 2.0) <= 1e-8);
  CHECK(std::abs(curve.spectralSecondVariation) <= 1e-10);
  CHECK(std::abs(curve.fdSecondVariation) <= 1e-5);

  // beta = 2 sits exactly on a polynomial root: no quadratic growth
  SpectralSecondVariation sp = willmoreSecondVariationSpectral(var);
  CHECK(std::abs(sp.value) <= 1e-10);
}

TEST_CASE("conjecture scan is deterministic and schedule-independent") {
  ScanConfig cfg;
  cfg.n = 2;
  cfg.resolution = 12;
  cfg.samples = 6;
  cfg.amplitude = 0.15;
  cfg.kmax = 4;
  cfg.seed = 11;
  cfg.threads = 1;
  ScanReport serial = conjectureScan(cfg);
  CHECK(serial.violations == 0);
  CHECK(serial.minW > 2.0);
  CHECK(static_cast<int>(serial.samples.size()) == cfg.samples);
  CHECK(serial.argmin >= 0);

  ScanConfig par = cfg;
  par.threads = 3;
  ScanReport threaded = conjectureScan(par);
  CHECK(scanCsv(serial).serialize() == scanCsv(threaded).serialize());

  ScanReport rerun = conjectureScan(cfg);
  CHECK(scanCsv(serial).serialize() == scanCsv(rerun).serialize());

  // amplitude 0 collapses to the round sphere
  ScanConfig zero = cfg;
  zero.amplitude = 0.0;
  zero.samples = 3;
  ScanReport flat = conjectureScan(zero);
  for (const auto& s : flat.samples) CHECK(std::abs(s.w - 2.0) <= 1e-10);

  ScanConfig bad = cfg;
  bad.amplitude = 1.0;
  CHECK_THROWS(conjectureScan(bad));
}
