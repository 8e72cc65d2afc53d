#include "spherevar/willmore.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "spherevar/parallel.hpp"

namespace spherevar {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

double willmoreClassical(const RadialShape& shape, const QuadratureGrid& grid) {
  if (shape.dim() != 2)
    throw std::invalid_argument("willmoreClassical: defined for surfaces in R^3 only");
  double intH2 = surfaceIntegral(shape, grid,
                                 [](const GeometryJet& jet) { return valueOf(jet.H2()); });
  return intH2 / (2.0 * kPi);
}

double willmoreOfShape(const RadialShape& shape, const QuadratureGrid& grid) {
  const int n = shape.dim();
  double intBigH2 = surfaceIntegral(shape, grid,
                                    [](const GeometryJet& jet) { return valueOf(jet.bigH2()); });
  return intBigH2 / (n * sphereVolume(n));
}

double willmoreNormalized(const RadialVariation& var, double t) {
  const int n = var.dim();
  const QuadratureGrid& grid = var.grid();
  Eigen::VectorXd values(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    GeometryJet jet = var.embeddingJet(grid.chart(), grid.nodes().row(i).transpose(), t);
    values(i) = valueOf(jet.bigH2()) * valueOf(jet.areaRatio());
  }
  return grid.integrate(values) / (n * sphereVolume(n));
}

namespace {

// 5-point central stencils with one Richardson pass over h and h/2.
template <class F>
double richardsonFirst(F&& f, double h) {
  auto stencil = [&](double step) {
    return (-f(2 * step) + 8.0 * f(step) - 8.0 * f(-step) + f(-2 * step)) / (12.0 * step);
  };
  double dh = stencil(h), dh2 = stencil(0.5 * h);
  return (16.0 * dh2 - dh) / 15.0;
}

template <class F>
double richardsonSecond(F&& f, double h) {
  double f0 = f(0.0);
  auto stencil = [&](double step) {
    return (-f(2 * step) + 16.0 * f(step) - 30.0 * f0 + 16.0 * f(-step) - f(-2 * step)) /
           (12.0 * step * step);
  };
  double dh = stencil(h), dh2 = stencil(0.5 * h);
  return (16.0 * dh2 - dh) / 15.0;
}

}  // namespace

FirstVariationResult willmoreFirstVariation(const RadialVariation& var) {
  const int n = var.dim();
  const double vol = sphereVolume(n);
  FirstVariationResult out;
  Eigen::VectorXd shifted = (var.directionField().values.array() + var.phiPrime0()).matrix();
  out.closedForm = -2.0 * n / vol * var.grid().integrate(shifted);
  double h = var.tMax() / 4.0;
  out.fdEstimate = richardsonFirst([&](double t) { return willmoreNormalized(var, t); }, h);
  return out;
}

double willmoreSecondVariationFD(const RadialVariation& var) {
  double h = var.tMax() / 4.0;
  return richardsonSecond([&](double t) { return willmoreNormalized(var, t); }, h);
}

StabilityPolynomial StabilityPolynomial::make(int n) {
  if (n < 2) throw std::invalid_argument("StabilityPolynomial: n must be >= 2");
  StabilityPolynomial p;
  p.n = n;
  long long N = n;
  p.coeffs = {2, -(6 * N - 2 * N * N), 4 * N * N - 2 * N * N * N};
  long long r1 = 2 * N - N * N;
  long long r2 = N;
  p.roots = {std::min(r1, r2), std::max(r1, r2)};
  return p;
}

long long StabilityPolynomial::eval(long long beta) const {
  return coeffs[0] * beta * beta + coeffs[1] * beta + coeffs[2];
}

double StabilityPolynomial::evalReal(double beta) const {
  return coeffs[0] * beta * beta + coeffs[1] * beta + coeffs[2];
}

SpectralSecondVariation willmoreSecondVariationSpectral(const RadialVariation& var, int kMax) {
  const int n = var.dim();
  const double vol = sphereVolume(n);
  ScalarField shifted;
  shifted.grid = var.gridPtr();
  shifted.values = (var.directionField().values.array() + var.phiPrime0()).matrix();

  int band = var.direction()->maxDegree();
  if (band > kMax) kMax = band;
  HarmonicCoeffs coeffs = projectOntoHarmonics(shifted, kMax);
  SpectralSecondVariation out;
  out.projectionResidual = coeffs.residual;
  if (coeffs.residual > 1e-8)
    throw std::runtime_error(
        "willmoreSecondVariationSpectral: projection residual " + std::to_string(coeffs.residual) +
        " exceeds 1e-8; raise the band limit");
  StabilityPolynomial poly = StabilityPolynomial::make(n);
  double acc = 0.0;
  for (const auto& e : coeffs.entries) {
    ModeTerm term;
    term.index = e.index;
    term.beta = e.beta;
    term.a = e.a;
    term.polyValue = poly.evalReal(e.beta);
    term.contribution = e.a * e.a * term.polyValue / (n * vol);
    acc += term.contribution;
    if (std::abs(term.a) > 1e-12) out.modes.push_back(term);
  }
  out.value = acc;
  return out;
}

WillmoreCurve willmoreCurve(const RadialVariation& var, const std::vector<double>& tGrid,
                            bool refineErrors) {
  WillmoreCurve curve;
  const int n = var.dim();

  // A purely degree-1 direction generates the translated-sphere equality
  // family. The constant-φ variation agrees with it only to second order, so
  // realize such directions through the exact family instead.
  Eigen::VectorXd b = degreeOneVector(var);
  Eigen::VectorXd residual = var.directionField().values;
  for (int i = 0; i < var.grid().size(); ++i)
    residual(i) -= b.dot(var.grid().unitPoints().row(i).transpose());
  double resNorm = std::sqrt(var.grid().integrate(residual.cwiseProduct(residual)));
  bool pureDegreeOne = b.norm() > 1e-12 && resNorm <= 1e-10 * std::max(1.0, b.norm());
  curve.usedTranslationFamily = pureDegreeOne;

  GridPtr fineGrid;
  std::optional<RadialVariation> fineVar;
  if (refineErrors) {
    fineGrid = QuadratureGrid::make(n, 2 * var.grid().resolution());
    if (!pureDegreeOne) fineVar.emplace(fineGrid, var.direction());
  }

  for (double t : tGrid) {
    WillmoreCurvePoint pt;
    pt.t = t;
    if (pureDegreeOne) {
      ShapePtr slice = translationFamilySlice(b, t);
      pt.value = willmoreOfShape(*slice, var.grid());
      if (refineErrors) pt.errorEstimate = std::abs(willmoreOfShape(*slice, *fineGrid) - pt.value);
    } else {
      pt.value = willmoreNormalized(var, t);
      if (refineErrors) pt.errorEstimate = std::abs(willmoreNormalized(*fineVar, t) - pt.value);
    }
    curve.points.push_back(pt);
  }
  curve.fdFirstVariation = willmoreFirstVariation(var).fdEstimate;
  curve.fdSecondVariation = willmoreSecondVariationFD(var);
  curve.spectralSecondVariation = willmoreSecondVariationSpectral(var).value;
  return curve;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Newton solve for the global radial multiplier c with vol(c · shape) =
// vol(S^n); the surface measure of a homothety scales as c^n, so the slope is
// n · vol / c.
PerturbedSphereShape normalizeVolume(const PerturbedSphereShape& raw, const QuadratureGrid& grid) {
  const int n = raw.dim();
  const double target = sphereVolume(n);
  double c = 1.0;
  for (int iter = 0; iter < 50; ++iter) {
    PerturbedSphereShape candidate = raw.scaled(c);
    double vol = shapeVolume(candidate, grid);
    if (std::abs(vol - target) / target <= 1e-12) return candidate;
    c -= (vol - target) * c / (n * vol);
  }
  throw std::runtime_error("conjectureScan: volume renormalization did not converge");
}

}  // namespace

ScanReport conjectureScan(const ScanConfig& config) {
  if (config.samples < 1) throw std::invalid_argument("conjectureScan: need at least one sample");
  if (config.amplitude < 0.0 || config.amplitude >= 1.0)
    throw std::invalid_argument("conjectureScan: amplitude must lie in [0, 1)");
  ScanReport report;
  report.config = config;
  const int n = config.n;
  const double tol = 1e-9;
  GridPtr grid = QuadratureGrid::make(n, config.resolution);
  GridPtr fineGrid = QuadratureGrid::make(n, 2 * config.resolution);

  std::vector<ScanSample> samples(config.samples);
  std::vector<int> rejectedPerSample(config.samples, 0);
  parallelFor(config.samples, config.threads, [&](int id) {
    // Split stream per sample: reproducible for a fixed seed regardless of
    // evaluation order or thread count.
    std::uint64_t sampleSeed = splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(id)));
    FuncPtr dir;
    std::optional<PerturbedSphereShape> shape;
    for (int attempt = 0; !shape; ++attempt) {
      if (attempt > 100) throw std::runtime_error("conjectureScan: resampling failed repeatedly");
      dir = randomBandLimited(n, config.kmax, sampleSeed + attempt, *grid);
      try {
        shape = normalizeVolume(PerturbedSphereShape(dir, config.amplitude), *grid);
      } catch (const std::runtime_error&) {
        // Non-embedded draw (radius hit zero); resample and count it.
        ++rejectedPerSample[id];
      }
    }
    ScanSample sample;
    sample.id = id;
    sample.w = willmoreOfShape(*shape, *grid);
    sample.margin = sample.w - n;
    sample.nearEquality = sample.w < n + 1e-6;
    sample.wRefined = sample.w;
    if (sample.w < n - tol) {
      // Re-verify at doubled resolution before counting a violation.
      PerturbedSphereShape fine = normalizeVolume(PerturbedSphereShape(dir, config.amplitude),
                                                  *fineGrid);
      sample.wRefined = willmoreOfShape(fine, *fineGrid);
      sample.violation = sample.wRefined < n - tol;
    }
    if (sample.nearEquality) {
      // Near-equality shapes should be near-translations: measure the
      // degree-1 share of the centered radial deviation.
      Eigen::VectorXd dev(grid->size());
      for (int i = 0; i < grid->size(); ++i)
        dev(i) = shape->radius(grid->unitPoints().row(i).transpose());
      dev.array() -= grid->integrate(dev) / sphereVolume(n);
      double total = grid->integrate(dev.cwiseProduct(dev));
      if (total > 1e-30) {
        double deg1 = 0.0;
        for (int k = 0; k <= n; ++k) {
          Eigen::VectorXd coord = grid->unitPoints().col(k);
          double a = grid->integrate(coord.cwiseProduct(dev));
          deg1 += a * a * (n + 1) / sphereVolume(n);
        }
        sample.degreeOneFraction = deg1 / total;
      } else {
        sample.degreeOneFraction = 1.0;
      }
    }
    samples[id] = sample;
  });

  report.samples = std::move(samples);
  report.minW = std::numeric_limits<double>::infinity();
  for (const ScanSample& sample : report.samples) {
    report.rejected += rejectedPerSample[sample.id];
    if (sample.violation) ++report.violations;
    if (sample.w < report.minW) {
      report.minW = sample.w;
      report.argmin = sample.id;
    }
  }
  return report;
}

}  // namespace spherevar
