#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "spherevar/sphere.hpp"

namespace spherevar {

// Eigenvalue of -Δ on S^n for spherical-harmonic degree k.
double laplaceEigenvalue(int n, int k);

// Chart-derivative bundle of a scalar function at a chart point.
struct FieldJets {
  double f = 0.0;
  Eigen::VectorXd fi;   // ∂f/∂x_i
  Eigen::MatrixXd fij;  // ∂²f/∂x_i∂x_j
};

// Smooth scalar function on S^n. The primitive operation is evaluation on an
// AD-valued unit point, which yields exact chart derivatives in any rotated
// chart by composition; numeric wrappers may override chartJets instead.
class SphereFunction {
 public:
  virtual ~SphereFunction() = default;
  virtual int dim() const = 0;
  virtual DualN evalAD(const std::vector<DualN>& unitPoint) const = 0;
  virtual bool zonal() const { return false; }
  // Band limit of the function, or -1 if not band-limited/unknown.
  virtual int maxDegree() const { return -1; }

  double value(const Eigen::VectorXd& unitPoint) const;
  virtual FieldJets chartJets(const Chart& chart, const Eigen::VectorXd& angles) const;
};

using FuncPtr = std::shared_ptr<const SphereFunction>;

// Real orthonormal spherical harmonic Y_{l,m} on S². m > 0 are the cosine
// modes, m < 0 the sine modes. Evaluated pole-safe via the solid-harmonic
// factorization G_{l,m}(z)·Re/Im[(x+iy)^{|m|}].
class SphericalHarmonic : public SphereFunction {
 public:
  SphericalHarmonic(int l, int m);
  int dim() const override { return 2; }
  DualN evalAD(const std::vector<DualN>& p) const override;
  bool zonal() const override { return m_ == 0; }
  int maxDegree() const override { return l_; }
  int l() const { return l_; }
  int m() const { return m_; }
  static double at(int l, int m, const Eigen::VectorXd& unitPoint);

 private:
  int l_, m_;
  double norm_;
};

// Orthonormal zonal harmonic of degree k on S^n (Gegenbauer in cos θ_1,
// θ_1 the angle from the last coordinate axis).
class ZonalHarmonic : public SphereFunction {
 public:
  ZonalHarmonic(int n, int k);
  int dim() const override { return n_; }
  DualN evalAD(const std::vector<DualN>& p) const override;
  bool zonal() const override { return true; }
  int maxDegree() const override { return k_; }
  int k() const { return k_; }
  // Value at polar angle θ.
  static double at(int n, int k, double theta);

 private:
  int n_, k_;
  double norm_;
};

// Linear combination of sphere functions.
class HarmonicSum : public SphereFunction {
 public:
  HarmonicSum(int n, std::vector<std::pair<double, FuncPtr>> terms);
  int dim() const override { return n_; }
  DualN evalAD(const std::vector<DualN>& p) const override;
  bool zonal() const override;
  int maxDegree() const override;
  const std::vector<std::pair<double, FuncPtr>>& terms() const { return terms_; }

 private:
  int n_;
  std::vector<std::pair<double, FuncPtr>> terms_;
};

// Wrapper for point-value-only functions: chart derivatives by order-4
// central differences in the chart coordinates.
class NumericSphereFunction : public SphereFunction {
 public:
  NumericSphereFunction(int n, std::function<double(const Eigen::VectorXd&)> fn, double step = 1e-3);
  int dim() const override { return n_; }
  DualN evalAD(const std::vector<DualN>& p) const override;
  FieldJets chartJets(const Chart& chart, const Eigen::VectorXd& angles) const override;

 private:
  int n_;
  std::function<double(const Eigen::VectorXd&)> fn_;
  double step_;
};

// Gaussian random band-limited combination, normalized to sup-norm 1 on the
// grid. Full basis for n = 2, zonal basis for n >= 3. Deterministic in seed.
FuncPtr randomBandLimited(int n, int kmax, std::uint64_t seed, const QuadratureGrid& grid);

// Uniform random point on S^n (normalized Gaussian vector), deterministic in
// seed and portable across standard libraries.
Eigen::VectorXd randomUnitPoint(int n, std::uint64_t seed);

// Tiny expression grammar over harmonic atoms: "0.5*Y(2,1) - Z(3) + 2*Y(1,0)".
FuncPtr parseHarmonicExpression(int n, const std::string& text);

ScalarField sampleField(const FuncPtr& f, const GridPtr& grid);

// Spectral coefficients of a field. Flat index: l(l+1)+m for the full S²
// basis, k for the zonal basis.
struct HarmonicCoeffs {
  int n = 2;
  int kmax = 0;
  bool zonalBasis = false;
  struct Entry {
    int index;
    double a;
    double beta;
  };
  std::vector<Entry> entries;
  double residual = 0.0;  // L² norm of values minus synthesis

  double coefficient(int index) const;
};

// L² projection by quadrature inner products. n = 2 uses the full basis;
// n >= 3 requires a zonal field (checked numerically) and uses the zonal
// basis. kMax defaults to 12.
HarmonicCoeffs projectOntoHarmonics(const ScalarField& field, int kMax = 12);

Eigen::VectorXd synthesize(const HarmonicCoeffs& coeffs, const QuadratureGrid& grid);

// Reconstructs a SphereFunction from projection coefficients.
FuncPtr functionFromCoeffs(const HarmonicCoeffs& coeffs);

}  // namespace spherevar
