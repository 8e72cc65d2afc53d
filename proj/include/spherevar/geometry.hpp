#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "spherevar/harmonics.hpp"
#include "spherevar/sphere.hpp"

namespace spherevar {

// Dense n×n matrix of jets, row-major. n stays tiny (chart dimension).
template <class T>
struct SmallMat {
  int n = 0;
  std::vector<T> a;

  SmallMat() = default;
  explicit SmallMat(int size) : n(size), a(static_cast<size_t>(size) * size) {}
  T& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

// Gauss-Jordan inverse with partial pivoting on jet values; also returns the
// determinant. Throws on a singular value part.
template <class T>
SmallMat<T> invertSmall(const SmallMat<T>& m, T& det);

// Generalized cross product in R^{n+1}: the vector orthogonal to n input
// vectors with ⟨u, cross⟩ = det[u, v_1, ..., v_n].
Eigen::VectorXd generalizedCross(const std::vector<Eigen::VectorXd>& v);

// Outward unit normal of a hypersurface patch from the n tangent vectors,
// oriented so the radial component is positive (N = +Φ on the unit sphere).
Eigen::VectorXd unitNormal(const std::vector<Eigen::VectorXd>& tangents,
                           const Eigen::VectorXd& position);

// Pointwise extrinsic geometry with first and second parameter derivatives.
// Conventions: h_ij = ⟨X_i, ∂N/∂x_j⟩ = -⟨X_ij, N⟩, so the unit sphere has
// h = ḡ, H = 1, bigH = n, secondFundamentalNormSq = n.
struct GeometryJet {
  int n = 0;
  std::vector<Jet2d> position;  // X, n+1 entries
  SmallMat<Jet2d> g;
  SmallMat<Jet2d> gInv;
  Jet2d sqrtG;
  std::vector<Jet2d> normal;  // n+1 entries
  SmallMat<Jet2d> h;
  Jet2d H;                       // mean curvature (1/n) tr(g^{-1} h)
  Jet2d bigH;                    // tr(g^{-1} h) = n H
  Jet2d II2;                     // |II|² = tr((g^{-1} h)²)
  double sqrtGbar = 0.0;         // round-sphere chart density at the same point

  Jet2d H2() const { return H * H; }
  Jet2d bigH2() const { return bigH * bigH; }
  Jet2d areaRatio() const { return sqrtG / sqrtGbar; }
};

// Radial jets of a shape at a chart point: ρ and its chart derivatives, each
// carrying derivatives in the family parameter (constant jets for rigid
// shapes).
struct RadialJets {
  Jet2d rho;
  std::vector<Jet2d> rhoI;
  SmallMat<Jet2d> rhoIJ;
};

// Assembles the surface geometry of the radial graph ρ·Φ over a chart point.
// contextT only labels degeneracy errors.
GeometryJet geometryFromRadial(const ChartJets& chart, const RadialJets& radial,
                               double contextT = std::numeric_limits<double>::quiet_NaN());

// |II|² at a point (value part), the scalar contract used by the spectrum
// module.
double secondFundamentalNormSq(const GeometryJet& jet);

// Hypersurface given as a radial graph over S^n.
class RadialShape {
 public:
  virtual ~RadialShape() = default;
  virtual int dim() const = 0;
  virtual RadialJets radialJets(const Chart& chart, const Eigen::VectorXd& angles) const = 0;
  virtual bool zonal() const { return false; }

  GeometryJet geometryAt(const Chart& chart, const Eigen::VectorXd& angles) const;
  // Geometry in a chart centered at the given unit direction.
  GeometryJet geometryAtPoint(const Eigen::VectorXd& unitPoint) const;
  double radius(const Eigen::VectorXd& unitPoint) const;
};

using ShapePtr = std::shared_ptr<const RadialShape>;

// Round sphere of the given radius.
class SphereShape : public RadialShape {
 public:
  SphereShape(int n, double radius);
  int dim() const override { return n_; }
  bool zonal() const override { return true; }
  RadialJets radialJets(const Chart& chart, const Eigen::VectorXd& angles) const override;

 private:
  int n_;
  double r_;
};

// Ellipsoid with the given semi-axes (n = 2: (a, b, c)), optionally rescaled
// by a global factor.
class EllipsoidShape : public RadialShape {
 public:
  EllipsoidShape(Eigen::VectorXd semiAxes, double scale = 1.0);
  int dim() const override { return static_cast<int>(axes_.size()) - 1; }
  RadialJets radialJets(const Chart& chart, const Eigen::VectorXd& angles) const override;
  EllipsoidShape scaled(double s) const { return EllipsoidShape(axes_, scale_ * s); }
  double scale() const { return scale_; }

 private:
  Eigen::VectorXd axes_;
  double scale_;
};

// Unit sphere translated by a vector |c| < 1, as a radial graph:
// ρ(u) = ⟨u,c⟩ + sqrt(⟨u,c⟩² + 1 - |c|²).
class TranslatedSphereShape : public RadialShape {
 public:
  explicit TranslatedSphereShape(Eigen::VectorXd center);
  int dim() const override { return static_cast<int>(center_.size()) - 1; }
  RadialJets radialJets(const Chart& chart, const Eigen::VectorXd& angles) const override;
  const Eigen::VectorXd& center() const { return center_; }

 private:
  Eigen::VectorXd center_;
};

// Static perturbed sphere ρ(u) = scale · (1 + amplitude · f(u)); the scan
// geometry. Radius must stay positive.
class PerturbedSphereShape : public RadialShape {
 public:
  PerturbedSphereShape(FuncPtr f, double amplitude, double scale = 1.0);
  int dim() const override { return f_->dim(); }
  bool zonal() const override { return f_->zonal(); }
  RadialJets radialJets(const Chart& chart, const Eigen::VectorXd& angles) const override;
  PerturbedSphereShape scaled(double s) const { return PerturbedSphereShape(f_, amp_, scale_ * s); }
  double scale() const { return scale_; }
  double amplitude() const { return amp_; }
  const FuncPtr& direction() const { return f_; }

 private:
  FuncPtr f_;
  double amp_;
  double scale_;
};

// n-volume (surface measure) of a radial shape by quadrature.
double shapeVolume(const RadialShape& shape, const QuadratureGrid& grid);

// ∫_M integrand dM where the integrand is computed from the pointwise
// geometry jet (value parts).
double surfaceIntegral(const RadialShape& shape, const QuadratureGrid& grid,
                       const std::function<double(const GeometryJet&)>& integrand);

}  // namespace spherevar
