#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "spherevar/jets.hpp"

namespace spherevar {

// n-dimensional volume of the unit n-sphere, 2 π^{(n+1)/2} / Γ((n+1)/2).
double sphereVolume(int n);

// Gauss rule for ∫_{-1}^{1} f(u) (1-u²)^α du (Golub–Welsch on the symmetric
// Jacobi recurrence). α = 0 is Gauss–Legendre.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussRule gaussJacobiSymmetric(int npoints, double alpha);

// Value, chart-gradient and chart-Hessian of the embedding of a chart of S^n
// into R^{n+1}: p = Φ(x), columns of dp are ∂Φ/∂x_i, d2p[i][j] = ∂²Φ/∂x_i∂x_j.
struct ChartJets {
  Eigen::VectorXd p;
  Eigen::MatrixXd dp;
  std::vector<std::vector<Eigen::VectorXd>> d2p;
};

// Intrinsic round-sphere metric data of a chart point, derived from ChartJets.
struct SphereMetric {
  Eigen::MatrixXd g;
  Eigen::MatrixXd gInv;
  double sqrtG = 0.0;
  // Christoffel symbols Γ^k_{ij} indexed [k](i,j).
  std::vector<Eigen::MatrixXd> christoffel;
};
SphereMetric metricOf(const ChartJets& jets);

// Hyperspherical chart of S^n composed with a fixed ambient rotation.
// Angles: x_0..x_{n-2} polar in (0,π), x_{n-1} azimuthal in [0,2π).
// The reference coordinates (π/2,...,π/2,0) sit far from every chart
// singularity and map to rot * e_1.
class Chart {
 public:
  static Chart standard(int n);
  // Chart whose reference point is the given unit vector (Householder map).
  static Chart centeredAt(const Eigen::VectorXd& unitPoint);
  // Chart rotated by an arbitrary orthogonal matrix.
  static Chart rotated(Eigen::MatrixXd rotation);

  int dim() const { return n_; }
  const Eigen::MatrixXd& rotation() const { return rot_; }
  Eigen::VectorXd referenceCoords() const;

  Eigen::VectorXd point(const Eigen::VectorXd& angles) const;
  ChartJets jets(const Eigen::VectorXd& angles) const;
  // Chart coordinates of a unit point (inverse map).
  Eigen::VectorXd angles(const Eigen::VectorXd& unitPoint) const;

 private:
  Chart(int n, Eigen::MatrixXd rot) : n_(n), rot_(std::move(rot)) {}
  int n_;
  Eigen::MatrixXd rot_;
};

// Tensor-product quadrature over S^n in the standard chart: a Gauss rule with
// the appropriate (1-u²)^α weight per polar angle (α = (sin power - 1)/2) and
// a uniform periodic rule in the azimuth. Weights carry the full
// hyperspherical Jacobian, so Σ weights = vol(S^n).
class QuadratureGrid {
 public:
  static std::shared_ptr<const QuadratureGrid> make(int n, int resolution);

  int dim() const { return n_; }
  int resolution() const { return resolution_; }
  int size() const { return static_cast<int>(weights_.size()); }
  const Eigen::MatrixXd& nodes() const { return nodes_; }           // size × n angles
  const Eigen::MatrixXd& unitPoints() const { return unitPoints_; } // size × (n+1)
  const Eigen::VectorXd& weights() const { return weights_; }
  const Chart& chart() const { return chart_; }

  // Compensated (Kahan) sum of w_i * values_i; deterministic order.
  double integrate(const Eigen::VectorXd& values) const;

 private:
  QuadratureGrid(int n, int resolution);
  int n_;
  int resolution_;
  Eigen::MatrixXd nodes_;
  Eigen::MatrixXd unitPoints_;
  Eigen::VectorXd weights_;
  Chart chart_;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

struct HarmonicCoeffs;

// Samples of a scalar function at the grid nodes, with optional spectral
// coefficients attached by projection.
struct ScalarField {
  GridPtr grid;
  Eigen::VectorXd values;
  std::shared_ptr<const HarmonicCoeffs> coeffs;  // optional

  double integrate() const;
  double mean() const;
};

double integrate(const ScalarField& field, const QuadratureGrid& grid);

}  // namespace spherevar
