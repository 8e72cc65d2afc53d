#pragma once

#include <Eigen/Sparse>

#include "spherevar/variation.hpp"

namespace spherevar {

// Operator selection: 𝓛 = −Δ − 𝐇²/n (Jacobi stability operator),
// L = −Δ − |II|² (full second-fundamental-form potential), or the plain
// Laplacian −Δ (calibration layer).
enum class OperatorKind { Jacobi, SchroedingerII, LaplaceOnly };

// Subdivided icosahedron: unit directions plus consistently outward-oriented
// faces. depth 0 is the icosahedron itself; each level splits every triangle
// in four with midpoints reprojected to the unit sphere.
struct IcosphereTemplate {
  Eigen::MatrixXd directions;  // V×3 unit vectors
  Eigen::MatrixXi faces;       // F×3 vertex indices
};
IcosphereTemplate buildIcosphere(int depth);

// Triangulated radial graph over S²: vertices at radius(v)·v over icosphere
// directions v, cotangent stiffness, lumped barycentric mass, and per-vertex
// curvature data sampled analytically from the geometry kernel (not from the
// discrete mesh).
struct TriMesh {
  int depth = 0;
  Eigen::MatrixXd vertices;  // V×3
  Eigen::MatrixXi faces;     // F×3, outward orientation
  Eigen::SparseMatrix<double> stiffness;  // symmetric, zero row sums
  Eigen::VectorXd mass;                   // positive lumped areas, Σ = area
  Eigen::VectorXd meanCurvature;          // analytic 𝐇 per vertex
  Eigen::VectorXd potentialJacobi;        // −𝐇²/n per vertex
  Eigen::VectorXd potentialII;            // −|II|² per vertex

  double area() const { return mass.sum(); }
};

// Builds the mesh for a radial shape (n = 2 only). Throws on non-positive
// radius and on any manifold/orientation defect.
TriMesh buildMesh(const RadialShape& shape, int depth);
TriMesh buildMesh(const RadialVariation& var, double t, int depth);

// Median over vertices of the relative gap between the discrete
// cotangent mean-curvature magnitude ‖(S X)_i‖ / mass_i and the analytic 𝐇.
// Cross-check only; the operators always use the analytic potential.
double discreteMeanCurvatureGap(const TriMesh& mesh);

// Symmetric generalized pencil A u = λ M u with diagonal (lumped) mass.
struct Pencil {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd mass;
};
Pencil assembleOperator(const TriMesh& mesh, OperatorKind kind);

// Zonal Sturm–Liouville reduction of the operator on a rotationally
// symmetric shape: −(1/J)(J a u')' + V on θ ∈ (0,π) with J = √g and
// a = g^{θθ} along a meridian, cell-centered second-order finite differences,
// and the natural pole closure (the flux J a u' vanishes with J at both
// poles).
struct ZonalProblem {
  int n = 0;
  int resolution = 0;
  Eigen::VectorXd theta;  // cell centers
  Pencil pencil;
};
ZonalProblem buildZonal(const RadialShape& shape, int resolution, OperatorKind kind);

struct SpectrumResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // N×k, M-orthonormal, sign-fixed
  Eigen::VectorXd residuals;     // ‖A u − λ M u‖ / ‖M u‖ per pair
  int iterations = 0;
  int discretization = 0;  // mesh depth or 1-D resolution
};

struct EigenOptions {
  int maxIterations = 500;
  double tolerance = 1e-9;
  int guardVectors = 3;  // extra block columns beyond k
};

// k smallest eigenpairs of A u = λ M u by blocked shifted inverse iteration:
// one sparse factorization of A − σM with σ below the pencil-Gershgorin
// lower bound, M-orthonormalized block updates (deflation), Rayleigh–Ritz
// extraction, deterministic start vectors. Throws on non-convergence.
SpectrumResult lowestEigenpairs(const Pencil& pencil, int k, const EigenOptions& opts = {});

// Convenience wrappers binding discretization + assembly + solve.
SpectrumResult femSpectrum(const RadialShape& shape, int depth, OperatorKind kind, int k,
                           const EigenOptions& opts = {});
SpectrumResult femSpectrum(const RadialVariation& var, double t, int depth, OperatorKind kind,
                           int k, const EigenOptions& opts = {});
SpectrumResult zonalSturmLiouville(const RadialShape& shape, int resolution, OperatorKind kind,
                                   int k, const EigenOptions& opts = {});
SpectrumResult zonalSturmLiouville(const RadialVariation& var, double t, int resolution,
                                   OperatorKind kind, int k, const EigenOptions& opts = {});

// Same spectrum at two discretizations: value from the finer solve, per-index
// error bar = |fine − coarse| (the refinement delta reported downstream).
struct RefinedSpectrum {
  SpectrumResult coarse;
  SpectrumResult fine;
  Eigen::VectorXd delta;
};
RefinedSpectrum refinedFemSpectrum(const RadialShape& shape, int depth, OperatorKind kind, int k,
                                   const EigenOptions& opts = {});
RefinedSpectrum refinedZonalSpectrum(const RadialShape& shape, int resolution, OperatorKind kind,
                                     int k, const EigenOptions& opts = {});

// λ₁ against the Willmore bound: λ₁ ≤ −𝒲 ≤ −n with per-term tolerances.
struct BoundReport {
  int n = 0;
  double lambda1 = 0.0;
  double willmore = 0.0;
  double slack = 0.0;  // λ₁ + 𝒲, expected ≤ 0
  double solverTol = 0.0;
  double quadTol = 0.0;
  bool leftHolds = false;   // λ₁ ≤ −𝒲 + solverTol
  bool rightHolds = false;  // 𝒲 ≥ n − quadTol
};
BoundReport eigenvalueBoundReport(const RadialShape& shape, const QuadratureGrid& grid,
                                  bool zonalSolver, int discretization, double solverTol = 2e-2,
                                  double quadTol = 1e-8);

// λ₂ of 𝓛 with a refinement error bar: ≈ 0 (multiplicity 3) on the round
// sphere, strictly negative otherwise.
struct HarrellLossReport {
  Eigen::VectorXd eigenvalues;      // λ₁..λ₄ from the finer mesh
  Eigen::VectorXd refinementDelta;  // per-index |fine − coarse|
  double lambda2 = 0.0;
  double errorBar = 0.0;            // refinementDelta for λ₂
  bool strictlyNegative = false;    // λ₂ < −2·errorBar
};
HarrellLossReport harrellLossCheck(const RadialShape& shape, int depth);

}  // namespace spherevar
