#pragma once

#include <map>
#include <mutex>
#include <optional>

#include "spherevar/geometry.hpp"

namespace spherevar {

struct PhiSolve {
  double phi = 0.0;
  double residual = 0.0;  // relative volume defect at the solution
  int iterations = 0;
};

// Volume-preserving radial variation X(t,·) = (1 + t f + φ(t)) Φ of the unit
// sphere. φ(t) is spatially constant and solved from vol(M_t) = vol(S^n); the
// surface measure uses the full induced metric, including the tangential
// gradient of t f.
class RadialVariation {
 public:
  RadialVariation(GridPtr grid, FuncPtr f);

  int dim() const { return grid_->dim(); }
  const QuadratureGrid& grid() const { return *grid_; }
  const GridPtr& gridPtr() const { return grid_; }
  const FuncPtr& direction() const { return f_; }
  const ScalarField& directionField() const { return fField_; }

  double fMax() const { return fMax_; }
  // Admissible parameter bound, default 0.1 / max(1, max|f|).
  double tMax() const { return tMax_; }

  // φ'(0) = -(1/vol) ∫ f. (The companion diagnostic value with an extra 1/n
  // is reported by the diagnostics call, not used anywhere.)
  double phiPrime0() const { return phiPrime0_; }
  // φ''(0) = -(1/(n vol)) ∫ [|∇f|² + (n²-n)(f+φ'(0))²].
  double phiSecond0() const { return phiSecond0_; }

  // Newton solve of vol(t, s) = vol(S^n); cached per t.
  PhiSolve solvePhi(double t) const;
  double phi(double t) const { return solvePhi(t).phi; }
  // (φ(t), φ'(t), φ''(t)) by implicit differentiation of the constraint.
  Jet2d phiJet(double t) const;

  // n-volume of M_t (diagnostic; equals vol(S^n) after the solve).
  double volumeAt(double t) const;
  // Volume of the unconstrained two-parameter family, with (t,s) jets.
  Jet2<Jet2d> volumeJetTS(double t, double s) const;

  // Pointwise geometry with live t-derivatives.
  GeometryJet embeddingJet(const Chart& chart, const Eigen::VectorXd& angles, double t) const;
  RadialJets radialJets(const Chart& chart, const Eigen::VectorXd& angles, double t) const;

  // View of the surface at fixed t as a static shape.
  ShapePtr slice(double t) const;

 private:
  GridPtr grid_;
  FuncPtr f_;
  ScalarField fField_;
  Eigen::VectorXd gradSq_;  // |∇_S f|² at the grid nodes
  double fMax_ = 0.0;
  double tMax_ = 0.0;
  double phiPrime0_ = 0.0;
  double phiSecond0_ = 0.0;
  mutable std::mutex mutex_;
  mutable std::map<double, PhiSolve> cache_;
  mutable std::map<double, Jet2d> jetCache_;  // phiJet is O(grid); sweeps reuse it per t
};

using VariationPtr = std::shared_ptr<const RadialVariation>;

// Diagnostics for the volume constraint, including the printed-constant
// discrepancy flag for φ'(0).
struct PhiDiagnostics {
  double integralF = 0.0;
  double phiPrime0 = 0.0;          // -(1/vol) ∫ f, the value consistent with ∫(f+φ'(0)) = 0
  double printedPhiPrime0 = 0.0;   // -(1/(n vol)) ∫ f, the constant as printed in the source text
  bool factorNDiscrepancy = false; // true when the two differ beyond rounding
  double phiSecond0 = 0.0;
  double fdPhiPrime0 = 0.0;        // finite differences of the solved φ(t)
  double fdPhiSecond0 = 0.0;
  double meanShiftedF = 0.0;       // ∫ (f + φ'(0)), should vanish
};
PhiDiagnostics phiDiagnostics(const RadialVariation& var);

// One closed-form-vs-jet comparison. Components are flattened row-major for
// matrix quantities.
struct DerivativeCheck {
  std::string quantity;
  int order = 1;
  std::vector<double> closedForm;
  std::vector<double> jet;
  double absError = 0.0;
  double relError = 0.0;  // absError / max(‖closed‖, ‖jet‖, 1)
};

// First t-derivatives at t = 0 of {g_ij, g^ij, √g, N, h_ij, H, H²}: closed
// forms against the geometry-kernel jets at a chart point.
std::vector<DerivativeCheck> firstDerivativeChecks(const RadialVariation& var, const Chart& chart,
                                                   const Eigen::VectorXd& angles);
// Second t-derivatives at t = 0 of the same quantities.
std::vector<DerivativeCheck> secondDerivativeChecks(const RadialVariation& var, const Chart& chart,
                                                    const Eigen::VectorXd& angles);

// Degree-1 coefficient vector b of f (f ≈ ⟨·, b⟩ plus higher modes): the
// direction of the induced translation family.
Eigen::VectorXd degreeOneVector(const RadialVariation& var);

// Exact translated-sphere family through t ↦ unit sphere centered at t·b.
// Requires |t·b| < 1.
ShapePtr translationFamilySlice(const Eigen::VectorXd& b, double t);

}  // namespace spherevar
