#include "spherevar/variation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spherevar {

namespace {

using JetTS = Jet2<Jet2d>;  // outer parameter t, inner parameter s

JetTS powJet(JetTS base, int e) {
  JetTS acc = JetTS(Jet2d(1.0));
  for (int i = 0; i < e; ++i) acc *= base;
  return acc;
}

}  // namespace

RadialVariation::RadialVariation(GridPtr grid, FuncPtr f) : grid_(std::move(grid)), f_(std::move(f)) {
  if (!grid_ || !f_) throw std::invalid_argument("RadialVariation: missing grid or direction");
  if (grid_->dim() != f_->dim()) throw std::invalid_argument("RadialVariation: dimension mismatch");
  const int n = grid_->dim();
  fField_ = sampleField(f_, grid_);
  gradSq_.resize(grid_->size());
  const Chart& chart = grid_->chart();
  for (int i = 0; i < grid_->size(); ++i) {
    Eigen::VectorXd ang = grid_->nodes().row(i).transpose();
    SphereMetric m = metricOf(chart.jets(ang));
    FieldJets fj = f_->chartJets(chart, ang);
    gradSq_(i) = fj.fi.dot(m.gInv * fj.fi);
  }
  fMax_ = fField_.values.cwiseAbs().maxCoeff();
  tMax_ = 0.1 / std::max(1.0, fMax_);

  const double vol = sphereVolume(n);
  double intF = grid_->integrate(fField_.values);
  phiPrime0_ = -intF / vol;
  Eigen::VectorXd shifted = fField_.values.array() + phiPrime0_;
  Eigen::VectorXd secondIntegrand =
      gradSq_ + static_cast<double>(n * n - n) * shifted.cwiseProduct(shifted);
  phiSecond0_ = -grid_->integrate(secondIntegrand) / (n * vol);
}

Jet2<Jet2d> RadialVariation::volumeJetTS(double t, double s) const {
  const int n = grid_->dim();
  // Outer jet differentiates in t, inner in s.
  JetTS tj(Jet2d(t), Jet2d(1.0), Jet2d(0.0));
  JetTS sj(Jet2d::variable(s), Jet2d(0.0), Jet2d(0.0));
  JetTS acc = JetTS(Jet2d(0.0));
  for (int i = 0; i < grid_->size(); ++i) {
    JetTS rho = tj * fField_.values(i) + sj + Jet2d(1.0);
    JetTS area = powJet(rho, n - 1) * sqrt(rho * rho + tj * tj * gradSq_(i));
    acc += area * Jet2d(grid_->weights()(i));
  }
  return acc;
}

PhiSolve RadialVariation::solvePhi(double t) const {
  if (std::abs(t) > tMax_ * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "solvePhi: t = " << t << " outside the admissible band |t| <= " << tMax_;
    throw std::invalid_argument(msg.str());
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
  }
  const double target = sphereVolume(grid_->dim());
  PhiSolve sol;
  double s = phiPrime0_ * t;
  int iter = 0;
  double rel = std::numeric_limits<double>::infinity();
  for (; iter < 50; ++iter) {
    if (std::abs(t) * fMax_ + std::abs(s) >= 0.5)
      throw std::runtime_error("solvePhi: iterate left the admissible band |t|max|f| + |s| < 0.5");
    JetTS v = volumeJetTS(t, s);
    double vol = v.v.v;
    double slope = v.v.d1;  // ∂vol/∂s, analytic
    rel = std::abs(vol - target) / target;
    if (rel <= 1e-12) break;
    s -= (vol - target) / slope;
  }
  if (rel > 1e-12)
    throw std::runtime_error("solvePhi: Newton did not reach the volume tolerance in 50 iterations");
  sol.phi = s;
  sol.residual = rel;
  sol.iterations = iter;
  std::lock_guard<std::mutex> lock(mutex_);
  cache_[t] = sol;
  return sol;
}

Jet2d RadialVariation::phiJet(double t) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = jetCache_.find(t);
    if (it != jetCache_.end()) return it->second;
  }
  double s = solvePhi(t).phi;
  JetTS v = volumeJetTS(t, s);
  double vt = v.d1.v, vs = v.v.d1, vtt = v.d2.v, vts = v.d1.d1, vss = v.v.d2;
  double p1 = -vt / vs;
  double p2 = -(vtt + 2.0 * vts * p1 + vss * p1 * p1) / vs;
  Jet2d jet(s, p1, p2);
  std::lock_guard<std::mutex> lock(mutex_);
  jetCache_[t] = jet;
  return jet;
}

double RadialVariation::volumeAt(double t) const { return volumeJetTS(t, solvePhi(t).phi).v.v; }

RadialJets RadialVariation::radialJets(const Chart& chart, const Eigen::VectorXd& angles,
                                       double t) const {
  FieldJets fj = f_->chartJets(chart, angles);
  Jet2d tj = Jet2d::variable(t);
  Jet2d phi = phiJet(t);
  const int n = chart.dim();
  RadialJets jets;
  jets.rho = tj * fj.f + phi + 1.0;
  jets.rhoI.resize(n);
  jets.rhoIJ = SmallMat<Jet2d>(n);
  for (int i = 0; i < n; ++i) {
    jets.rhoI[i] = tj * fj.fi(i);
    for (int j = 0; j < n; ++j) jets.rhoIJ(i, j) = tj * fj.fij(i, j);
  }
  return jets;
}

GeometryJet RadialVariation::embeddingJet(const Chart& chart, const Eigen::VectorXd& angles,
                                          double t) const {
  return geometryFromRadial(chart.jets(angles), radialJets(chart, angles, t), t);
}

namespace {

// Frozen-t view of a variation; self-contained so it can outlive the parent.
class VariationSlice : public RadialShape {
 public:
  VariationSlice(FuncPtr f, double t, double phi) : f_(std::move(f)), t_(t), phi_(phi) {}
  int dim() const override { return f_->dim(); }
  bool zonal() const override { return f_->zonal(); }
  RadialJets radialJets(const Chart& chart, const Eigen::VectorXd& angles) const override {
    FieldJets fj = f_->chartJets(chart, angles);
    const int n = chart.dim();
    RadialJets jets;
    jets.rho = Jet2d(1.0 + t_ * fj.f + phi_);
    jets.rhoI.resize(n);
    jets.rhoIJ = SmallMat<Jet2d>(n);
    for (int i = 0; i < n; ++i) {
      jets.rhoI[i] = Jet2d(t_ * fj.fi(i));
      for (int j = 0; j < n; ++j) jets.rhoIJ(i, j) = Jet2d(t_ * fj.fij(i, j));
    }
    return jets;
  }

 private:
  FuncPtr f_;
  double t_;
  double phi_;
};

}  // namespace

ShapePtr RadialVariation::slice(double t) const {
  return std::make_shared<VariationSlice>(f_, t, solvePhi(t).phi);
}

PhiDiagnostics phiDiagnostics(const RadialVariation& var) {
  PhiDiagnostics d;
  const int n = var.dim();
  const double vol = sphereVolume(n);
  d.integralF = var.grid().integrate(var.directionField().values);
  d.phiPrime0 = var.phiPrime0();
  d.printedPhiPrime0 = d.integralF == 0.0 ? 0.0 : -d.integralF / (n * vol);
  d.factorNDiscrepancy = std::abs(d.phiPrime0 - d.printedPhiPrime0) >
                         1e-12 * std::max(1.0, std::abs(d.phiPrime0));
  d.phiSecond0 = var.phiSecond0();
  Eigen::VectorXd shifted = var.directionField().values.array() + var.phiPrime0();
  d.meanShiftedF = var.grid().integrate(shifted);
  const double h = var.tMax() / 4.0;
  auto phi = [&](double t) { return var.solvePhi(t).phi; };
  d.fdPhiPrime0 =
      (-phi(2 * h) + 8 * phi(h) - 8 * phi(-h) + phi(-2 * h)) / (12 * h);
  d.fdPhiSecond0 =
      (-phi(2 * h) + 16 * phi(h) - 30 * phi(0.0) + 16 * phi(-h) - phi(-2 * h)) / (12 * h * h);
  return d;
}

namespace {

struct ClosedFormContext {
  int n;
  Eigen::MatrixXd gbar, gbarInv;
  double sqrtGbar;
  double f, c, phi2;                 // c = f + φ'(0)
  Eigen::VectorXd fi;
  Eigen::MatrixXd hess;              // intrinsic Hessian (∇²f)_ij
  double lap;                        // Δ_S f
  double gradSq;                     // |∇f|²
  Eigen::VectorXd gradAmbient;       // ∇f as a vector in R^{n+1}
};

ClosedFormContext closedFormContext(const RadialVariation& var, const Chart& chart,
                                    const Eigen::VectorXd& angles) {
  ClosedFormContext ctx;
  ctx.n = var.dim();
  ChartJets cj = chart.jets(angles);
  SphereMetric m = metricOf(cj);
  FieldJets fj = var.direction()->chartJets(chart, angles);
  ctx.gbar = m.g;
  ctx.gbarInv = m.gInv;
  ctx.sqrtGbar = m.sqrtG;
  ctx.f = fj.f;
  ctx.c = fj.f + var.phiPrime0();
  ctx.phi2 = var.phiSecond0();
  ctx.fi = fj.fi;
  ctx.hess = fj.fij;
  for (int k = 0; k < ctx.n; ++k) ctx.hess -= fj.fi(k) * m.christoffel[k];
  ctx.lap = (m.gInv.array() * ctx.hess.array()).sum();
  ctx.gradSq = fj.fi.dot(m.gInv * fj.fi);
  Eigen::VectorXd raised = m.gInv * fj.fi;
  ctx.gradAmbient = cj.dp * raised;
  return ctx;
}

std::vector<double> flatten(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

DerivativeCheck makeCheck(std::string name, int order, std::vector<double> closed,
                          std::vector<double> jet) {
  DerivativeCheck chk;
  chk.quantity = std::move(name);
  chk.order = order;
  chk.closedForm = std::move(closed);
  chk.jet = std::move(jet);
  double na = 0.0, nb = 0.0, diff = 0.0;
  for (size_t i = 0; i < chk.closedForm.size(); ++i) {
    na += chk.closedForm[i] * chk.closedForm[i];
    nb += chk.jet[i] * chk.jet[i];
    double d = chk.closedForm[i] - chk.jet[i];
    diff += d * d;
  }
  chk.absError = std::sqrt(diff);
  chk.relError = chk.absError / std::max({std::sqrt(na), std::sqrt(nb), 1.0});
  return chk;
}

template <class Extract>
std::vector<double> extractMat(const SmallMat<Jet2d>& m, Extract ex) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(m.n) * m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) out.push_back(ex(m(i, j)));
  return out;
}

}  // namespace

std::vector<DerivativeCheck> firstDerivativeChecks(const RadialVariation& var, const Chart& chart,
                                                   const Eigen::VectorXd& angles) {
  ClosedFormContext ctx = closedFormContext(var, chart, angles);
  GeometryJet jet = var.embeddingJet(chart, angles, 0.0);
  auto d1 = [](const Jet2d& j) { return j.d1; };
  const int n = ctx.n;

  std::vector<DerivativeCheck> checks;
  checks.push_back(makeCheck("g_ij", 1, flatten(2.0 * ctx.c * ctx.gbar), extractMat(jet.g, d1)));
  checks.push_back(
      makeCheck("g_inv", 1, flatten(-2.0 * ctx.c * ctx.gbarInv), extractMat(jet.gInv, d1)));
  checks.push_back(makeCheck("sqrt_g", 1, {n * ctx.c * ctx.sqrtGbar}, {jet.sqrtG.d1}));
  {
    std::vector<double> closed(n + 1), fromJet(n + 1);
    for (int k = 0; k <= n; ++k) {
      closed[k] = -ctx.gradAmbient(k);
      fromJet[k] = jet.normal[k].d1;
    }
    checks.push_back(makeCheck("normal", 1, closed, fromJet));
  }
  checks.push_back(
      makeCheck("h_ij", 1, flatten(ctx.c * ctx.gbar - ctx.hess), extractMat(jet.h, d1)));
  checks.push_back(makeCheck("H", 1, {-ctx.c - ctx.lap / n}, {jet.H.d1}));
  checks.push_back(makeCheck("H_sq", 1, {-2.0 * ctx.c - 2.0 * ctx.lap / n}, {jet.H2().d1}));
  return checks;
}

std::vector<DerivativeCheck> secondDerivativeChecks(const RadialVariation& var, const Chart& chart,
                                                    const Eigen::VectorXd& angles) {
  ClosedFormContext ctx = closedFormContext(var, chart, angles);
  GeometryJet jet = var.embeddingJet(chart, angles, 0.0);
  auto d2 = [](const Jet2d& j) { return j.d2; };
  const int n = ctx.n;
  const double c = ctx.c, phi2 = ctx.phi2, G = ctx.gradSq, lap = ctx.lap;

  std::vector<DerivativeCheck> checks;
  checks.push_back(makeCheck(
      "g_ij", 2,
      flatten(2.0 * ctx.fi * ctx.fi.transpose() + (2.0 * c * c + 2.0 * phi2) * ctx.gbar),
      extractMat(jet.g, d2)));
  {
    Eigen::VectorXd raised = ctx.gbarInv * ctx.fi;
    Eigen::MatrixXd closed =
        -2.0 * raised * raised.transpose() + (6.0 * c * c - 2.0 * phi2) * ctx.gbarInv;
    checks.push_back(makeCheck("g_inv", 2, flatten(closed), extractMat(jet.gInv, d2)));
  }
  checks.push_back(makeCheck(
      "sqrt_g", 2, {(G + (n * n - n) * c * c + n * phi2) * ctx.sqrtGbar}, {jet.sqrtG.d2}));
  {
    ChartJets cj = chart.jets(angles);
    std::vector<double> closed(n + 1), fromJet(n + 1);
    for (int k = 0; k <= n; ++k) {
      closed[k] = 2.0 * c * ctx.gradAmbient(k) - G * cj.p(k);
      fromJet[k] = jet.normal[k].d2;
    }
    checks.push_back(makeCheck("normal", 2, closed, fromJet));
  }
  checks.push_back(makeCheck(
      "h_ij", 2,
      flatten(phi2 * ctx.gbar + 4.0 * ctx.fi * ctx.fi.transpose() - G * ctx.gbar),
      extractMat(jet.h, d2)));
  checks.push_back(makeCheck(
      "H", 2, {(2.0 - n) / n * G + 2.0 * c * c - phi2 + 4.0 / n * c * lap}, {jet.H.d2}));
  checks.push_back(makeCheck(
      "H_sq", 2,
      {6.0 * c * c + 12.0 / n * c * lap + 2.0 / (n * n) * lap * lap + (4.0 - 2.0 * n) / n * G -
       2.0 * phi2},
      {jet.H2().d2}));
  return checks;
}

Eigen::VectorXd degreeOneVector(const RadialVariation& var) {
  const QuadratureGrid& grid = var.grid();
  const int n = grid.dim();
  const double vol = sphereVolume(n);
  Eigen::VectorXd b(n + 1);
  for (int k = 0; k <= n; ++k) {
    Eigen::VectorXd coord = grid.unitPoints().col(k);
    b(k) = grid.integrate(coord.cwiseProduct(var.directionField().values)) * (n + 1) / vol;
  }
  return b;
}

ShapePtr translationFamilySlice(const Eigen::VectorXd& b, double t) {
  return std::make_shared<TranslatedSphereShape>((t * b).eval());
}

}  // namespace spherevar
