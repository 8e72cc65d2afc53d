#include "spherevar/spectrum.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "spherevar/willmore.hpp"

namespace spherevar {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

IcosphereTemplate buildIcosphere(int depth) {
  if (depth < 0) throw std::invalid_argument("buildIcosphere: depth must be non-negative");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
      {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<Eigen::Vector3i> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  // Enforce outward orientation on the base solid; subdivision preserves it.
  for (auto& f : faces) {
    Eigen::Vector3d a = verts[f(0)], b = verts[f(1)], c = verts[f(2)];
    if ((b - a).cross(c - a).dot(a + b + c) < 0.0) std::swap(f(1), f(2));
  }

  for (int level = 0; level < depth; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::Vector3d m = (verts[a] + verts[b]).normalized();
      verts.push_back(m);
      int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = mid(f(0), f(1)), bc = mid(f(1), f(2)), ca = mid(f(2), f(0));
      next.push_back({f(0), ab, ca});
      next.push_back({f(1), bc, ab});
      next.push_back({f(2), ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  IcosphereTemplate out;
  out.directions.resize(static_cast<int>(verts.size()), 3);
  for (int i = 0; i < out.directions.rows(); ++i) out.directions.row(i) = verts[i].transpose();
  out.faces.resize(static_cast<int>(faces.size()), 3);
  for (int i = 0; i < out.faces.rows(); ++i) out.faces.row(i) = faces[i].transpose();
  return out;
}

namespace {

void verifyClosedOriented(const Eigen::MatrixXi& faces, int vertexCount) {
  std::map<std::pair<int, int>, int> undirected;
  std::map<std::pair<int, int>, int> directed;
  for (int f = 0; f < faces.rows(); ++f) {
    for (int e = 0; e < 3; ++e) {
      int a = faces(f, e), b = faces(f, (e + 1) % 3);
      if (a < 0 || b < 0 || a >= vertexCount || b >= vertexCount || a == b)
        throw std::runtime_error("buildMesh: malformed face");
      ++undirected[std::minmax(a, b)];
      ++directed[{a, b}];
    }
  }
  for (const auto& [edge, count] : undirected)
    if (count != 2) throw std::runtime_error("buildMesh: mesh is not a closed manifold");
  for (const auto& [edge, count] : directed)
    if (count != 1) throw std::runtime_error("buildMesh: inconsistent face orientation");
}

}  // namespace

TriMesh buildMesh(const RadialShape& shape, int depth) {
  if (shape.dim() != 2)
    throw std::invalid_argument("buildMesh: the finite-element path requires n = 2");
  if (depth < 3) throw std::invalid_argument("buildMesh: depth must be at least 3");
  IcosphereTemplate ico = buildIcosphere(depth);
  const int V = static_cast<int>(ico.directions.rows());

  TriMesh mesh;
  mesh.depth = depth;
  mesh.faces = ico.faces;
  mesh.vertices.resize(V, 3);
  mesh.meanCurvature.resize(V);
  mesh.potentialJacobi.resize(V);
  mesh.potentialII.resize(V);
  for (int i = 0; i < V; ++i) {
    Eigen::VectorXd dir = ico.directions.row(i).transpose();
    double rho = shape.radius(dir);
    if (!(rho > 0.0)) {
      std::ostringstream msg;
      msg << "buildMesh: non-positive radius " << rho << " at vertex " << i;
      throw std::runtime_error(msg.str());
    }
    mesh.vertices.row(i) = rho * dir.transpose();
    GeometryJet jet = shape.geometryAtPoint(dir);
    double bigH = valueOf(jet.bigH);
    mesh.meanCurvature(i) = bigH;
    mesh.potentialJacobi(i) = -bigH * bigH / 2.0;
    mesh.potentialII(i) = -valueOf(jet.II2);
  }
  verifyClosedOriented(mesh.faces, V);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(mesh.faces.rows()) * 12);
  mesh.mass = Eigen::VectorXd::Zero(V);
  for (int f = 0; f < mesh.faces.rows(); ++f) {
    int idx[3] = {mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    Eigen::Vector3d p[3];
    for (int c = 0; c < 3; ++c) p[c] = mesh.vertices.row(idx[c]).transpose();
    double area2 = (p[1] - p[0]).cross(p[2] - p[0]).norm();
    if (area2 <= 1e-300) throw std::runtime_error("buildMesh: degenerate triangle");
    double area = 0.5 * area2;
    for (int c = 0; c < 3; ++c) {
      mesh.mass(idx[c]) += area / 3.0;
      // Edge opposite corner c gets weight cot(angle at c)/2.
      int i = idx[(c + 1) % 3], j = idx[(c + 2) % 3];
      Eigen::Vector3d e1 = p[(c + 1) % 3] - p[c], e2 = p[(c + 2) % 3] - p[c];
      double w = 0.5 * e1.dot(e2) / e1.cross(e2).norm();
      triplets.emplace_back(i, i, w);
      triplets.emplace_back(j, j, w);
      triplets.emplace_back(i, j, -w);
      triplets.emplace_back(j, i, -w);
    }
  }
  mesh.stiffness.resize(V, V);
  mesh.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  return mesh;
}

TriMesh buildMesh(const RadialVariation& var, double t, int depth) {
  return buildMesh(*var.slice(t), depth);
}

double discreteMeanCurvatureGap(const TriMesh& mesh) {
  Eigen::MatrixXd SX = mesh.stiffness * mesh.vertices;
  std::vector<double> gaps;
  gaps.reserve(mesh.vertices.rows());
  for (int i = 0; i < mesh.vertices.rows(); ++i) {
    double discrete = SX.row(i).norm() / mesh.mass(i);
    gaps.push_back(std::abs(discrete - std::abs(mesh.meanCurvature(i))) /
                   std::abs(mesh.meanCurvature(i)));
  }
  size_t mid = gaps.size() / 2;
  std::nth_element(gaps.begin(), gaps.begin() + mid, gaps.end());
  return gaps[mid];
}

Pencil assembleOperator(const TriMesh& mesh, OperatorKind kind) {
  Pencil p;
  p.A = mesh.stiffness;
  p.mass = mesh.mass;
  if (kind != OperatorKind::LaplaceOnly) {
    const Eigen::VectorXd& V =
        kind == OperatorKind::Jacobi ? mesh.potentialJacobi : mesh.potentialII;
    for (int i = 0; i < p.mass.size(); ++i) p.A.coeffRef(i, i) += p.mass(i) * V(i);
  }
  return p;
}

ZonalProblem buildZonal(const RadialShape& shape, int resolution, OperatorKind kind) {
  if (!shape.zonal())
    throw std::invalid_argument("buildZonal: shape is not rotationally symmetric");
  if (resolution < 64) throw std::invalid_argument("buildZonal: resolution must be at least 64");
  const int n = shape.dim();
  Chart chart = Chart::standard(n);
  Eigen::VectorXd ref = chart.referenceCoords();
  auto geomAt = [&](double theta) {
    Eigen::VectorXd a = ref;
    a(0) = theta;
    return shape.geometryAt(chart, a);
  };

  const double h = kPi / resolution;
  ZonalProblem zp;
  zp.n = n;
  zp.resolution = resolution;
  zp.theta.resize(resolution);
  Eigen::VectorXd J(resolution), V(resolution);
  for (int i = 0; i < resolution; ++i) {
    zp.theta(i) = (i + 0.5) * h;
    GeometryJet jet = geomAt(zp.theta(i));
    J(i) = valueOf(jet.sqrtG);
    switch (kind) {
      case OperatorKind::Jacobi: V(i) = -valueOf(jet.bigH2()) / n; break;
      case OperatorKind::SchroedingerII: V(i) = -valueOf(jet.II2); break;
      case OperatorKind::LaplaceOnly: V(i) = 0.0; break;
    }
  }
  // Interior half-node flux coefficients J·a; the pole fluxes vanish with J.
  Eigen::VectorXd c(resolution - 1);
  for (int i = 0; i + 1 < resolution; ++i) {
    GeometryJet jet = geomAt((i + 1) * h);
    c(i) = valueOf(jet.sqrtG) * valueOf(jet.gInv(0, 0));
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(3 * resolution));
  for (int i = 0; i < resolution; ++i) {
    double diag = 0.0;
    if (i > 0) {
      diag += c(i - 1) / h;
      triplets.emplace_back(i, i - 1, -c(i - 1) / h);
    }
    if (i + 1 < resolution) {
      diag += c(i) / h;
      triplets.emplace_back(i, i + 1, -c(i) / h);
    }
    triplets.emplace_back(i, i, diag + J(i) * h * V(i));
  }
  zp.pencil.A.resize(resolution, resolution);
  zp.pencil.A.setFromTriplets(triplets.begin(), triplets.end());
  zp.pencil.mass = J * h;
  return zp;
}

namespace {

// Modified Gram-Schmidt in the M inner product, two passes; deterministic
// unit-vector fallback on rank deficiency.
void orthonormalizeM(Eigen::MatrixXd& W, const Eigen::VectorXd& m) {
  const int N = static_cast<int>(W.rows());
  for (int j = 0; j < W.cols(); ++j) {
    for (int retry = 0; retry < 3; ++retry) {
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i < j; ++i)
          W.col(j) -= W.col(i).dot(m.cwiseProduct(W.col(j))) * W.col(i);
      double nrm = std::sqrt(W.col(j).dot(m.cwiseProduct(W.col(j))));
      if (nrm > 1e-13) {
        W.col(j) /= nrm;
        break;
      }
      if (retry == 2) throw std::runtime_error("lowestEigenpairs: block lost rank");
      W.col(j).setZero();
      W.col(j)(static_cast<int>((static_cast<long long>(j + 1) * 2654435761LL) % N)) = 1.0;
    }
  }
}

}  // namespace

SpectrumResult lowestEigenpairs(const Pencil& pencil, int k, const EigenOptions& opts) {
  const int N = static_cast<int>(pencil.A.rows());
  if (k < 1 || k > N) throw std::invalid_argument("lowestEigenpairs: bad k");
  const Eigen::VectorXd& m = pencil.mass;
  if (m.minCoeff() <= 0.0) throw std::invalid_argument("lowestEigenpairs: mass must be positive");

  // Pencil-Gershgorin lower bound: every eigenvalue satisfies
  // λ ≥ min_i (A_ii − Σ_{j≠i}|A_ij|) / m_i, so A − σM is positive definite.
  Eigen::VectorXd offAbs = Eigen::VectorXd::Zero(N), diag = Eigen::VectorXd::Zero(N);
  for (int outer = 0; outer < pencil.A.outerSize(); ++outer)
    for (Eigen::SparseMatrix<double>::InnerIterator it(pencil.A, outer); it; ++it) {
      if (it.row() == it.col())
        diag(it.row()) = it.value();
      else
        offAbs(it.row()) += std::abs(it.value());
    }
  double sigma = ((diag - offAbs).cwiseQuotient(m)).minCoeff() - 0.5;

  Eigen::SparseMatrix<double> K = pencil.A;
  for (int i = 0; i < N; ++i) K.coeffRef(i, i) -= sigma * m(i);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(K);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("lowestEigenpairs: factorization of the shifted pencil failed");

  const int p = std::min(N, k + opts.guardVectors);
  Eigen::MatrixXd V(N, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < N; ++i) V(i, j) = std::cos(j * kPi * (i + 0.5) / N);
  orthonormalizeM(V, m);

  SpectrumResult result;
  Eigen::VectorXd theta;
  for (int iter = 1; iter <= opts.maxIterations; ++iter) {
    Eigen::MatrixXd W = solver.solve(m.asDiagonal() * V);
    orthonormalizeM(W, m);
    Eigen::MatrixXd T = W.transpose() * (pencil.A * W);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()));
    V = W * es.eigenvectors();
    theta = es.eigenvalues();

    result.iterations = iter;
    result.residuals.resize(k);
    bool done = true;
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXd Mv = m.cwiseProduct(V.col(j));
      result.residuals(j) = (pencil.A * V.col(j) - theta(j) * Mv).norm() / Mv.norm();
      if (result.residuals(j) > opts.tolerance) done = false;
    }
    if (done) break;
    if (iter == opts.maxIterations)
      throw std::runtime_error("lowestEigenpairs: no convergence after " +
                               std::to_string(opts.maxIterations) + " iterations");
  }

  result.eigenvalues = theta.head(k);
  result.eigenvectors = V.leftCols(k);
  for (int j = 0; j < k; ++j) {
    int maxIdx = 0;
    V.col(j).cwiseAbs().maxCoeff(&maxIdx);
    if (result.eigenvectors(maxIdx, j) < 0.0) result.eigenvectors.col(j) *= -1.0;
  }
  return result;
}

SpectrumResult femSpectrum(const RadialShape& shape, int depth, OperatorKind kind, int k,
                           const EigenOptions& opts) {
  TriMesh mesh = buildMesh(shape, depth);
  SpectrumResult r = lowestEigenpairs(assembleOperator(mesh, kind), k, opts);
  r.discretization = depth;
  return r;
}

SpectrumResult femSpectrum(const RadialVariation& var, double t, int depth, OperatorKind kind,
                           int k, const EigenOptions& opts) {
  return femSpectrum(*var.slice(t), depth, kind, k, opts);
}

SpectrumResult zonalSturmLiouville(const RadialShape& shape, int resolution, OperatorKind kind,
                                   int k, const EigenOptions& opts) {
  ZonalProblem zp = buildZonal(shape, resolution, kind);
  SpectrumResult r = lowestEigenpairs(zp.pencil, k, opts);
  r.discretization = resolution;
  return r;
}

SpectrumResult zonalSturmLiouville(const RadialVariation& var, double t, int resolution,
                                   OperatorKind kind, int k, const EigenOptions& opts) {
  return zonalSturmLiouville(*var.slice(t), resolution, kind, k, opts);
}

RefinedSpectrum refinedFemSpectrum(const RadialShape& shape, int depth, OperatorKind kind, int k,
                                   const EigenOptions& opts) {
  RefinedSpectrum rs;
  rs.coarse = femSpectrum(shape, depth, kind, k, opts);
  rs.fine = femSpectrum(shape, depth + 1, kind, k, opts);
  rs.delta = (rs.fine.eigenvalues - rs.coarse.eigenvalues).cwiseAbs();
  return rs;
}

RefinedSpectrum refinedZonalSpectrum(const RadialShape& shape, int resolution, OperatorKind kind,
                                     int k, const EigenOptions& opts) {
  RefinedSpectrum rs;
  rs.coarse = zonalSturmLiouville(shape, resolution, kind, k, opts);
  rs.fine = zonalSturmLiouville(shape, 2 * resolution, kind, k, opts);
  rs.delta = (rs.fine.eigenvalues - rs.coarse.eigenvalues).cwiseAbs();
  return rs;
}

BoundReport eigenvalueBoundReport(const RadialShape& shape, const QuadratureGrid& grid,
                                  bool zonalSolver, int discretization, double solverTol,
                                  double quadTol) {
  BoundReport r;
  r.n = shape.dim();
  SpectrumResult s = zonalSolver
                         ? zonalSturmLiouville(shape, discretization, OperatorKind::Jacobi, 1)
                         : femSpectrum(shape, discretization, OperatorKind::Jacobi, 1);
  r.lambda1 = s.eigenvalues(0);
  r.willmore = willmoreOfShape(shape, grid);
  r.slack = r.lambda1 + r.willmore;
  r.solverTol = solverTol;
  r.quadTol = quadTol;
  r.leftHolds = r.lambda1 <= -r.willmore + solverTol;
  r.rightHolds = r.willmore >= r.n - quadTol;
  return r;
}

HarrellLossReport harrellLossCheck(const RadialShape& shape, int depth) {
  if (shape.dim() != 2)
    throw std::invalid_argument("harrellLossCheck: defined for surfaces in R^3 only");
  RefinedSpectrum rs = refinedFemSpectrum(shape, depth, OperatorKind::Jacobi, 4);
  HarrellLossReport rep;
  rep.eigenvalues = rs.fine.eigenvalues;
  rep.refinementDelta = rs.delta;
  rep.lambda2 = rs.fine.eigenvalues(1);
  rep.errorBar = rs.delta(1);
  rep.strictlyNegative = rep.lambda2 < -2.0 * rep.errorBar;
  return rep;
}

}  // namespace spherevar
