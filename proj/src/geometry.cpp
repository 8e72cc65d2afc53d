#include "spherevar/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spherevar {

namespace {

template <class T>
T dotJet(const std::vector<T>& a, const std::vector<T>& b) {
  T acc = a[0] * b[0];
  for (size_t k = 1; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

// Determinant of a jet matrix by elimination (pivot on value magnitude).
template <class T>
T detSmall(SmallMat<T> m) {
  const int n = m.n;
  T det = T(1.0);
  double sign = 1.0;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(valueOf(m(r, c))) > std::abs(valueOf(m(pivot, c)))) pivot = r;
    if (pivot != c) {
      for (int k = 0; k < n; ++k) std::swap(m(c, k), m(pivot, k));
      sign = -sign;
    }
    if (valueOf(m(c, c)) == 0.0) return T(0.0);
    det = det * m(c, c);
    for (int r = c + 1; r < n; ++r) {
      T factor = m(r, c) / m(c, c);
      for (int k = c; k < n; ++k) m(r, k) -= factor * m(c, k);
    }
  }
  return det * sign;
}

}  // namespace

template <class T>
SmallMat<T> invertSmall(const SmallMat<T>& m, T& det) {
  const int n = m.n;
  SmallMat<T> a = m;
  SmallMat<T> inv(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = T(i == j ? 1.0 : 0.0);
  det = T(1.0);
  double sign = 1.0;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(valueOf(a(r, c))) > std::abs(valueOf(a(pivot, c)))) pivot = r;
    if (std::abs(valueOf(a(pivot, c))) == 0.0)
      throw std::runtime_error("invertSmall: singular matrix");
    if (pivot != c) {
      for (int k = 0; k < n; ++k) {
        std::swap(a(c, k), a(pivot, k));
        std::swap(inv(c, k), inv(pivot, k));
      }
      sign = -sign;
    }
    det = det * a(c, c);
    T invPivot = T(1.0) / a(c, c);
    for (int k = 0; k < n; ++k) {
      a(c, k) *= invPivot;
      inv(c, k) *= invPivot;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      // Subtract even when the value part is zero: jets can carry derivative
      // parts on a vanishing value.
      T factor = a(r, c);
      for (int k = 0; k < n; ++k) {
        a(r, k) -= factor * a(c, k);
        inv(r, k) -= factor * inv(c, k);
      }
    }
  }
  det = det * sign;
  return inv;
}

template SmallMat<Jet2d> invertSmall<Jet2d>(const SmallMat<Jet2d>&, Jet2d&);

namespace {

// Cross product of n jet vectors in R^{n+1} via cofactor expansion:
// w_k = (-1)^{k+1} det(rows of [v_1 ... v_n] with row k removed).
template <class T>
std::vector<T> crossJet(const std::vector<std::vector<T>>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<T> w(n + 1);
  for (int k = 0; k <= n; ++k) {
    SmallMat<T> minor(n);
    int rr = 0;
    for (int r = 0; r <= n; ++r) {
      if (r == k) continue;
      for (int c = 0; c < n; ++c) minor(rr, c) = v[c][r];
      ++rr;
    }
    T d = detSmall(minor);
    w[k] = (k % 2 == 0) ? d : -d;
  }
  return w;
}

}  // namespace

Eigen::VectorXd generalizedCross(const std::vector<Eigen::VectorXd>& v) {
  if (v.empty()) throw std::invalid_argument("generalizedCross: need at least one vector");
  const int n = static_cast<int>(v.size());
  std::vector<std::vector<double>> cols(n);
  for (int c = 0; c < n; ++c) {
    if (v[c].size() != n + 1)
      throw std::invalid_argument("generalizedCross: vectors must live in R^{n+1}");
    cols[c].assign(v[c].data(), v[c].data() + n + 1);
  }
  std::vector<double> w = crossJet(cols);
  return Eigen::Map<Eigen::VectorXd>(w.data(), n + 1);
}

Eigen::VectorXd unitNormal(const std::vector<Eigen::VectorXd>& tangents,
                           const Eigen::VectorXd& position) {
  Eigen::VectorXd w = generalizedCross(tangents);
  double nrm = w.norm();
  if (nrm <= 0.0 || !std::isfinite(nrm))
    throw std::runtime_error("unitNormal: degenerate tangent frame");
  w /= nrm;
  if (w.dot(position) < 0.0) w = -w;
  return w;
}

GeometryJet geometryFromRadial(const ChartJets& chart, const RadialJets& radial, double contextT) {
  const int n = static_cast<int>(chart.dp.cols());
  GeometryJet out;
  out.n = n;

  // Embedding jets of X = ρ Φ.
  std::vector<Jet2d> X(n + 1);
  std::vector<std::vector<Jet2d>> Xi(n, std::vector<Jet2d>(n + 1));
  std::vector<std::vector<std::vector<Jet2d>>> Xij(
      n, std::vector<std::vector<Jet2d>>(n, std::vector<Jet2d>(n + 1)));
  for (int k = 0; k <= n; ++k) {
    X[k] = radial.rho * chart.p(k);
    for (int i = 0; i < n; ++i) Xi[i][k] = radial.rhoI[i] * chart.p(k) + radial.rho * chart.dp(k, i);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        Xij[i][j][k] = radial.rhoIJ(i, j) * chart.p(k) + radial.rhoI[i] * chart.dp(k, j) +
                       radial.rhoI[j] * chart.dp(k, i) + radial.rho * chart.d2p[i][j](k);
  }
  out.position = X;

  out.g = SmallMat<Jet2d>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet2d gij = dotJet(Xi[i], Xi[j]);
      out.g(i, j) = gij;
      out.g(j, i) = gij;
    }

  Jet2d det;
  out.gInv = invertSmall(out.g, det);
  if (!(valueOf(det) > 0.0)) {
    std::ostringstream msg;
    msg << "geometryFromRadial: degenerate metric (det g = " << valueOf(det) << ") at chart point (";
    for (int k = 0; k <= n; ++k) msg << (k ? ", " : "") << valueOf(X[k]) / std::max(1e-300, valueOf(radial.rho));
    msg << ")";
    if (std::isfinite(contextT)) msg << " at t = " << contextT;
    throw std::runtime_error(msg.str());
  }
  out.sqrtG = sqrt(det);

  std::vector<Jet2d> w = crossJet(Xi);
  Jet2d wn2 = dotJet(w, w);
  Jet2d wn = sqrt(wn2);
  double orientation = 0.0;
  for (int k = 0; k <= n; ++k) orientation += valueOf(w[k]) * valueOf(X[k]);
  double sign = orientation >= 0.0 ? 1.0 : -1.0;
  out.normal.resize(n + 1);
  for (int k = 0; k <= n; ++k) out.normal[k] = w[k] / wn * sign;

  out.h = SmallMat<Jet2d>(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet2d hij = -dotJet(Xij[i][j], out.normal);
      out.h(i, j) = hij;
      out.h(j, i) = hij;
    }

  // Shape operator S = g^{-1} h; trace and |II|² = tr(S²).
  SmallMat<Jet2d> S(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet2d acc = out.gInv(i, 0) * out.h(0, j);
      for (int k = 1; k < n; ++k) acc += out.gInv(i, k) * out.h(k, j);
      S(i, j) = acc;
    }
  Jet2d trace = S(0, 0);
  for (int i = 1; i < n; ++i) trace += S(i, i);
  out.bigH = trace;
  out.H = trace / static_cast<double>(n);
  Jet2d ii2 = S(0, 0) * S(0, 0);
  {
    Jet2d acc(0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += S(i, j) * S(j, i);
    ii2 = acc;
  }
  out.II2 = ii2;

  // Round-sphere chart density for area-ratio bookkeeping.
  Eigen::MatrixXd gbar = chart.dp.transpose() * chart.dp;
  out.sqrtGbar = std::sqrt(gbar.determinant());
  return out;
}

double secondFundamentalNormSq(const GeometryJet& jet) { return valueOf(jet.II2); }

GeometryJet RadialShape::geometryAt(const Chart& chart, const Eigen::VectorXd& angles) const {
  return geometryFromRadial(chart.jets(angles), radialJets(chart, angles));
}

GeometryJet RadialShape::geometryAtPoint(const Eigen::VectorXd& unitPoint) const {
  Chart chart = Chart::centeredAt(unitPoint);
  return geometryAt(chart, chart.referenceCoords());
}

double RadialShape::radius(const Eigen::VectorXd& unitPoint) const {
  Chart chart = Chart::centeredAt(unitPoint);
  return valueOf(radialJets(chart, chart.referenceCoords()).rho);
}

namespace {

RadialJets constantRadialJets(int n, double rho) {
  RadialJets r;
  r.rho = Jet2d(rho);
  r.rhoI.assign(n, Jet2d(0.0));
  r.rhoIJ = SmallMat<Jet2d>(n);
  return r;
}

// Radial jets of a static shape whose radius is a smooth function of the unit
// direction, differentiated through the chart with DualN.
RadialJets radialJetsFromAD(const Chart& chart, const Eigen::VectorXd& angles,
                            const std::function<DualN(const std::vector<DualN>&)>& rhoOfPoint) {
  const int n = chart.dim();
  std::vector<DualN> ang(n);
  for (int i = 0; i < n; ++i) ang[i] = DualN::variable(n, i, angles(i));
  std::vector<DualN> emb(n + 1);
  DualN prod = DualN(n, 1.0);
  for (int j = 0; j + 1 < n; ++j) {
    emb[n - j] = prod * cos(ang[j]);
    prod = prod * sin(ang[j]);
  }
  emb[1] = prod * sin(ang[n - 1]);
  emb[0] = prod * cos(ang[n - 1]);
  const Eigen::MatrixXd& R = chart.rotation();
  std::vector<DualN> rotated(n + 1);
  for (int r = 0; r < n + 1; ++r) {
    DualN acc(n, 0.0);
    for (int c = 0; c < n + 1; ++c)
      if (R(r, c) != 0.0) acc = acc + emb[c] * R(r, c);
    rotated[r] = acc;
  }
  DualN rho = rhoOfPoint(rotated);
  RadialJets jets;
  jets.rho = Jet2d(rho.v);
  jets.rhoI.resize(n);
  jets.rhoIJ = SmallMat<Jet2d>(n);
  for (int i = 0; i < n; ++i) {
    jets.rhoI[i] = Jet2d(rho.g(i));
    for (int j = 0; j < n; ++j) jets.rhoIJ(i, j) = Jet2d(rho.h(i, j));
  }
  return jets;
}

}  // namespace

SphereShape::SphereShape(int n, double radius) : n_(n), r_(radius) {
  if (n < 2) throw std::invalid_argument("SphereShape: dimension must be >= 2");
  if (radius <= 0.0) throw std::invalid_argument("SphereShape: radius must be positive");
}

RadialJets SphereShape::radialJets(const Chart&, const Eigen::VectorXd&) const {
  return constantRadialJets(n_, r_);
}

EllipsoidShape::EllipsoidShape(Eigen::VectorXd semiAxes, double scale)
    : axes_(std::move(semiAxes)), scale_(scale) {
  if (axes_.size() < 3) throw std::invalid_argument("EllipsoidShape: need at least 3 semi-axes");
  if (axes_.minCoeff() <= 0.0 || scale <= 0.0)
    throw std::invalid_argument("EllipsoidShape: semi-axes and scale must be positive");
}

RadialJets EllipsoidShape::radialJets(const Chart& chart, const Eigen::VectorXd& angles) const {
  // ρ(u) = scale / sqrt(Σ u_k² / a_k²).
  Eigen::VectorXd invAxes2 = axes_.array().square().inverse();
  double scale = scale_;
  return radialJetsFromAD(chart, angles, [&](const std::vector<DualN>& p) {
    DualN q = p[0] * p[0] * invAxes2(0);
    for (size_t k = 1; k < p.size(); ++k) q = q + p[k] * p[k] * invAxes2(static_cast<Eigen::Index>(k));
    return scale / sqrt(q);
  });
}

TranslatedSphereShape::TranslatedSphereShape(Eigen::VectorXd center) : center_(std::move(center)) {
  if (center_.size() < 3)
    throw std::invalid_argument("TranslatedSphereShape: center must live in R^{n+1}, n >= 2");
  if (center_.norm() >= 1.0)
    throw std::invalid_argument("TranslatedSphereShape: |center| must be < 1 for a radial graph");
}

RadialJets TranslatedSphereShape::radialJets(const Chart& chart, const Eigen::VectorXd& angles) const {
  const Eigen::VectorXd c = center_;
  const double c2 = c.squaredNorm();
  return radialJetsFromAD(chart, angles, [&](const std::vector<DualN>& p) {
    DualN s = p[0] * c(0);
    for (size_t k = 1; k < p.size(); ++k) s = s + p[k] * c(static_cast<Eigen::Index>(k));
    return s + sqrt(s * s + (1.0 - c2));
  });
}

PerturbedSphereShape::PerturbedSphereShape(FuncPtr f, double amplitude, double scale)
    : f_(std::move(f)), amp_(amplitude), scale_(scale) {
  if (!f_) throw std::invalid_argument("PerturbedSphereShape: missing direction function");
  if (scale_ <= 0.0) throw std::invalid_argument("PerturbedSphereShape: scale must be positive");
}

RadialJets PerturbedSphereShape::radialJets(const Chart& chart, const Eigen::VectorXd& angles) const {
  FieldJets f = f_->chartJets(chart, angles);
  const int n = chart.dim();
  RadialJets jets;
  double rho = scale_ * (1.0 + amp_ * f.f);
  if (rho <= 0.0) {
    std::ostringstream msg;
    msg << "PerturbedSphereShape: non-positive radius " << rho << " at chart point";
    throw std::runtime_error(msg.str());
  }
  jets.rho = Jet2d(rho);
  jets.rhoI.resize(n);
  jets.rhoIJ = SmallMat<Jet2d>(n);
  for (int i = 0; i < n; ++i) {
    jets.rhoI[i] = Jet2d(scale_ * amp_ * f.fi(i));
    for (int j = 0; j < n; ++j) jets.rhoIJ(i, j) = Jet2d(scale_ * amp_ * f.fij(i, j));
  }
  return jets;
}

double shapeVolume(const RadialShape& shape, const QuadratureGrid& grid) {
  return surfaceIntegral(shape, grid, [](const GeometryJet&) { return 1.0; });
}

double surfaceIntegral(const RadialShape& shape, const QuadratureGrid& grid,
                       const std::function<double(const GeometryJet&)>& integrand) {
  if (shape.dim() != grid.dim()) throw std::invalid_argument("surfaceIntegral: dimension mismatch");
  Eigen::VectorXd values(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    GeometryJet jet = shape.geometryAt(grid.chart(), grid.nodes().row(i).transpose());
    values(i) = integrand(jet) * valueOf(jet.areaRatio());
  }
  return grid.integrate(values);
}

}  // namespace spherevar
