#include "spherevar/sphere.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spherevar {

namespace {
constexpr double kPi = std::numbers::pi;
}

double sphereVolume(int n) {
  if (n < 1) throw std::invalid_argument("sphereVolume: dimension must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

GaussRule gaussJacobiSymmetric(int npoints, double alpha) {
  if (npoints < 1) throw std::invalid_argument("gaussJacobiSymmetric: need at least one node");
  // Symmetric Jacobi weight (1-u²)^α: diagonal recurrence coefficients vanish,
  // off-diagonal b_k = k(k+2α) / ((2k+2α-1)(2k+2α+1)).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(npoints, npoints);
  for (int k = 1; k < npoints; ++k) {
    double num = k * (k + 2.0 * alpha);
    double den = (2.0 * k + 2.0 * alpha - 1.0) * (2.0 * k + 2.0 * alpha + 1.0);
    double b = std::sqrt(num / den);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gaussJacobiSymmetric: eigensolve failed");
  double mu0 = std::sqrt(kPi) * std::exp(std::lgamma(alpha + 1.0) - std::lgamma(alpha + 1.5));
  GaussRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(npoints);
  for (int i = 0; i < npoints; ++i) {
    double c = es.eigenvectors()(0, i);
    rule.weights(i) = mu0 * c * c;
  }
  return rule;
}

SphereMetric metricOf(const ChartJets& jets) {
  const int n = static_cast<int>(jets.dp.cols());
  SphereMetric m;
  m.g = jets.dp.transpose() * jets.dp;
  m.gInv = m.g.inverse();
  m.sqrtG = std::sqrt(m.g.determinant());
  m.christoffel.assign(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // ⟨Φ_ij, Φ_l⟩ then raise the index.
      Eigen::VectorXd lower(n);
      for (int l = 0; l < n; ++l) lower(l) = jets.d2p[i][j].dot(jets.dp.col(l));
      Eigen::VectorXd raised = m.gInv * lower;
      for (int k = 0; k < n; ++k) m.christoffel[k](i, j) = raised(k);
    }
  return m;
}

Chart Chart::standard(int n) {
  if (n < 1) throw std::invalid_argument("Chart: dimension must be >= 1");
  return Chart(n, Eigen::MatrixXd::Identity(n + 1, n + 1));
}

Chart Chart::rotated(Eigen::MatrixXd rotation) {
  const int n = static_cast<int>(rotation.rows()) - 1;
  if (rotation.cols() != rotation.rows() || n < 1)
    throw std::invalid_argument("Chart::rotated: rotation must be square of size n+1");
  return Chart(n, std::move(rotation));
}

Chart Chart::centeredAt(const Eigen::VectorXd& unitPoint) {
  const int n = static_cast<int>(unitPoint.size()) - 1;
  if (n < 1) throw std::invalid_argument("Chart::centeredAt: point must live in R^{n+1}, n >= 1");
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(n + 1);
  e1(0) = 1.0;
  Eigen::VectorXd w = unitPoint.normalized() - e1;
  double wn2 = w.squaredNorm();
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(n + 1, n + 1);
  if (wn2 > 1e-28) rot -= (2.0 / wn2) * w * w.transpose();
  return Chart(n, std::move(rot));
}

Eigen::VectorXd Chart::referenceCoords() const {
  Eigen::VectorXd x(n_);
  for (int i = 0; i < n_ - 1; ++i) x(i) = 0.5 * kPi;
  x(n_ - 1) = 0.0;
  return x;
}

namespace {

// Embedding of the standard hyperspherical chart, evaluated generically so the
// same code produces plain points and chart jets.
template <class T>
void chartEmbedding(const std::vector<T>& ang, std::vector<T>& out) {
  const int n = static_cast<int>(ang.size());
  out.assign(n + 1, T{});
  T prod = ang[0] * 0.0 + 1.0;  // one, with matching dual dimensions
  for (int j = 0; j + 1 < n; ++j) {
    out[n - j] = prod * cos(ang[j]);
    prod = prod * sin(ang[j]);
  }
  out[1] = prod * sin(ang[n - 1]);
  out[0] = prod * cos(ang[n - 1]);
}

}  // namespace

Eigen::VectorXd Chart::point(const Eigen::VectorXd& angles) const {
  if (angles.size() != n_) throw std::invalid_argument("Chart::point: wrong number of angles");
  std::vector<double> ang(angles.data(), angles.data() + n_);
  std::vector<double> out;
  // double specialization: cos/sin resolve through ADL to std.
  {
    using std::cos;
    using std::sin;
    out.assign(n_ + 1, 0.0);
    double prod = 1.0;
    for (int j = 0; j + 1 < n_; ++j) {
      out[n_ - j] = prod * cos(ang[j]);
      prod *= sin(ang[j]);
    }
    out[1] = prod * sin(ang[n_ - 1]);
    out[0] = prod * cos(ang[n_ - 1]);
  }
  Eigen::VectorXd p = Eigen::Map<Eigen::VectorXd>(out.data(), n_ + 1);
  return rot_ * p;
}

ChartJets Chart::jets(const Eigen::VectorXd& angles) const {
  if (angles.size() != n_) throw std::invalid_argument("Chart::jets: wrong number of angles");
  std::vector<DualN> ang(n_);
  for (int i = 0; i < n_; ++i) ang[i] = DualN::variable(n_, i, angles(i));
  std::vector<DualN> emb;
  chartEmbedding(ang, emb);
  ChartJets jets;
  jets.p.resize(n_ + 1);
  jets.dp.resize(n_ + 1, n_);
  jets.d2p.assign(n_, std::vector<Eigen::VectorXd>(n_, Eigen::VectorXd::Zero(n_ + 1)));
  for (int k = 0; k <= n_; ++k) {
    jets.p(k) = emb[k].v;
    jets.dp.row(k) = emb[k].g.transpose();
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) jets.d2p[i][j](k) = emb[k].h(i, j);
  }
  jets.p = rot_ * jets.p;
  jets.dp = rot_ * jets.dp;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) jets.d2p[i][j] = rot_ * jets.d2p[i][j];
  return jets;
}

Eigen::VectorXd Chart::angles(const Eigen::VectorXd& unitPoint) const {
  if (unitPoint.size() != n_ + 1)
    throw std::invalid_argument("Chart::angles: point must live in R^{n+1}");
  Eigen::VectorXd q = rot_.transpose() * unitPoint;
  Eigen::VectorXd x(n_);
  for (int j = 0; j + 1 < n_; ++j) {
    // Remaining prefix q[0..n-1-j] spans the lower-dimensional factor.
    double prefix = q.head(n_ - j).norm();
    x(j) = std::atan2(prefix, q(n_ - j));
  }
  x(n_ - 1) = std::atan2(q(1), q(0));
  return x;
}

QuadratureGrid::QuadratureGrid(int n, int resolution)
    : n_(n), resolution_(resolution), chart_(Chart::standard(n)) {}

std::shared_ptr<const QuadratureGrid> QuadratureGrid::make(int n, int resolution) {
  if (n < 2) throw std::invalid_argument("QuadratureGrid: dimension must be >= 2");
  if (resolution < 4) throw std::invalid_argument("QuadratureGrid: resolution must be >= 4");
  auto grid = std::shared_ptr<QuadratureGrid>(new QuadratureGrid(n, resolution));

  // Polar rules: angle j carries Jacobian sin^{n-1-j}θ, j = 0..n-2.
  std::vector<GaussRule> polar(n - 1);
  for (int j = 0; j + 1 < n; ++j) {
    double sinPower = n - 1 - j;
    polar[j] = gaussJacobiSymmetric(resolution, 0.5 * (sinPower - 1.0));
  }
  const int nAz = 2 * resolution;
  const double azWeight = 2.0 * kPi / nAz;

  long total = nAz;
  for (int j = 0; j + 1 < n; ++j) total *= resolution;

  grid->nodes_.resize(total, n);
  grid->unitPoints_.resize(total, n + 1);
  grid->weights_.resize(total);

  std::vector<int> idx(n - 1, 0);
  long row = 0;
  while (true) {
    double wPolar = 1.0;
    Eigen::VectorXd ang(n);
    for (int j = 0; j + 1 < n; ++j) {
      ang(j) = std::acos(polar[j].nodes(idx[j]));
      wPolar *= polar[j].weights(idx[j]);
    }
    for (int a = 0; a < nAz; ++a) {
      ang(n - 1) = 2.0 * kPi * a / nAz;
      grid->nodes_.row(row) = ang.transpose();
      grid->unitPoints_.row(row) = grid->chart_.point(ang).transpose();
      grid->weights_(row) = wPolar * azWeight;
      ++row;
    }
    int j = n - 2;
    while (j >= 0) {
      if (++idx[j] < resolution) break;
      idx[j] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return grid;
}

double QuadratureGrid::integrate(const Eigen::VectorXd& values) const {
  if (values.size() != weights_.size())
    throw std::invalid_argument("QuadratureGrid::integrate: values do not match grid size");
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    double term = values(i) * weights_(i) - comp;
    double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum;
}

double ScalarField::integrate() const {
  if (!grid) throw std::invalid_argument("ScalarField::integrate: field has no grid");
  return grid->integrate(values);
}

double ScalarField::mean() const { return integrate() / sphereVolume(grid->dim()); }

double integrate(const ScalarField& field, const QuadratureGrid& grid) {
  if (field.grid.get() != &grid)
    throw std::invalid_argument("integrate: field was sampled on a different grid");
  return grid.integrate(field.values);
}

}  // namespace spherevar
