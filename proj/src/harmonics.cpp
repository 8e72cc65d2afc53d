#include "spherevar/harmonics.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

namespace spherevar {

namespace {
constexpr double kPi = std::numbers::pi;

// Legendre-type polynomial part G_{l,m}(z) = P_l^m(z) / (1-z²)^{m/2}
// (Condon-Shortley phase), valid for any scalar supporting ring ops.
template <class T>
T legendreG(int l, int m, const T& z) {
  T gmm = z * 0.0 + 1.0;
  for (int k = 1; k <= m; ++k) gmm = gmm * static_cast<double>(-(2 * k - 1));
  if (l == m) return gmm;
  T gprev = gmm;
  T gcur = z * (2.0 * m + 1.0) * gmm;
  for (int ll = m + 2; ll <= l; ++ll) {
    T gnext = (z * (2.0 * ll - 1.0) * gcur - gprev * static_cast<double>(ll - 1 + m)) * (1.0 / (ll - m));
    gprev = gcur;
    gcur = gnext;
  }
  return gcur;
}

template <class T>
T gegenbauer(int k, double lambda, const T& w) {
  T c0 = w * 0.0 + 1.0;
  if (k == 0) return c0;
  T c1 = w * (2.0 * lambda);
  if (k == 1) return c1;
  for (int j = 2; j <= k; ++j) {
    T c2 = (w * (2.0 * (j + lambda - 1.0)) * c1 - c0 * (j + 2.0 * lambda - 2.0)) * (1.0 / j);
    c0 = c1;
    c1 = c2;
  }
  return c1;
}

// Re[(x+iy)^m] and Im[(x+iy)^m] by the binomial recurrence.
template <class T>
void complexPow(const T& x, const T& y, int m, T& re, T& im) {
  re = x * 0.0 + 1.0;
  im = x * 0.0;
  for (int k = 0; k < m; ++k) {
    T nre = re * x - im * y;
    T nim = re * y + im * x;
    re = nre;
    im = nim;
  }
}

std::vector<DualN> constantPoint(const Eigen::VectorXd& p) {
  std::vector<DualN> q(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) q[i] = DualN(0, p(i));
  return q;
}

}  // namespace

double laplaceEigenvalue(int n, int k) {
  if (n < 2 || k < 0) throw std::invalid_argument("laplaceEigenvalue: need n >= 2, k >= 0");
  return static_cast<double>(k) * (k + n - 1.0);
}

double SphereFunction::value(const Eigen::VectorXd& unitPoint) const {
  return evalAD(constantPoint(unitPoint)).v;
}

FieldJets SphereFunction::chartJets(const Chart& chart, const Eigen::VectorXd& angles) const {
  const int n = chart.dim();
  std::vector<DualN> ang(n);
  for (int i = 0; i < n; ++i) ang[i] = DualN::variable(n, i, angles(i));
  // Embed through the chart so the AD variables are the chart coordinates.
  std::vector<DualN> emb(n + 1);
  {
    DualN prod = DualN(n, 1.0);
    for (int j = 0; j + 1 < n; ++j) {
      emb[n - j] = prod * cos(ang[j]);
      prod = prod * sin(ang[j]);
    }
    emb[1] = prod * sin(ang[n - 1]);
    emb[0] = prod * cos(ang[n - 1]);
  }
  const Eigen::MatrixXd& R = chart.rotation();
  std::vector<DualN> rotated(n + 1);
  for (int r = 0; r < n + 1; ++r) {
    DualN acc(n, 0.0);
    for (int c = 0; c < n + 1; ++c)
      if (R(r, c) != 0.0) acc = acc + emb[c] * R(r, c);
    rotated[r] = acc;
  }
  DualN out = evalAD(rotated);
  FieldJets jets;
  jets.f = out.v;
  jets.fi = out.g;
  jets.fij = out.h;
  return jets;
}

SphericalHarmonic::SphericalHarmonic(int l, int m) : l_(l), m_(m) {
  if (l < 0 || std::abs(m) > l)
    throw std::invalid_argument("SphericalHarmonic: need l >= 0 and |m| <= l");
  const int ma = std::abs(m);
  double logRatio = std::lgamma(l - ma + 1.0) - std::lgamma(l + ma + 1.0);
  norm_ = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * std::exp(logRatio));
  if (m != 0) norm_ *= std::numbers::sqrt2;
}

DualN SphericalHarmonic::evalAD(const std::vector<DualN>& p) const {
  if (p.size() != 3) throw std::invalid_argument("SphericalHarmonic: expected a point in R^3");
  const int ma = std::abs(m_);
  DualN g = legendreG(l_, ma, p[2]);
  if (ma == 0) return g * norm_;
  DualN re, im;
  complexPow(p[0], p[1], ma, re, im);
  return g * (m_ > 0 ? re : im) * norm_;
}

double SphericalHarmonic::at(int l, int m, const Eigen::VectorXd& unitPoint) {
  return SphericalHarmonic(l, m).value(unitPoint);
}

ZonalHarmonic::ZonalHarmonic(int n, int k) : n_(n), k_(k) {
  if (n < 2 || k < 0) throw std::invalid_argument("ZonalHarmonic: need n >= 2, k >= 0");
  // ∫_{S^n} C_k^λ(cos θ)² dS with λ = (n-1)/2, via Gegenbauer orthogonality.
  double lambda = 0.5 * (n - 1.0);
  double logNum = std::lgamma(k + 2.0 * lambda);
  double logDen = std::lgamma(k + 1.0) + 2.0 * std::lgamma(lambda);
  double lineNorm = kPi * std::pow(2.0, 1.0 - 2.0 * lambda) * std::exp(logNum - logDen) / (k + lambda);
  double total = sphereVolume(n - 1) * lineNorm;
  norm_ = 1.0 / std::sqrt(total);
}

DualN ZonalHarmonic::evalAD(const std::vector<DualN>& p) const {
  if (static_cast<int>(p.size()) != n_ + 1)
    throw std::invalid_argument("ZonalHarmonic: point has wrong dimension");
  return gegenbauer(k_, 0.5 * (n_ - 1.0), p[n_]) * norm_;
}

double ZonalHarmonic::at(int n, int k, double theta) {
  ZonalHarmonic z(n, k);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n + 1);
  p(n) = std::cos(theta);
  // Only the polar coordinate matters; fill the rest consistently.
  p(0) = std::sin(theta);
  return z.value(p);
}

HarmonicSum::HarmonicSum(int n, std::vector<std::pair<double, FuncPtr>> terms)
    : n_(n), terms_(std::move(terms)) {
  for (const auto& [amp, f] : terms_)
    if (f->dim() != n) throw std::invalid_argument("HarmonicSum: mixed dimensions");
}

DualN HarmonicSum::evalAD(const std::vector<DualN>& p) const {
  DualN acc(static_cast<int>(p[0].vars()), 0.0);
  for (const auto& [amp, f] : terms_) acc = acc + f->evalAD(p) * amp;
  return acc;
}

bool HarmonicSum::zonal() const {
  for (const auto& [amp, f] : terms_)
    if (!f->zonal()) return false;
  return true;
}

int HarmonicSum::maxDegree() const {
  int deg = 0;
  for (const auto& [amp, f] : terms_) {
    int d = f->maxDegree();
    if (d < 0) return -1;
    deg = std::max(deg, d);
  }
  return deg;
}

NumericSphereFunction::NumericSphereFunction(int n, std::function<double(const Eigen::VectorXd&)> fn,
                                             double step)
    : n_(n), fn_(std::move(fn)), step_(step) {}

DualN NumericSphereFunction::evalAD(const std::vector<DualN>& p) const {
  Eigen::VectorXd q(p.size());
  for (size_t i = 0; i < p.size(); ++i) q(static_cast<Eigen::Index>(i)) = p[i].v;
  return DualN(p[0].vars(), fn_(q));
}

FieldJets NumericSphereFunction::chartJets(const Chart& chart, const Eigen::VectorXd& angles) const {
  const int n = chart.dim();
  const double h = step_;
  auto at = [&](const Eigen::VectorXd& x) { return fn_(chart.point(x)); };
  FieldJets jets;
  jets.f = at(angles);
  jets.fi.resize(n);
  jets.fij.resize(n, n);
  auto shift = [&](int i, double di, int j, double dj) {
    Eigen::VectorXd x = angles;
    x(i) += di;
    if (j >= 0) x(j) += dj;
    return at(x);
  };
  for (int i = 0; i < n; ++i) {
    // Order-4 central stencils.
    jets.fi(i) = (-shift(i, 2 * h, -1, 0) + 8 * shift(i, h, -1, 0) - 8 * shift(i, -h, -1, 0) +
                  shift(i, -2 * h, -1, 0)) /
                 (12 * h);
    jets.fij(i, i) = (-shift(i, 2 * h, -1, 0) + 16 * shift(i, h, -1, 0) - 30 * jets.f +
                      16 * shift(i, -h, -1, 0) - shift(i, -2 * h, -1, 0)) /
                     (12 * h * h);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      // Order-4 cross stencil built from two order-4 first-derivative passes.
      auto dfd = [&](double dj) {
        return (-shift(i, 2 * h, j, dj) + 8 * shift(i, h, j, dj) - 8 * shift(i, -h, j, dj) +
                shift(i, -2 * h, j, dj)) /
               (12 * h);
      };
      double v = (-dfd(2 * h) + 8 * dfd(h) - 8 * dfd(-h) + dfd(-2 * h)) / (12 * h);
      jets.fij(i, j) = v;
      jets.fij(j, i) = v;
    }
  return jets;
}

FuncPtr randomBandLimited(int n, int kmax, std::uint64_t seed, const QuadratureGrid& grid) {
  if (kmax < 1) throw std::invalid_argument("randomBandLimited: kmax must be >= 1");
  std::mt19937_64 rng(seed);
  // Portable normal deviates (Box-Muller on the raw 64-bit stream).
  auto uniform = [&]() { return (rng() >> 11) * 0x1.0p-53 + 0x1.0p-54; };
  auto normal = [&]() {
    double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  };
  std::vector<std::pair<double, FuncPtr>> terms;
  if (n == 2) {
    for (int l = 1; l <= kmax; ++l)
      for (int m = -l; m <= l; ++m)
        terms.emplace_back(normal(), std::make_shared<SphericalHarmonic>(l, m));
  } else {
    for (int k = 1; k <= kmax; ++k)
      terms.emplace_back(normal(), std::make_shared<ZonalHarmonic>(n, k));
  }
  auto sum = std::make_shared<HarmonicSum>(n, std::move(terms));
  double sup = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    sup = std::max(sup, std::abs(sum->value(grid.unitPoints().row(i).transpose())));
  if (sup <= 0.0) throw std::runtime_error("randomBandLimited: degenerate draw");
  std::vector<std::pair<double, FuncPtr>> scaled;
  for (const auto& [amp, f] : sum->terms()) scaled.emplace_back(amp / sup, f);
  return std::make_shared<HarmonicSum>(n, std::move(scaled));
}

Eigen::VectorXd randomUnitPoint(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&]() { return (rng() >> 11) * 0x1.0p-53 + 0x1.0p-54; };
  auto normal = [&]() {
    double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  };
  Eigen::VectorXd p(n + 1);
  do {
    for (int i = 0; i <= n; ++i) p(i) = normal();
  } while (p.norm() < 1e-6);
  return p / p.norm();
}

namespace {

struct ExprParser {
  const std::string& s;
  size_t i = 0;
  int n;

  explicit ExprParser(const std::string& text, int dim) : s(text), n(dim) {}

  void skipSpace() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }

  bool consume(char c) {
    skipSpace();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  double number() {
    skipSpace();
    size_t end = i;
    while (end < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' || s[end] == 'e' ||
            s[end] == 'E' || ((s[end] == '+' || s[end] == '-') && end > i && (s[end - 1] == 'e' || s[end - 1] == 'E'))))
      ++end;
    if (end == i) throw std::invalid_argument("harmonic expression: expected a number at position " + std::to_string(i));
    double v = std::stod(s.substr(i, end - i));
    i = end;
    return v;
  }

  int integer() {
    skipSpace();
    bool neg = consume('-');
    skipSpace();
    size_t end = i;
    while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
    if (end == i) throw std::invalid_argument("harmonic expression: expected an integer at position " + std::to_string(i));
    int v = std::stoi(s.substr(i, end - i));
    i = end;
    return neg ? -v : v;
  }

  FuncPtr atom() {
    skipSpace();
    if (i >= s.size()) throw std::invalid_argument("harmonic expression: unexpected end of input");
    char c = s[i];
    if (c == 'Y' || c == 'y') {
      ++i;
      if (!consume('(')) throw std::invalid_argument("harmonic expression: expected '(' after Y");
      int l = integer();
      if (!consume(',')) throw std::invalid_argument("harmonic expression: expected ',' inside Y(l,m)");
      int m = integer();
      if (!consume(')')) throw std::invalid_argument("harmonic expression: expected ')' closing Y(l,m)");
      if (n != 2) throw std::invalid_argument("harmonic expression: Y(l,m) atoms require n = 2");
      return std::make_shared<SphericalHarmonic>(l, m);
    }
    if (c == 'Z' || c == 'z') {
      ++i;
      if (!consume('(')) throw std::invalid_argument("harmonic expression: expected '(' after Z");
      int k = integer();
      if (!consume(')')) throw std::invalid_argument("harmonic expression: expected ')' closing Z(k)");
      return std::make_shared<ZonalHarmonic>(n, k);
    }
    throw std::invalid_argument(std::string("harmonic expression: unknown atom '") + c + "'");
  }

  FuncPtr parse() {
    std::vector<std::pair<double, FuncPtr>> terms;
    double sign = 1.0;
    skipSpace();
    if (consume('-')) sign = -1.0;
    while (true) {
      skipSpace();
      double amp = sign;
      if (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
        amp = sign * number();
        if (!consume('*')) throw std::invalid_argument("harmonic expression: expected '*' after coefficient");
      }
      terms.emplace_back(amp, atom());
      skipSpace();
      if (i >= s.size()) break;
      if (consume('+'))
        sign = 1.0;
      else if (consume('-'))
        sign = -1.0;
      else
        throw std::invalid_argument("harmonic expression: expected '+' or '-' at position " + std::to_string(i));
    }
    return std::make_shared<HarmonicSum>(n, std::move(terms));
  }
};

}  // namespace

FuncPtr parseHarmonicExpression(int n, const std::string& text) {
  ExprParser p(text, n);
  return p.parse();
}

ScalarField sampleField(const FuncPtr& f, const GridPtr& grid) {
  if (f->dim() != grid->dim()) throw std::invalid_argument("sampleField: dimension mismatch");
  ScalarField field;
  field.grid = grid;
  field.values.resize(grid->size());
  for (int i = 0; i < grid->size(); ++i)
    field.values(i) = f->value(grid->unitPoints().row(i).transpose());
  return field;
}

double HarmonicCoeffs::coefficient(int index) const {
  for (const auto& e : entries)
    if (e.index == index) return e.a;
  return 0.0;
}

HarmonicCoeffs projectOntoHarmonics(const ScalarField& field, int kMax) {
  if (!field.grid) throw std::invalid_argument("projectOntoHarmonics: field has no grid");
  const QuadratureGrid& grid = *field.grid;
  const int n = grid.dim();
  if (kMax < 0) throw std::invalid_argument("projectOntoHarmonics: kMax must be >= 0");

  HarmonicCoeffs out;
  out.n = n;
  out.kmax = kMax;

  std::vector<FuncPtr> basis;
  if (n == 2) {
    out.zonalBasis = false;
    for (int l = 0; l <= kMax; ++l)
      for (int m = -l; m <= l; ++m) basis.push_back(std::make_shared<SphericalHarmonic>(l, m));
  } else {
    // Zonal check: the first polar index is outermost in the tensor layout,
    // so rows sharing θ_1 are contiguous; a zonal field is constant there.
    const int stride = grid.size() / grid.resolution();
    double scale = std::max(1.0, field.values.cwiseAbs().maxCoeff());
    for (int q = 0; q < grid.resolution(); ++q) {
      double ref = field.values(q * stride);
      for (int r = q * stride; r < (q + 1) * stride; ++r)
        if (std::abs(field.values(r) - ref) > 1e-8 * scale)
          throw std::invalid_argument(
              "projectOntoHarmonics: only the zonal basis is supported for n > 2 and the field is not zonal");
    }
    out.zonalBasis = true;
    for (int k = 0; k <= kMax; ++k) basis.push_back(std::make_shared<ZonalHarmonic>(n, k));
  }

  Eigen::VectorXd synth = Eigen::VectorXd::Zero(grid.size());
  for (const auto& b : basis) {
    Eigen::VectorXd samples(grid.size());
    for (int i = 0; i < grid.size(); ++i)
      samples(i) = b->value(grid.unitPoints().row(i).transpose());
    double a = grid.integrate(samples.cwiseProduct(field.values));
    HarmonicCoeffs::Entry e;
    e.a = a;
    e.beta = laplaceEigenvalue(n, b->maxDegree());
    if (n == 2) {
      const auto* ylm = static_cast<const SphericalHarmonic*>(b.get());
      e.index = ylm->l() * (ylm->l() + 1) + ylm->m();
    } else {
      e.index = b->maxDegree();
    }
    out.entries.push_back(e);
    synth += a * samples;
  }
  Eigen::VectorXd diff = field.values - synth;
  out.residual = std::sqrt(grid.integrate(diff.cwiseProduct(diff)));
  return out;
}

Eigen::VectorXd synthesize(const HarmonicCoeffs& coeffs, const QuadratureGrid& grid) {
  FuncPtr f = functionFromCoeffs(coeffs);
  Eigen::VectorXd values(grid.size());
  for (int i = 0; i < grid.size(); ++i)
    values(i) = f->value(grid.unitPoints().row(i).transpose());
  return values;
}

FuncPtr functionFromCoeffs(const HarmonicCoeffs& coeffs) {
  std::vector<std::pair<double, FuncPtr>> terms;
  for (const auto& e : coeffs.entries) {
    if (e.a == 0.0) continue;
    if (coeffs.zonalBasis) {
      terms.emplace_back(e.a, std::make_shared<ZonalHarmonic>(coeffs.n, e.index));
    } else {
      // index = l(l+1)+m with |m| <= l, so indices of degree l fill
      // [l², (l+1)²-1] and l recovers as floor(√index).
      int l = static_cast<int>(std::floor(std::sqrt(e.index + 0.5)));
      int m = e.index - l * (l + 1);
      terms.emplace_back(e.a, std::make_shared<SphericalHarmonic>(l, m));
    }
  }
  if (terms.empty()) terms.emplace_back(0.0, coeffs.zonalBasis
                                                 ? FuncPtr(std::make_shared<ZonalHarmonic>(coeffs.n, 0))
                                                 : FuncPtr(std::make_shared<SphericalHarmonic>(0, 0)));
  return std::make_shared<HarmonicSum>(coeffs.n, std::move(terms));
}

}  // namespace spherevar
