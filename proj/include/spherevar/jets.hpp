#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <type_traits>

namespace spherevar {

// Non-deduced scalar parameter so mixed expressions like Jet2<Jet2<double>>
// times double convert through the jet constructor.
template <class T>
using ScalarArg = std::type_identity_t<T>;

// Truncated second-order Taylor scalar in one evolution parameter.
// Arithmetic propagates exact first and second derivatives.
// T is double for ordinary use; Jet2<Jet2<double>> yields mixed partials
// in two parameters.
template <class T>
struct Jet2 {
  T v{};
  T d1{};
  T d2{};

  Jet2() = default;
  Jet2(const T& value) : v(value), d1(), d2() {}
  Jet2(const T& value, const T& first, const T& second) : v(value), d1(first), d2(second) {}

  // Seed for the differentiation variable itself.
  static Jet2 variable(const T& value) { return Jet2(value, T(1), T(0)); }

  Jet2 operator-() const { return Jet2(-v, -d1, -d2); }

  Jet2& operator+=(const Jet2& o) {
    v = v + o.v;
    d1 = d1 + o.d1;
    d2 = d2 + o.d2;
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    v = v - o.v;
    d1 = d1 - o.d1;
    d2 = d2 - o.d2;
    return *this;
  }
  Jet2& operator*=(const Jet2& o) {
    T nd2 = d2 * o.v + d1 * o.d1 * T(2) + v * o.d2;
    T nd1 = d1 * o.v + v * o.d1;
    v = v * o.v;
    d1 = nd1;
    d2 = nd2;
    return *this;
  }
};

template <class T>
Jet2<T> operator+(Jet2<T> a, const Jet2<T>& b) { return a += b; }
template <class T>
Jet2<T> operator-(Jet2<T> a, const Jet2<T>& b) { return a -= b; }
template <class T>
Jet2<T> operator*(Jet2<T> a, const Jet2<T>& b) { return a *= b; }

template <class T>
Jet2<T> operator+(const Jet2<T>& a, const ScalarArg<T>& s) { return Jet2<T>(a.v + s, a.d1, a.d2); }
template <class T>
Jet2<T> operator+(const ScalarArg<T>& s, const Jet2<T>& a) { return a + s; }
template <class T>
Jet2<T> operator-(const Jet2<T>& a, const ScalarArg<T>& s) { return Jet2<T>(a.v - s, a.d1, a.d2); }
template <class T>
Jet2<T> operator-(const ScalarArg<T>& s, const Jet2<T>& a) { return Jet2<T>(s - a.v, -a.d1, -a.d2); }
template <class T>
Jet2<T> operator*(const Jet2<T>& a, const ScalarArg<T>& s) { return Jet2<T>(a.v * s, a.d1 * s, a.d2 * s); }
template <class T>
Jet2<T> operator*(const ScalarArg<T>& s, const Jet2<T>& a) { return a * s; }

template <class T>
Jet2<T> inverse(const Jet2<T>& a) {
  T w = T(1) / a.v;
  T w2 = w * w;
  // (1/a)' = -a'/a², (1/a)'' = (2a'² - a''a)/a³
  return Jet2<T>(w, -a.d1 * w2, (a.d1 * a.d1 * T(2) - a.d2 * a.v) * w2 * w);
}

template <class T>
Jet2<T> operator/(const Jet2<T>& a, const Jet2<T>& b) { return a * inverse(b); }
template <class T>
Jet2<T> operator/(const Jet2<T>& a, const ScalarArg<T>& s) { return a * (T(1) / s); }
template <class T>
Jet2<T> operator/(const ScalarArg<T>& s, const Jet2<T>& b) { return inverse(b) * s; }

template <class T>
Jet2<T> sqrt(const Jet2<T>& a) {
  using std::sqrt;
  T s = sqrt(a.v);
  T inv2s = T(1) / (s * T(2));
  return Jet2<T>(s, a.d1 * inv2s, a.d2 * inv2s - a.d1 * a.d1 * inv2s * inv2s * inv2s * T(2));
}

using Jet2d = Jet2<double>;

inline double valueOf(double x) { return x; }
template <class T>
auto valueOf(const Jet2<T>& a) { return valueOf(a.v); }

// Second-order multivariate dual over a fixed number of chart variables:
// value, gradient and Hessian, propagated exactly.
struct DualN {
  double v = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;

  DualN() = default;
  DualN(int nvars, double value)
      : v(value), g(Eigen::VectorXd::Zero(nvars)), h(Eigen::MatrixXd::Zero(nvars, nvars)) {}
  DualN(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess)
      : v(value), g(std::move(grad)), h(std::move(hess)) {}

  static DualN variable(int nvars, int index, double value) {
    DualN d(nvars, value);
    d.g(index) = 1.0;
    return d;
  }

  int vars() const { return static_cast<int>(g.size()); }

  DualN operator-() const { return DualN(-v, -g, -h); }
};

inline DualN operator+(const DualN& a, const DualN& b) { return DualN(a.v + b.v, a.g + b.g, a.h + b.h); }
inline DualN operator-(const DualN& a, const DualN& b) { return DualN(a.v - b.v, a.g - b.g, a.h - b.h); }
inline DualN operator+(const DualN& a, double s) { return DualN(a.v + s, a.g, a.h); }
inline DualN operator+(double s, const DualN& a) { return a + s; }
inline DualN operator-(const DualN& a, double s) { return DualN(a.v - s, a.g, a.h); }
inline DualN operator-(double s, const DualN& a) { return DualN(s - a.v, -a.g, -a.h); }

inline DualN operator*(const DualN& a, const DualN& b) {
  return DualN(a.v * b.v, a.g * b.v + b.g * a.v,
               a.h * b.v + b.h * a.v + a.g * b.g.transpose() + b.g * a.g.transpose());
}
inline DualN operator*(const DualN& a, double s) { return DualN(a.v * s, a.g * s, a.h * s); }
inline DualN operator*(double s, const DualN& a) { return a * s; }

// Chain rule for a smooth scalar map applied to a dual: needs f(u), f'(u), f''(u).
inline DualN applyScalar(const DualN& u, double f, double fp, double fpp) {
  return DualN(f, fp * u.g, fp * u.h + fpp * u.g * u.g.transpose());
}

inline DualN inverse(const DualN& a) {
  double w = 1.0 / a.v;
  return applyScalar(a, w, -w * w, 2.0 * w * w * w);
}
inline DualN operator/(const DualN& a, const DualN& b) { return a * inverse(b); }
inline DualN operator/(const DualN& a, double s) { return a * (1.0 / s); }
inline DualN operator/(double s, const DualN& b) { return inverse(b) * s; }

inline DualN sin(const DualN& u) { return applyScalar(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v)); }
inline DualN cos(const DualN& u) { return applyScalar(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v)); }
inline DualN sqrt(const DualN& u) {
  double s = std::sqrt(u.v);
  return applyScalar(u, s, 0.5 / s, -0.25 / (s * u.v));
}

using DualVec = Eigen::Matrix<DualN, Eigen::Dynamic, 1>;

}  // namespace spherevar
