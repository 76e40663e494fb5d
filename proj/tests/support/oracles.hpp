#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace oracle {

/// Composite trapezoid on [a, b] with n intervals.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) acc += f(a + i * h);
  return acc * h;
}

/// Gaussian line shape with inhomogeneous lifetime t2.
inline double line_shape(double delta, double t2) {
  return t2 / std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * t2 * t2 * delta * delta);
}

/// Resonant Rabi flopping from the inverted state under constant real field.
struct Rabi {
  std::complex<double> c1;
  std::complex<double> c2;
};
inline Rabi rabi(double omega, double t) {
  return {std::complex<double>(0.0, std::sin(0.5 * omega * t)), std::complex<double>(std::cos(0.5 * omega * t), 0.0)};
}

/// Scalar area equation d theta/dx = (alpha/2) sin theta by classical RK4
/// with n steps over [0, x].
inline double area_ode(double theta0, double alpha, double x, int n) {
  const double h = x / n;
  const auto f = [alpha](double th) { return 0.5 * alpha * std::sin(th); };
  double th = theta0;
  for (int i = 0; i < n; ++i) {
    const double k1 = f(th);
    const double k2 = f(th + 0.5 * h * k1);
    const double k3 = f(th + 0.5 * h * k2);
    const double k4 = f(th + h * k3);
    th += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return th;
}

/// Closed form of the same equation: tan(theta/2) = tan(theta0/2) e^{alpha x / 2}.
inline double area_closed_form(double theta0, double alpha, double x) {
  return 2.0 * std::atan(std::tan(0.5 * theta0) * std::exp(0.5 * alpha * x));
}

/// Moments of a normal(mu, sigma) truncated to (0, inf).
struct Moments {
  double mean;
  double variance;
};
inline Moments positive_truncated_normal(double mu, double sigma) {
  const double a = -mu / sigma;
  const double pdf = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
  const double tail = 0.5 * std::erfc(a / std::sqrt(2.0));
  const double lambda = pdf / tail;
  return {mu + sigma * lambda, sigma * sigma * (1.0 + a * lambda - lambda * lambda)};
}

}  // namespace oracle
