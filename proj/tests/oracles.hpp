#pragma once

// Test-only oracles, independent of the library's quadrature paths:
//  - tanh-sinh (double-exponential) rule for 1D integrals
//  - brute-force partial sums with integral brackets for lattice/zeta sums
//  - gamma-function closed forms for sphere NMC values

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace oracles {

// fixed-grid tanh-sinh rule on (a, b); handles integrable endpoint
// singularities, accuracy near machine precision for analytic integrands
inline double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                        int n = 1600, double tmax = 4.5) {
  const double c = 0.5 * (a + b), h0 = 0.5 * (b - a);
  const double dt = 2.0 * tmax / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    double t = -tmax + i * dt;
    double u = 0.5 * M_PI * std::sinh(t);
    double x = std::tanh(u);
    double w = 0.5 * M_PI * std::cosh(t) / (std::cosh(u) * std::cosh(u));
    double xx = c + h0 * x;
    if (!(xx > a && xx < b)) continue;
    double fv = f(xx);
    if (std::isfinite(fv)) sum += (i == 0 || i == n ? 0.5 : 1.0) * w * fv;
  }
  return sum * h0 * dt;
}

// tanh-sinh over the whole real line through the tangent map
inline double tanh_sinh_line(const std::function<double(double)>& f) {
  return tanh_sinh([&](double g) {
    double c = std::cos(0.5 * M_PI * g);
    return 0.5 * M_PI * f(std::tan(0.5 * M_PI * g)) / (c * c);
  }, -1.0, 1.0);
}

// brute-force zeta partial sum with an integral bracket on the remainder:
// returns (lo, hi) enclosing sum_{k>=1} k^{-s}
inline std::pair<double, double> zeta_bracket(double s, int kmax = 20000) {
  double sum = 0.0;
  for (int k = 1; k <= kmax; ++k) sum += std::pow(static_cast<double>(k), -s);
  double lo = sum + std::pow(kmax + 1.0, 1.0 - s) / (s - 1.0);
  double hi = sum + std::pow(static_cast<double>(kmax), 1.0 - s) / (s - 1.0);
  return {lo, hi};
}

// closed forms for the unit-sphere NMC from the radial-pair reduction:
//   N = 2: H = (2^{2-a}/a) int_0^{pi/2} cos^{-a}
//   N = 3: H = 2^{2-a} pi / (a (1-a))
inline double sphere_nmc_closed_form(int N, double a) {
  if (N == 3) return std::pow(2.0, 2.0 - a) * M_PI / (a * (1.0 - a));
  double integral = 0.5 * std::sqrt(M_PI) * std::exp(std::lgamma(0.5 * (1.0 - a)) -
                                                     std::lgamma(1.0 - 0.5 * a));
  return std::pow(2.0, 2.0 - a) / a * integral;
}

// F(0) closed form: int_0^inf (1+t^2)^{-s/2} dt = sqrt(pi)/2 G((s-1)/2)/G(s/2)
inline double f0_closed_form(double s) {
  return 0.5 * std::sqrt(M_PI) * std::exp(std::lgamma(0.5 * (s - 1.0)) - std::lgamma(0.5 * s));
}

// log-log least squares slope through (x_i, y_i), all positive x, nonzero y
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(std::fabs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
