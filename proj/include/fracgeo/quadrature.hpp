#pragma once

#include <functional>
#include <vector>

#include "fracgeo/types.hpp"
#include "fracgeo/util.hpp"

namespace fracgeo {

// ----------------------------------------------------------------------------
// Adaptive quadrature with nested rules (Gauss-Kronrod 7/15 in 1D, nested
// tensor Gauss-Legendre in 2D/3D). Subdivision always splits the cell of
// largest error estimate; ties break on creation index, so results are
// reproducible and independent of any internal parallelism.
// ----------------------------------------------------------------------------

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;
using Fn3 = std::function<double(double, double, double)>;
// vector-valued 1D/2D integrands write m components into out[]
using FnM1 = std::function<void(double, double*)>;
using FnM2 = std::function<void(double, double, double*)>;

// Declared endpoint behaviour: integrand ~ C (t - a)^{-exponent} near the
// endpoint with exponent in [0,1). Handled by the substitution
// u = (t-a)^{1-exponent}, which makes the transformed integrand bounded.
struct Endpoint {
  double exponent = 0.0;
};

EvalResult integrate_1d(const Fn1& f, double a, double b, const QuadSpec& q,
                        Endpoint left = {}, Endpoint right = {});
// shared-node vector variant; errs may be null
void integrate_1d_multi(const FnM1& f, int m, double a, double b, const QuadSpec& q,
                        double* values, double* errs,
                        Endpoint left = {}, Endpoint right = {});

EvalResult integrate_2d(const Fn2& f, double ax, double bx, double ay, double by,
                        const QuadSpec& q);
void integrate_2d_multi(const FnM2& f, int m, double ax, double bx, double ay, double by,
                        const QuadSpec& q, double* values, double* errs);

EvalResult integrate_3d(const Fn3& f, const Vec& lo, const Vec& hi, const QuadSpec& q);

// Integrals over R or [a, inf) of integrands with declared algebraic decay
// |f| <= C |t|^{-p}, p > 1, via the tangent substitution. No truncation; the
// substitution maps the whole line, so tail_err stays zero.
EvalResult integrate_line(const Fn1& f, const QuadSpec& q, double decay_exponent);
EvalResult integrate_halfline(const Fn1& f, double a, const QuadSpec& q, double decay_exponent);

// Trapezoid rule on a full period with doubling until the change is below
// tolerance. Spectrally accurate for smooth periodic integrands; returns the
// mean times the period.
EvalResult integrate_periodic(const Fn1& f, double period, const QuadSpec& q,
                              int n0 = 16, int nmax = 1 << 14);
void integrate_periodic_multi(const FnM1& f, int m, double period, const QuadSpec& q,
                              double* values, double* errs, int n0 = 16, int nmax = 1 << 14);

// Rectangle with one interior point singularity f = rho^{-beta} fs, beta < 2,
// where rho is the distance to (sx, sy) and fs stays bounded near it. The
// caller supplies fs directly (with rho passed in so ratio forms stay stable);
// integration is polar around the singular point with the radial endpoint
// exponent beta - 1 declared when beta > 1.
using FnSing2 = std::function<double(double x, double y, double rho)>;
EvalResult integrate_rect_singular(const FnSing2& fs, double ax, double bx, double ay, double by,
                                   double sx, double sy, double beta, const QuadSpec& q);

// ----------------------------------------------------------------------------
// Tail bounds for power-law kernels.
// ----------------------------------------------------------------------------

// Upper bound (exact value) of int_{|y|>R} |y|^{-p} dy in R^dim, p > dim.
double power_tail_bound(int dim, double decay_exponent, double R);

// Exact one-dimensional tail integral int_R^inf t^{-p} dt, p > 1.
double power_tail_integral(double p, double R);

// ----------------------------------------------------------------------------
// Principal values: symmetric excision over the QuadSpec schedule followed by
// Richardson extrapolation in eps^{q}, q = min(1, 1-alpha), with two further
// ladder exponents q+1, q+2 for the smooth corrections.
// ----------------------------------------------------------------------------

// Extrapolate I(eps_k) -> I(0) assuming I(eps) = I + sum_j c_j eps^{q + j}.
// eps must be strictly decreasing. Returns the extrapolated value; err gets
// the residual estimate (last Neville correction).
double richardson_extrapolate(const std::vector<double>& eps, const std::vector<double>& vals,
                              double q, double* err);

// Radial-profile engine. shell(r) must equal the full angular integral of the
// integrand over the sphere of radius r around the singular point, volume
// element included, so that the integral over an annulus is int shell(r) dr.
// On genuinely PV-cancelling integrands shell() is the symmetrised fiber
// average and stays integrable. Evaluates I(eps_k) for every scheduled
// excision and extrapolates.
EvalResult pv_radial(const Fn1& shell, double r_max, const FracOrder& fo, const QuadSpec& q,
                     Endpoint inner = {});

// Angular-section engine. section(omega-parameters, out[]) fills, for one
// angular node, the radial integrals over [eps_k, r_max] for every level k
// (closed forms supplied by the caller, e.g. segment primitives of r^{-1-a}).
// The engine integrates the sections over the parameter box and extrapolates.
// box dims: 1 -> interval, 2 -> rectangle.
struct ParamBox {
  int dim = 1;
  double lo[2] = {0.0, 0.0};
  double hi[2] = {0.0, 0.0};
};
EvalResult pv_angular(const FnM1& section1, const FnM2& section2, int levels,
                      const ParamBox& box, const FracOrder& fo, const QuadSpec& q);

// Closed-form radial segment integrals of r^{-1-a} and r^{-2-a}:
//   seg_pow(a, lo, hi)  = int_lo^hi r^{-1-a} dr   (hi may be +inf)
//   seg_pow2(a, lo, hi) = int_lo^hi r^{-2-a} dr
inline double seg_pow(double a, double lo, double hi) {
  double t = std::pow(lo, -a);
  if (std::isfinite(hi)) t -= std::pow(hi, -a);
  return t / a;
}
inline double seg_pow2(double a, double lo, double hi) {
  double t = std::pow(lo, -1.0 - a);
  if (std::isfinite(hi)) t -= std::pow(hi, -1.0 - a);
  return t / (1.0 + a);
}

}  // namespace fracgeo
