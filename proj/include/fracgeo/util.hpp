#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "fracgeo/types.hpp"

namespace fracgeo {

// Points of R^N for N in {2,3}; unused trailing components stay zero so dot
// products over all three slots are always valid.
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  Vec() = default;
  Vec(double x, double y) : c{x, y, 0.0} {}
  Vec(double x, double y, double z) : c{x, y, z} {}

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < 3; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < 3; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double t) {
    for (int i = 0; i < 3; ++i) c[i] *= t;
    return *this;
  }
  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double t, Vec a) { return a *= t; }
  friend Vec operator*(Vec a, double t) { return a *= t; }
  friend Vec operator-(Vec a) { return -1.0 * a; }
};

inline double dot(const Vec& a, const Vec& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline Vec cross(const Vec& a, const Vec& b) {
  return Vec(a.c[1] * b.c[2] - a.c[2] * b.c[1],
             a.c[2] * b.c[0] - a.c[0] * b.c[2],
             a.c[0] * b.c[1] - a.c[1] * b.c[0]);
}
inline Vec normalized(const Vec& a) {
  double n = norm(a);
  if (n == 0.0) throw InvalidArgument("normalized: zero vector");
  return (1.0 / n) * a;
}

// Orthonormal frame completing a unit vector n (dim 2 or 3). For dim 2 the
// single tangent is the 90-degree rotation of n.
struct Frame {
  Vec n, t1, t2;
};

inline Frame frame_from_normal(const Vec& n_in, int dim) {
  Frame f;
  f.n = normalized(n_in);
  if (dim == 2) {
    f.t1 = Vec(-f.n[1], f.n[0]);
    f.t2 = Vec(0, 0, 1);
    return f;
  }
  // pick the coordinate axis least aligned with n
  Vec a = std::fabs(f.n[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
  f.t1 = normalized(a - dot(a, f.n) * f.n);
  f.t2 = cross(f.n, f.t1);
  return f;
}

// Direction on S^{dim-1} from chart coordinates in a frame:
//   dim 2: angle phi measured from t1 toward n? No: full circle about origin,
//          omega = cos(phi) t1 + sin(phi) n is awkward; instead charts use the
//          standard basis unless a frame is given.
inline Vec circle_dir(double phi) { return Vec(std::cos(phi), std::sin(phi)); }

// omega(z,phi) with pole f.n: z = cos(polar angle), phi azimuth about n.
inline Vec sphere_dir(const Frame& f, double z, double phi) {
  double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return z * f.n + (r * std::cos(phi)) * f.t1 + (r * std::sin(phi)) * f.t2;
}
inline Vec circle_dir(const Frame& f, double phi) {
  return std::cos(phi) * f.n + std::sin(phi) * f.t1;
}

// |S^{m}| for m >= 0 (measure of the unit m-sphere in R^{m+1}).
inline double sphere_measure(int m) {
  if (m < 0) throw InvalidArgument("sphere_measure: m < 0");
  // 2 pi^{(m+1)/2} / Gamma((m+1)/2)
  double k = 0.5 * (m + 1);
  return 2.0 * std::pow(M_PI, k) / std::tgamma(k);
}

// |B^{m}| for m >= 1 (measure of the unit ball in R^m). |B^1| = 2.
inline double ball_measure(int m) {
  if (m < 1) throw InvalidArgument("ball_measure: m < 1");
  double k = 0.5 * m;
  return std::pow(M_PI, k) / std::tgamma(k + 1.0);
}

// Legendre polynomial P_k and derivative dP_k/dx on [-1,1] via recurrence.
inline double legendre_p(int k, double x) {
  if (k == 0) return 1.0;
  if (k == 1) return x;
  double pm = 1.0, p = x;
  for (int n = 1; n < k; ++n) {
    double pn = ((2.0 * n + 1.0) * x * p - n * pm) / (n + 1.0);
    pm = p;
    p = pn;
  }
  return p;
}
inline double legendre_dp(int k, double x) {
  if (k == 0) return 0.0;
  double p = legendre_p(k, x), pm = legendre_p(k - 1, x);
  double d = 1.0 - x * x;
  if (d < 1e-14) {
    // endpoint limit: P_k'(+-1) = (+-1)^{k-1} k(k+1)/2
    double sgn = (x > 0.0) ? 1.0 : ((k % 2 == 0) ? -1.0 : 1.0);
    return sgn * 0.5 * k * (k + 1.0);
  }
  return k * (x * p - pm) / d;
}

// Quasi-uniform deterministic point sets.
std::vector<Vec> fibonacci_sphere_points(int count);
inline std::vector<Vec> uniform_circle_points(int count) {
  std::vector<Vec> pts(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    double phi = 2.0 * M_PI * i / count;
    pts[static_cast<size_t>(i)] = circle_dir(phi);
  }
  return pts;
}

// Seeded random rotation (dim 2 or 3), used by invariance tests and suites.
std::array<Vec, 3> random_rotation(int dim, uint64_t seed);
inline Vec apply_rotation(const std::array<Vec, 3>& rot, const Vec& v) {
  return v[0] * rot[0] + v[1] * rot[1] + v[2] * rot[2];
}

// Dense Gaussian elimination with partial pivoting; A is row-major n x n,
// overwritten. Throws NumericError on (near-)singular systems.
void solve_dense(std::vector<double>& a, std::vector<double>& b, int n);

// sum_{k > kmax} k^{-s} for s > 1 by Euler-Maclaurin, accurate to ~1e-15 for
// kmax >= 16 and moderate s.
inline double zeta_tail(double s, int kmax) {
  if (!(s > 1.0)) throw DivergentSum("zeta_tail: exponent <= 1");
  double x = kmax;
  double t = std::pow(x, 1.0 - s) / (s - 1.0);      // integral_{kmax}^inf
  t -= 0.5 * std::pow(x, -s);                        // -f(kmax)/2
  t += (s / 12.0) * std::pow(x, -s - 1.0);           // -f'(kmax)/12
  t -= (s * (s + 1.0) * (s + 2.0) / 720.0) * std::pow(x, -s - 3.0);
  return t;
}

// Index-parallel map with deterministic output placement. thread count comes
// from FRACGEO_THREADS (default 1).
int fracgeo_thread_cap();
void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0);

}  // namespace fracgeo
