#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fracgeo/quadrature.hpp"
#include "fracgeo/types.hpp"
#include "fracgeo/util.hpp"

namespace fracgeo {

// ----------------------------------------------------------------------------
// ModeVector: truncated cosine series on the circle / zonal even Legendre
// series on S^2. Evenness is structural: the restricted bases cannot
// represent odd modes at all.
// ----------------------------------------------------------------------------

struct ModeVector {
  enum class Basis {
    fourier_cos,        // cos(k t), k = 0..K           (periodic cylinder profile)
    fourier_cos_even,   // cos(k phi), k = 0,2,..,K     (even circle functions)
    legendre_zonal_even // P_l(sigma . axis), l = 0,2,..,K
  };

  Basis basis = Basis::fourier_cos;
  int max_degree = 0;
  std::vector<double> coef;  // one per active degree
  Vec axis{1.0, 0.0, 0.0};   // reference axis for the angular bases

  static ModeVector zeros(Basis b, int max_degree);
  std::vector<int> degrees() const;

  double eval_angle(double t) const;    // Fourier bases, t = angle
  double deriv_angle(double t) const;   // d/dt

  // sphere-function view: angle measured from `axis`
  double eval_dir(const Vec& sigma) const;
  Vec grad_dir(const Vec& sigma) const;  // tangential gradient at sigma

  double max_abs() const;
  void check_finite() const;
};

// psi(a) - psi(b) for mode-based functions without subtractive cancellation
double mode_diff(const ModeVector& mv, const Vec& a, const Vec& b);

// cos(k p) - cos(k r) - k (p - r) d/dr cos(k r), O((p-r)^2), product form
double cosine_taylor_rem(double k, double p, double r);

// ----------------------------------------------------------------------------
// Surface representations.
// ----------------------------------------------------------------------------

// Declared Hoelder regularity seed (C, beta); the sampled check below is a
// guardrail for the paper-style C^{1,beta} hypothesis, not a certificate.
struct RegularitySeed {
  double holder_C = 10.0;
  double holder_beta = 0.99;
};

// height function over R^{N-1}; base points are Vec with dim N-1 active slots
struct EuclideanGraph {
  int ambient_dim = 2;
  std::function<double(const Vec&)> u;
  std::function<Vec(const Vec&)> grad;
  // u(a) - u(b) without subtractive cancellation (trig identities where known)
  std::function<double(const Vec&, const Vec&)> u_diff;
  double period = 0.0;   // > 0: periodic in every base coordinate
  bool odd_symmetric_tail = false;  // affine/constant: exact tail cancellation
  double mean = 0.0;     // mean over the period cell (0 for affine tails)
  double sup_dev = 0.0;  // sup |u - mean|
  RegularitySeed seed;

  double diff(const Vec& a, const Vec& b) const {
    return u_diff ? u_diff(a, b) : u(a) - u(b);
  }

  static EuclideanGraph cosine(int N, double amplitude, double wavenumber, double offset = 0.0);
  static EuclideanGraph affine(int N, const Vec& slope, double offset);
  static EuclideanGraph constant(int N, double c);
  static EuclideanGraph periodic_fn(int N, std::function<double(const Vec&)> u,
                                    std::function<Vec(const Vec&)> grad, double period);

  void verify_holder_seed(int samples = 48) const;
};

// rotational profile s -> (x(s), y(s)), arclength, y > 0
struct RotationalProfile {
  std::function<double(double)> x, y, xp, yp, xpp, ypp;
  double kenmotsu_b = -1.0;  // >= 0 when built by the Kenmotsu factory
  double kenmotsu_h = 0.0;

  static RotationalProfile kenmotsu(double b, double h);
  static RotationalProfile sphere(double R);    // x = R sin(s/R), y = R cos(s/R)
  static RotationalProfile cylinder(double h);  // x = s, y = 1/h

  void check_arclength(double s_lo, double s_hi, int samples, double tol) const;
};

// Kenmotsu point (x_b(s), y_b(s)); x_b by quadrature, y_b closed form.
Vec kenmotsu_point(double b, double h, double s, const QuadSpec& q);

// periodic graph phi_b(t) = y_b(x_b^{-1}(t)) via monotone cubic inversion
struct PeriodicGraph {
  double period = 0.0;
  std::vector<double> knots_t;  // increasing over one period
  std::vector<double> knots_s;  // s = x_b^{-1}(t)
  std::vector<double> slope;    // Fritsch-Carlson slopes of s(t)
  std::function<double(double)> y_of_s;
  double interp_err = 0.0;      // sampled inversion residual, folded into quad_err

  double s_of_t(double t) const;
  double operator()(double t) const;
};

PeriodicGraph profile_to_graph(const RotationalProfile& p, int samples_per_period = 2048);

// radial graph over the unit sphere, psi > 0
struct SphereGraph {
  int ambient_dim = 2;
  std::function<double(const Vec&)> psi;
  std::function<Vec(const Vec&)> grad;  // tangential gradient on S^{N-1}
  // psi(a) - psi(b) free of subtractive cancellation (mode bases use exact
  // product identities); defaults to plain subtraction
  std::function<double(const Vec&, const Vec&)> psi_diff;
  bool even = false;
  double psi_min = 1.0, psi_max = 1.0;  // sampled bounds
  RegularitySeed seed;

  double diff(const Vec& a, const Vec& b) const {
    return psi_diff ? psi_diff(a, b) : psi(a) - psi(b);
  }

  static SphereGraph constant(int N, double R);
  static SphereGraph from_modes(int N, const ModeVector& mv);          // psi = 1 + mv
  static SphereGraph radial_fn(int N, std::function<double(const Vec&)> psi,
                               std::function<Vec(const Vec&)> grad, bool even);

  void validate() const;  // psi > 0 everywhere sampled; evenness if flagged
};

// generalized slab {(s, zeta) in R^m x R^n : |zeta| < u(s)}, m = 1 here
struct SlabGraph {
  int m = 1, n = 1;  // m + n = N
  std::function<double(double)> u, du;
  // u(s) - u(s - t) without cancellation at small t (trig identities where known)
  std::function<double(double, double)> u_diff;
  // u(s) - u(s-t) - t u'(s-t): O(t^2), assembled from product identities so
  // the slab kernels stay clean under the t^{-2-alpha} amplification
  std::function<double(double, double)> taylor_rem;
  double period = 0.0;  // 0 means u is constant
  double u_mean = 0.0, u_min = 0.0, u_max = 0.0, du_max = 0.0;
  RegularitySeed seed;

  double diff(double s, double t) const { return u_diff ? u_diff(s, t) : u(s) - u(s - t); }
  double graph_numerator(double s, double t) const {
    if (taylor_rem) return taylor_rem(s, t);
    return diff(s, t) - t * du(s - t);
  }

  int ambient_dim() const { return m + n; }
  static SlabGraph constant_radius(int m, int n, double R);
  static SlabGraph cosine(int n, double R, double amplitude, double wavenumber);
  static SlabGraph periodic_fn(int n, std::function<double(double)> u,
                               std::function<double(double)> du, double period);

  // integrability gate of the slab representation, via power_tail_bound
  void check_integrability(const FracOrder& fo) const;
};

// ----------------------------------------------------------------------------
// Lattices.
// ----------------------------------------------------------------------------

struct Lattice {
  int ambient_dim = 2;
  int rank = 1;
  std::vector<Vec> basis;  // rank vectors in R^N, linearly independent

  Lattice(int N, std::vector<Vec> basis_vectors);

  static Lattice integers(int N);  // Z e_1 inside R^N
  static Lattice square(int N, int M, double spacing = 1.0);

  double gram_det() const;
  double min_nonzero_norm() const;
  // nonzero lattice points with |p| <= R, sorted by (|p|^2, lexicographic k)
  std::vector<Vec> nonzero_points_in_ball(double R) const;
};

}  // namespace fracgeo
