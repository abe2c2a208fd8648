#pragma once

#include "fracgeo/lattice_sum.hpp"
#include "fracgeo/nmc.hpp"
#include "fracgeo/perimeter.hpp"

namespace fracgeo {

// spherical fractional Laplacian: PV int_S (psi(th) - psi(sig)) / |th-sig|^{N+a}
EvalResult spherical_frac_laplacian(const std::function<double(const Vec&)>& psi,
                                    const Vec& theta, const FracOrder& fo, const QuadSpec& q);
EvalResult spherical_frac_laplacian(const ModeVector& psi, const Vec& theta, const FracOrder& fo,
                                    const QuadSpec& q);

// eigenvalue of the linearized slab NMC operator on cos(mu s) about u == R,
// realized as the forward difference [H(R + eps cos(mu .)) - H(R)]/eps at
// s = 0 with one Richardson refinement in eps. The difference of the two
// evaluations is assembled as a single integral of the pointwise integrand
// difference, so quadrature noise does not pollute the quotient.
double linearized_cylinder_operator(double R, double mu, const FracOrder& fo, const QuadSpec& q,
                                    double eps = 1e-5);

// radius at which the mode cos(s) is neutral (bisection on [lo, hi])
double bifurcation_radius(const FracOrder& fo, const QuadSpec& q, double lo = 0.01,
                          double hi = 10.0, double tol = 1e-8);

struct BranchPoint {
  double a = 0.0;        // amplitude parameter
  double lambda = 1.0;   // wavelength parameter lambda(a)
  ModeVector profile;    // b_k of u(t) = sum_k b_k cos(k t), t = lambda s
  double radius = 0.0;   // straight-cylinder radius R*
  double h_target = 0.0; // H_alpha of the straight cylinder
  double residual = 0.0; // sup over collocation of |H(u) - h_target|

  // u and u' as functions of s
  double u(double s) const;
  double du(double s) const;
  // v_a(t): profile minus base radius and cos-mode, rescaled by lambda/a
  double v_sup(int samples = 256) const;
  double v_cos_moment(const QuadSpec& q) const;  // int_{-pi}^{pi} v_a(t) cos t dt
};

std::vector<BranchPoint> unduloid_continuation(double a_target, int steps, const FracOrder& fo,
                                               const QuadSpec& q, int modes);

// re-evaluate the collocation residual of a branch point (optionally under a
// finer QuadSpec)
double branch_residual(const BranchPoint& bp, const FracOrder& fo, const QuadSpec& q);

// NMC of the near-sphere lattice S_phi + r L at a point psi(theta) theta of
// the fundamental copy: central term plus image terms with analytic far field
EvalResult nmc_sphere_lattice(const Lattice& lat, double r, const SphereGraph& psi,
                              const Vec& theta, const FracOrder& fo, const QuadSpec& q);

struct LatticeCorrection {
  ModeVector phi;        // even-mode correction phi_r
  double h_target = 0.0; // H_alpha(S; .) of the unit sphere
  double residual = 0.0;
  double mean = 0.0;     // mean of phi_r over the sphere (= coefficient 0)
};

LatticeCorrection lattice_correction(const Lattice& lat, double r, const FracOrder& fo,
                                     const QuadSpec& q, int max_degree);

}  // namespace fracgeo
