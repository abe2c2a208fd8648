#pragma once

#include "fracgeo/geometry.hpp"
#include "fracgeo/quadrature.hpp"
#include "fracgeo/sets.hpp"

namespace fracgeo {

// Orientation and normalization convention shared by every operator here:
// H_alpha carries the raw 2/alpha prefactor and is positive on spheres; the
// classical operator below is sign adjusted to match (sphere -> +1/R).
struct NmcConvention {
  static constexpr bool positive_on_spheres = true;
  static constexpr bool normalized_by_one_minus_alpha = false;
};

// classical mean curvature of a rotational surface in R^3 at arclength s
double classical_mc_rotational(const RotationalProfile& p, double s);

// F(p) = int_p^inf (1 + t^2)^{-(N+alpha)/2} dt and its exact derivative
double f_kernel(double p, const FracOrder& fo);
double f_kernel_prime(double p, const FracOrder& fo);

// surface (absolutely convergent) form, Sigma = catalog boundary shape
EvalResult nmc_boundary(const Surface& surf, const Vec& x, const FracOrder& fo,
                        const QuadSpec& q);

// solid PV form over tau_E
EvalResult nmc_solid(const IndicatorSet& e, const Vec& x, const FracOrder& fo,
                     const QuadSpec& q);

// deterministic batch evaluation (index-ordered results)
std::vector<EvalResult> nmc_solid_batch(const IndicatorSet& e, const std::vector<Vec>& pts,
                                        const FracOrder& fo, const QuadSpec& q);

// graph forms of Prop.-style PV formulas; E1 integrates F(p_u) - F(-p_u),
// E2 the equivalent weighted difference with the inner q_u integral
enum class GraphForm { f_difference, weighted_difference };
EvalResult nmc_graph(const EuclideanGraph& g, const Vec& xbase, const FracOrder& fo,
                     const QuadSpec& q, GraphForm form = GraphForm::f_difference);

// H(u) - H(v) through the symmetric difference kernel q~_{u,v}
EvalResult nmc_graph_difference(const EuclideanGraph& u, const EuclideanGraph& v,
                                const Vec& xbase, const FracOrder& fo, const QuadSpec& q);

// the positive weight q~_{u,v}(x,y) itself (exposed for sign tests)
double graph_difference_weight(const EuclideanGraph& u, const EuclideanGraph& v,
                               const Vec& xbase, const Vec& ybase, const FracOrder& fo);

// slab/cylinder form; the absolutely convergent representation is the default,
// the PV solid route is the cross-check mode
enum class SlabForm { absolutely_convergent, pv_solid };
EvalResult nmc_slab(const SlabGraph& sg, double s, const FracOrder& fo, const QuadSpec& q,
                    SlabForm form = SlabForm::absolutely_convergent);

// radial graph over the unit sphere (three absolutely convergent integrals)
EvalResult nmc_sphere_graph(const SphereGraph& sg, const Vec& theta, const FracOrder& fo,
                            const QuadSpec& q);

// tangential derivative d_v H_alpha at x in direction v in T_x(boundary)
EvalResult nmc_tangential_derivative(const IndicatorSet& e, const Vec& x, const Vec& v,
                                     const FracOrder& fo, const QuadSpec& q);

// (1-alpha)/omega'_N H_alpha(surf; x) for each alpha in the list
std::vector<double> classical_limit_check(const Surface& surf, const Vec& x,
                                          const std::vector<double>& alpha_list,
                                          const QuadSpec& q);

// measure of S^{N-2}; normalizer of the alpha -> 1 limit
double omega_prime(int N);

// polynomial extrapolation of samples (h_i, y_i) to h = 0 (Neville)
double extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& y);

}  // namespace fracgeo
