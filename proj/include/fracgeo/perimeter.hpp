#pragma once

#include <array>

#include "fracgeo/nmc.hpp"
#include "fracgeo/sets.hpp"

namespace fracgeo {

// inner mass int_B |x - y|^{-s} dy for x outside the closure of B (up to the
// boundary); reduces to exact radial primitives over the ray segments of B
EvalResult kernel_mass(const IndicatorSet& b, const Vec& x, double s_exp, const QuadSpec& q);

// int_A f over a bounded set using ray segments from an anchor point;
// endpoint_exponent declares the boundary-layer blowup of f toward dA
EvalResult set_integral(const IndicatorSet& a, const Vec& anchor,
                        const std::function<double(const Vec&)>& f, const QuadSpec& q,
                        double endpoint_exponent);

// L(A, B) = int_B int_A |x-y|^{-N-alpha}; one of the two must be bounded and
// the interiors must not overlap
EvalResult interaction(const IndicatorSet& a, const IndicatorSet& b, const FracOrder& fo,
                       const QuadSpec& q);

struct PerimeterResult {
  EvalResult total;
  // relative form only: L(E^Omega, E^c^Omega), L(E^Omega, E^c^Omega^c),
  // L(E^Omega^c, E^c^Omega)
  std::array<double, 3> parts{0.0, 0.0, 0.0};
  bool has_decomposition = false;
};

// P_alpha(E) = L(E, E^c); far field beyond the bounding radius enters through
// closed-form radial tails, not bounds
PerimeterResult frac_perimeter(const IndicatorSet& e, const FracOrder& fo, const QuadSpec& q);

// boundary-integral form with the 1/(alpha(1+alpha)) prefactor
EvalResult frac_perimeter_boundary(const Surface& surf, const FracOrder& fo, const QuadSpec& q);

// relative perimeter P_{alpha,Omega}(E) with its three-term decomposition
PerimeterResult relative_frac_perimeter(const IndicatorSet& e, const IndicatorSet& omega,
                                        const FracOrder& fo, const QuadSpec& q);

// volume of a star-shaped body
double star_volume(const SphereGraph& psi, const QuadSpec& q);

// first-variation identity: lhs = central difference of P_alpha under the
// normal perturbation by t v (radial reparameterization), rhs = (N-1) int H v
struct FirstVariation {
  EvalResult lhs, rhs;
  double volume_rate = 0.0;  // (|E_t| - |E_-t|)/(2t), reported not asserted
};
FirstVariation first_variation_check(const SphereGraph& psi,
                                     const std::function<double(const Vec&)>& v_of_dir,
                                     const FracOrder& fo, const QuadSpec& q, double step);

}  // namespace fracgeo
