#include "fracgeo/lattice_sum.hpp"

#include <cmath>

namespace fracgeo {

EvalResult lattice_sum(const Lattice& lat, double exponent, const LatticeWeight& w,
                       const QuadSpec& q) {
  const int M = lat.rank;
  if (!(exponent > M))
    throw DivergentSum("lattice_sum: exponent must exceed the lattice rank");
  q.validate();

  const double d0 = lat.min_nonzero_norm();
  const double cutoff = q.trunc_radius * d0;
  // points arrive sorted by (|p|^2, lexicographic index); summing in that
  // order keeps the result bit-identical across runs
  double sum = 0.0;
  for (const Vec& p : lat.nonzero_points_in_ball(cutoff)) {
    double n = norm(p);
    sum += w.fn((1.0 / n) * p) * std::pow(n, -exponent);
  }

  // Integral comparison over the fundamental cells of the omitted points.
  // Every omitted point p has |p| > cutoff and its cell lies in
  // {|x| > cutoff - c} with c half the cell diameter; on that cell
  // |p|^{-s} <= (|x| - c)^{-s}.
  double c = 0.0;
  for (const Vec& b : lat.basis) c += 0.5 * norm(b);
  double covol = std::sqrt(lat.gram_det());
  if (cutoff <= 3.0 * c)
    throw DivergentSum("lattice_sum: cutoff too small for a finite tail bound");
  double r0 = cutoff - 2.0 * c;  // shifted radial variable tau = |x| - c
  double geom = std::pow(1.0 + c / r0, M - 1);
  double tail = sphere_measure(M - 1) / covol * geom * std::pow(r0, M - exponent) / (exponent - M);
  return EvalResult(sum, 0.0, w.sup_abs * tail);
}

}  // namespace fracgeo
