#pragma once

#include "fracgeo/geometry.hpp"
#include "fracgeo/quadrature.hpp"

namespace fracgeo {

// direction-dependent weight w(p/|p|), bounded; sup_abs feeds the tail bound
struct LatticeWeight {
  std::function<double(const Vec&)> fn;
  double sup_abs = 1.0;

  static LatticeWeight unit() {
    return {[](const Vec&) { return 1.0; }, 1.0};
  }
  static LatticeWeight directional_sq(const Vec& theta) {
    Vec th = theta;
    return {[th](const Vec& d) {
              double t = dot(th, d);
              return t * t;
            },
            norm2(theta)};
  }
};

// sum over nonzero lattice points of w(p/|p|) |p|^{-exponent}, shell-summed to
// the cutoff |p| <= trunc_radius * min|p| with an integral-comparison bound on
// the rest placed in tail_err. Terms are sorted deterministically before
// summation, so the value is independent of enumeration or parallelism.
EvalResult lattice_sum(const Lattice& lat, double exponent, const LatticeWeight& w,
                       const QuadSpec& q);

}  // namespace fracgeo
