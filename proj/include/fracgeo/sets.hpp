#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "fracgeo/geometry.hpp"

namespace fracgeo {

// ----------------------------------------------------------------------------
// Solid sets. tau_E = +1 outside, -1 inside. Sets expose ray "inside"
// intervals so kernel integrals reduce to exact radial primitives; the
// default implementation brackets sign changes of signed_offset by sampling
// and bisection, analytic sets override.
// ----------------------------------------------------------------------------

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo, hi;  // hi may be +inf
};
using RaySegments = std::vector<Interval>;  // disjoint, sorted

class IndicatorSet {
 public:
  virtual ~IndicatorSet() = default;
  virtual int dim() const = 0;
  virtual double bounding_radius() const = 0;  // +inf allowed
  // negative inside, positive outside; comparable to a distance near the boundary
  virtual double signed_offset(const Vec& y) const = 0;
  // inside-intervals of t -> x + t w, 0 < t < t_max (w unit)
  virtual RaySegments segments(const Vec& x, const Vec& w, double t_max) const;

  bool bounded() const { return std::isfinite(bounding_radius()); }

 protected:
  // presample-and-bisect fallback used by the generic segments()
  RaySegments bracket_segments(const Vec& x, const Vec& w, double t_max, int scan) const;
};

using SetPtr = std::shared_ptr<const IndicatorSet>;

// tau_E per the solid NMC formula; throws OnBoundary within 1e-12 of the boundary
int tau_eval(const IndicatorSet& e, const Vec& y);

class BallSet : public IndicatorSet {
 public:
  BallSet(int N, const Vec& center, double radius);
  int dim() const override { return n_; }
  double bounding_radius() const override;
  double signed_offset(const Vec& y) const override;
  RaySegments segments(const Vec& x, const Vec& w, double t_max) const override;
  const Vec& center() const { return c_; }
  double radius() const { return r_; }

 private:
  int n_;
  Vec c_;
  double r_;
};

class BallUnionSet : public IndicatorSet {
 public:
  BallUnionSet(int N, std::vector<BallSet> balls);
  int dim() const override { return n_; }
  double bounding_radius() const override;
  double signed_offset(const Vec& y) const override;
  RaySegments segments(const Vec& x, const Vec& w, double t_max) const override;
  const std::vector<BallSet>& balls() const { return balls_; }

 private:
  int n_;
  std::vector<BallSet> balls_;
};

// {y : normal . y < offset}
class HalfSpaceSet : public IndicatorSet {
 public:
  HalfSpaceSet(int N, const Vec& normal, double offset);
  int dim() const override { return n_; }
  double bounding_radius() const override { return kInf; }
  double signed_offset(const Vec& y) const override;
  RaySegments segments(const Vec& x, const Vec& w, double t_max) const override;

 private:
  int n_;
  Vec nrm_;
  double off_;
};

// star-shaped body {c + rho sigma : rho < scale * psi(sigma)}
class StarSet : public IndicatorSet {
 public:
  StarSet(SphereGraph psi, const Vec& center = Vec(0, 0, 0), double scale = 1.0);
  int dim() const override { return psi_.ambient_dim; }
  double bounding_radius() const override;
  double signed_offset(const Vec& y) const override;
  RaySegments segments(const Vec& x, const Vec& w, double t_max) const override;
  const SphereGraph& psi() const { return psi_; }
  const Vec& center() const { return c_; }
  double scale() const { return scale_; }

 private:
  int n_;
  SphereGraph psi_;
  Vec c_;
  double scale_;
};

// boolean algebra used by the relative perimeter decomposition
class IntersectionSet : public IndicatorSet {
 public:
  IntersectionSet(SetPtr a, SetPtr b);
  int dim() const override { return a_->dim(); }
  double bounding_radius() const override;
  double signed_offset(const Vec& y) const override;
  RaySegments segments(const Vec& x, const Vec& w, double t_max) const override;

 private:
  SetPtr a_, b_;
};

class ComplementSet : public IndicatorSet {
 public:
  explicit ComplementSet(SetPtr a) : a_(std::move(a)) {}
  int dim() const override { return a_->dim(); }
  double bounding_radius() const override { return kInf; }
  double signed_offset(const Vec& y) const override { return -a_->signed_offset(y); }
  RaySegments segments(const Vec& x, const Vec& w, double t_max) const override;
  const IndicatorSet* child() const { return a_.get(); }

 private:
  SetPtr a_;
};

// periodic union S_phi + r L of perturbed unit spheres
class SphereLatticeSet : public IndicatorSet {
 public:
  SphereLatticeSet(Lattice lattice, double r, SphereGraph psi);
  int dim() const override { return lat_.ambient_dim; }
  double bounding_radius() const override { return kInf; }
  double signed_offset(const Vec& y) const override;
  const Lattice& lattice() const { return lat_; }
  double spacing() const { return r_; }
  const SphereGraph& psi() const { return psi_; }

 private:
  Lattice lat_;
  double r_;
  SphereGraph psi_;
};

// disjointness gate + construction (the op named in the catalog)
SphereLatticeSet sphere_lattice_surface(const Lattice& lattice, double r, const SphereGraph& psi);

// segment boolean helpers (exposed for tests)
RaySegments segments_intersect(const RaySegments& a, const RaySegments& b);
RaySegments segments_complement(const RaySegments& a, double t_max_hint);

// ----------------------------------------------------------------------------
// Boundary surfaces (oriented, outward normals).
// ----------------------------------------------------------------------------

struct SurfSample {
  Vec p;
  Vec normal;  // unit, outward
};

struct SphereShape {
  int N = 2;
  Vec center{0, 0, 0};
  double radius = 1.0;
};
struct StarShape {
  SphereGraph psi;  // boundary {center + psi(sigma) sigma}
  Vec center{0, 0, 0};
};
struct PlaneShape {
  int N = 2;
  Vec normal{0, 1, 0};  // {y : normal . y = offset}, outward = normal
  double offset = 0.0;
};
struct CylinderShape {
  double radius = 1.0;  // axis e1 in R^3
};
using Surface = std::variant<SphereShape, StarShape, PlaneShape, CylinderShape>;

int surface_dim(const Surface& s);
// quasi-uniform boundary samples (uniform angles on S^1, Fibonacci on S^2)
std::vector<SurfSample> surface_samples(const Surface& s, int count);
// outward normal of a star shape at direction sigma
Vec star_normal(const SphereGraph& psi, const Vec& sigma);
// area element factor dV = star_weight(sigma) dsigma for star boundaries
double star_weight(const SphereGraph& psi, const Vec& sigma);

// solid set matching a surface (spheres and stars only)
SetPtr surface_solid(const Surface& s);

// orientation guardrail: boundary normals against the sign change of tau
void check_orientation(const Surface& s, const IndicatorSet& e, int samples = 16);

}  // namespace fracgeo
