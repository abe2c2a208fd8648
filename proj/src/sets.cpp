#include "fracgeo/sets.hpp"

#include <algorithm>
#include <cmath>

namespace fracgeo {

// ---------------------------------------------------------------------------
// IndicatorSet basics
// ---------------------------------------------------------------------------

int tau_eval(const IndicatorSet& e, const Vec& y) {
  double d = e.signed_offset(y);
  if (std::fabs(d) < 1e-12) throw OnBoundary("tau_eval: point within 1e-12 of the boundary");
  return d < 0.0 ? -1 : +1;
}

namespace {
double bisect_crossing(const IndicatorSet& e, const Vec& x, const Vec& w, double t0, double t1) {
  double f0 = e.signed_offset(x + t0 * w);
  for (int it = 0; it < 100; ++it) {
    double tm = 0.5 * (t0 + t1);
    double fm = e.signed_offset(x + tm * w);
    if ((fm < 0.0) == (f0 < 0.0)) {
      t0 = tm;
      f0 = fm;
    } else {
      t1 = tm;
    }
    if (t1 - t0 < 1e-14 * std::max(1.0, t1)) break;
  }
  return 0.5 * (t0 + t1);
}
}  // namespace

RaySegments IndicatorSet::segments(const Vec& x, const Vec& w, double t_max) const {
  return bracket_segments(x, w, t_max, 2048);
}

RaySegments IndicatorSet::bracket_segments(const Vec& x, const Vec& w, double t_max,
                                           int scan) const {
  // generic fallback: dense presampling brackets the sign changes, bisection
  // refines them. Resolution is tied to the bounding scale of the set.
  double tb = t_max;
  bool unbounded_tail = false;
  if (!std::isfinite(tb)) {
    tb = bounding_radius();
    if (!std::isfinite(tb)) throw InvalidArgument("segments: unbounded set needs finite t_max");
    tb = norm(x) + tb + 1.0;
    unbounded_tail = true;
  }
  const int n = scan;
  RaySegments segs;
  double prev_t = 1e-13;
  double prev_f = signed_offset(x + prev_t * w);
  // a ray that starts inside owns the full leading interval from t = 0
  double open_lo = prev_f < 0.0 ? 0.0 : -1.0;
  for (int i = 1; i <= n; ++i) {
    double t = tb * i / n;
    double f = signed_offset(x + t * w);
    if ((f < 0.0) != (prev_f < 0.0)) {
      double c = bisect_crossing(*this, x, w, prev_t, t);
      if (f < 0.0)
        open_lo = c;
      else {
        segs.push_back({open_lo < 0.0 ? prev_t : open_lo, c});
        open_lo = -1.0;
      }
    }
    prev_t = t;
    prev_f = f;
  }
  if (open_lo >= 0.0) segs.push_back({open_lo, unbounded_tail ? tb : std::min(t_max, tb)});
  return segs;
}

// ---------------------------------------------------------------------------
// BallSet
// ---------------------------------------------------------------------------

BallSet::BallSet(int N, const Vec& center, double radius) : n_(N), c_(center), r_(radius) {
  if (!(radius > 0.0)) throw InvalidArgument("BallSet: radius must be positive");
}

double BallSet::bounding_radius() const { return norm(c_) + r_; }

double BallSet::signed_offset(const Vec& y) const { return norm(y - c_) - r_; }

RaySegments BallSet::segments(const Vec& x, const Vec& w, double t_max) const {
  Vec d = x - c_;
  double b = dot(d, w);
  double c = norm2(d) - r_ * r_;
  double disc = b * b - c;
  if (disc <= 0.0) return {};
  double sq = std::sqrt(disc);
  double t0 = -b - sq, t1 = -b + sq;
  t0 = std::max(t0, 0.0);
  t1 = std::min(t1, t_max);
  if (t1 <= t0) return {};
  return {{t0, t1}};
}

// ---------------------------------------------------------------------------
// BallUnionSet
// ---------------------------------------------------------------------------

BallUnionSet::BallUnionSet(int N, std::vector<BallSet> balls) : n_(N), balls_(std::move(balls)) {
  if (balls_.empty()) throw InvalidArgument("BallUnionSet: need at least one ball");
}

double BallUnionSet::bounding_radius() const {
  double r = 0.0;
  for (const auto& b : balls_) r = std::max(r, b.bounding_radius());
  return r;
}

double BallUnionSet::signed_offset(const Vec& y) const {
  double d = balls_.front().signed_offset(y);
  for (size_t i = 1; i < balls_.size(); ++i) d = std::min(d, balls_[i].signed_offset(y));
  return d;
}

RaySegments BallUnionSet::segments(const Vec& x, const Vec& w, double t_max) const {
  RaySegments all;
  for (const auto& b : balls_) {
    RaySegments s = b.segments(x, w, t_max);
    all.insert(all.end(), s.begin(), s.end());
  }
  std::sort(all.begin(), all.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  RaySegments merged;
  for (const Interval& iv : all) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

// ---------------------------------------------------------------------------
// HalfSpaceSet  {y : normal . y < offset}
// ---------------------------------------------------------------------------

HalfSpaceSet::HalfSpaceSet(int N, const Vec& normal, double offset)
    : n_(N), nrm_(normalized(normal)), off_(offset) {}

double HalfSpaceSet::signed_offset(const Vec& y) const { return dot(nrm_, y) - off_; }

RaySegments HalfSpaceSet::segments(const Vec& x, const Vec& w, double t_max) const {
  double f0 = dot(nrm_, x) - off_;
  double dw = dot(nrm_, w);
  if (std::fabs(dw) < 1e-300) return f0 < 0.0 ? RaySegments{{0.0, t_max}} : RaySegments{};
  double tc = -f0 / dw;
  if (dw > 0.0) {  // leaving the half-space at tc
    if (tc <= 0.0) return {};
    return {{0.0, std::min(tc, t_max)}};
  }
  if (tc >= t_max) return {};
  return {{std::max(tc, 0.0), t_max}};
}

// ---------------------------------------------------------------------------
// StarSet
// ---------------------------------------------------------------------------

StarSet::StarSet(SphereGraph psi, const Vec& center, double scale)
    : n_(psi.ambient_dim), psi_(std::move(psi)), c_(center), scale_(scale) {
  if (!(scale > 0.0)) throw InvalidArgument("StarSet: scale must be positive");
}

double StarSet::bounding_radius() const { return norm(c_) + scale_ * psi_.psi_max; }

double StarSet::signed_offset(const Vec& y) const {
  Vec d = y - c_;
  double r = norm(d);
  if (r < 1e-300) return -scale_ * psi_.psi_min;
  return r - scale_ * psi_.psi((1.0 / r) * d);
}

RaySegments StarSet::segments(const Vec& x, const Vec& w, double t_max) const {
  double tb = std::min(t_max, norm(x - c_) + scale_ * psi_.psi_max + 1.0);
  // smooth low-degree radial profiles cross a ray a handful of times, so a
  // moderate presample brackets every crossing
  RaySegments s = bracket_segments(x, w, tb, 192);
  if (std::isfinite(t_max))
    for (auto& iv : s) iv.hi = std::min(iv.hi, t_max);
  return s;
}

// ---------------------------------------------------------------------------
// boolean algebra
// ---------------------------------------------------------------------------

RaySegments segments_intersect(const RaySegments& a, const RaySegments& b) {
  RaySegments out;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].lo, b[j].lo);
    double hi = std::min(a[i].hi, b[j].hi);
    if (hi > lo) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi)
      ++i;
    else
      ++j;
  }
  return out;
}

RaySegments segments_complement(const RaySegments& a, double t_max_hint) {
  RaySegments out;
  double cur = 0.0;
  for (const Interval& iv : a) {
    if (iv.lo > cur + 1e-13 * std::max(1.0, iv.lo)) out.push_back({cur, iv.lo});
    cur = std::max(cur, iv.hi);
  }
  if (cur < t_max_hint * (1.0 - 1e-13)) out.push_back({cur, t_max_hint});
  return out;
}

IntersectionSet::IntersectionSet(SetPtr a, SetPtr b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_->dim() != b_->dim()) throw InvalidArgument("IntersectionSet: dimension mismatch");
}

double IntersectionSet::bounding_radius() const {
  return std::min(a_->bounding_radius(), b_->bounding_radius());
}

double IntersectionSet::signed_offset(const Vec& y) const {
  return std::max(a_->signed_offset(y), b_->signed_offset(y));
}

RaySegments IntersectionSet::segments(const Vec& x, const Vec& w, double t_max) const {
  return segments_intersect(a_->segments(x, w, t_max), b_->segments(x, w, t_max));
}

RaySegments ComplementSet::segments(const Vec& x, const Vec& w, double t_max) const {
  if (!std::isfinite(t_max))
    throw InvalidArgument("ComplementSet::segments: needs finite t_max");
  return segments_complement(a_->segments(x, w, t_max), t_max);
}

// ---------------------------------------------------------------------------
// SphereLatticeSet
// ---------------------------------------------------------------------------

SphereLatticeSet::SphereLatticeSet(Lattice lattice, double r, SphereGraph psi)
    : lat_(std::move(lattice)), r_(r), psi_(std::move(psi)) {
  if (!(r > 0.0)) throw InvalidArgument("SphereLatticeSet: spacing must be positive");
}

double SphereLatticeSet::signed_offset(const Vec& y) const {
  // nearest lattice copies: search lattice points within |y| + 2 of y along
  // the lattice; cheap since copies are far apart past the disjointness gate.
  double best = norm(y) - psi_.psi((1.0 / std::max(norm(y), 1e-300)) * y);
  if (norm(y) < 1e-300) best = -psi_.psi_min;
  double reach = norm(y) + psi_.psi_max + 1.0;
  for (const Vec& p : lat_.nonzero_points_in_ball(reach / r_)) {
    Vec d = y - r_ * p;
    double rr = norm(d);
    double v = rr < 1e-300 ? -psi_.psi_min : rr - psi_.psi((1.0 / rr) * d);
    best = std::min(best, v);
  }
  return best;
}

SphereLatticeSet sphere_lattice_surface(const Lattice& lattice, double r, const SphereGraph& psi) {
  double pad = psi.psi_max;  // (1 + ||phi||_inf)-enlarged copies must stay disjoint
  if (!(r * lattice.min_nonzero_norm() > 2.0 * pad))
    throw Overlap("sphere_lattice_surface: disjointness gate r * min|p| > 2(1+||phi||) fails");
  return SphereLatticeSet(lattice, r, psi);
}

// ---------------------------------------------------------------------------
// surfaces
// ---------------------------------------------------------------------------

int surface_dim(const Surface& s) {
  if (std::holds_alternative<SphereShape>(s)) return std::get<SphereShape>(s).N;
  if (std::holds_alternative<StarShape>(s)) return std::get<StarShape>(s).psi.ambient_dim;
  if (std::holds_alternative<PlaneShape>(s)) return std::get<PlaneShape>(s).N;
  return 3;  // cylinder
}

Vec star_normal(const SphereGraph& psi, const Vec& sigma) {
  double v = psi.psi(sigma);
  Vec g = psi.grad(sigma);
  Vec n = v * sigma - g;
  return normalized(n);
}

double star_weight(const SphereGraph& psi, const Vec& sigma) {
  double v = psi.psi(sigma);
  Vec g = psi.grad(sigma);
  double gn = norm2(g);
  int N = psi.ambient_dim;
  return std::pow(v, N - 2) * std::sqrt(v * v + gn);
}

std::vector<SurfSample> surface_samples(const Surface& s, int count) {
  std::vector<SurfSample> out;
  if (std::holds_alternative<SphereShape>(s)) {
    const auto& sp = std::get<SphereShape>(s);
    auto dirs = sp.N == 2 ? uniform_circle_points(count) : fibonacci_sphere_points(count);
    for (const Vec& d : dirs) out.push_back({sp.center + sp.radius * d, d});
    return out;
  }
  if (std::holds_alternative<StarShape>(s)) {
    const auto& st = std::get<StarShape>(s);
    int N = st.psi.ambient_dim;
    auto dirs = N == 2 ? uniform_circle_points(count) : fibonacci_sphere_points(count);
    for (const Vec& d : dirs)
      out.push_back({st.center + st.psi.psi(d) * d, star_normal(st.psi, d)});
    return out;
  }
  if (std::holds_alternative<PlaneShape>(s)) {
    const auto& pl = std::get<PlaneShape>(s);
    Frame f = frame_from_normal(pl.normal, pl.N);
    for (int i = 0; i < count; ++i) {
      double t = static_cast<double>(i) - 0.5 * (count - 1);
      out.push_back({pl.offset * f.n + t * f.t1, f.n});
    }
    return out;
  }
  const auto& cy = std::get<CylinderShape>(s);
  int nphi = std::max(4, static_cast<int>(std::sqrt(static_cast<double>(count))));
  int ns = std::max(1, count / nphi);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nphi; ++j) {
      double sVal = static_cast<double>(i) - 0.5 * (ns - 1);
      double phi = 2.0 * M_PI * j / nphi;
      Vec nrm(0.0, std::cos(phi), std::sin(phi));
      out.push_back({Vec(sVal, cy.radius * std::cos(phi), cy.radius * std::sin(phi)), nrm});
    }
  return out;
}

SetPtr surface_solid(const Surface& s) {
  if (std::holds_alternative<SphereShape>(s)) {
    const auto& sp = std::get<SphereShape>(s);
    return std::make_shared<BallSet>(sp.N, sp.center, sp.radius);
  }
  if (std::holds_alternative<StarShape>(s)) {
    const auto& st = std::get<StarShape>(s);
    return std::make_shared<StarSet>(st.psi, st.center);
  }
  throw InvalidArgument("surface_solid: only spheres and star shapes bound solids here");
}

void check_orientation(const Surface& s, const IndicatorSet& e, int samples) {
  for (const SurfSample& smp : surface_samples(s, samples)) {
    const double h = 1e-6;
    double fwd = e.signed_offset(smp.p + h * smp.normal);
    double bwd = e.signed_offset(smp.p - h * smp.normal);
    if (!(fwd > bwd))
      throw InvalidArgument("check_orientation: normal does not point toward tau = +1");
  }
}

}  // namespace fracgeo
