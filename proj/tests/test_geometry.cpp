#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracgeo/geometry.hpp"
#include "fracgeo/nmc.hpp"
#include "fracgeo/sets.hpp"
#include "oracles.hpp"

using namespace fracgeo;

TEST_CASE("kenmotsu profile closed forms") {
  QuadSpec q;
  // b = 0: the straight cylinder (s, 1/h)
  for (double s : {-1.3, 0.0, 0.7, 2.9}) {
    Vec p = kenmotsu_point(0.0, 2.0, s, q);
    CHECK(std::fabs(p[0] - s) < 1e-12);
    CHECK(std::fabs(p[1] - 0.5) < 1e-14);
  }
  // b = 1, hs = pi/2: y = 2/h, maximal radius of the tangent-sphere family
  {
    double h = 1.5;
    Vec p = kenmotsu_point(1.0, h, 0.5 * M_PI / h, q);
    CHECK(std::fabs(p[1] - 2.0 / h) < 1e-12);
  }
  // any b, s = 0: y_b(0) = sqrt(1 + b^2)/h
  for (double b : {0.2, 0.5, 0.9}) {
    double h = 0.8;
    Vec p = kenmotsu_point(b, h, 0.0, q);
    CHECK(std::fabs(p[1] - std::sqrt(1.0 + b * b) / h) < 1e-14);
    CHECK(std::fabs(p[0]) < 1e-15);
  }
}

TEST_CASE("kenmotsu arclength identity from the closed-form derivatives") {
  for (double b : {0.0, 0.3, 0.7, 1.0}) {
    auto p = RotationalProfile::kenmotsu(b, 1.0);
    p.check_arclength(-7.0, 7.0, 400, 1e-8);
  }
}

TEST_CASE("profile_to_graph: limit, periodicity, extremes") {
  // b -> 0: phi == 1/h
  {
    auto g = profile_to_graph(RotationalProfile::kenmotsu(1e-8, 2.0));
    for (double t : {0.1, 0.9, 2.2}) CHECK(std::fabs(g(t) - 0.5) < 1e-7);
  }
  // period check: phi(t + T) = phi(t) with T = x_b(2 pi / h)
  {
    auto prof = RotationalProfile::kenmotsu(0.4, 1.0);
    auto g = profile_to_graph(prof);
    CHECK(std::fabs(g.period - prof.x(2.0 * M_PI)) < 1e-10);
    for (double t : {0.0, 0.3, 1.7, 4.1})
      CHECK(std::fabs(g(t + g.period) - g(t)) < 1e-10);
  }
  // b = 0.5, h = 1: extremes of phi match (1 +- b)/h
  {
    auto g = profile_to_graph(RotationalProfile::kenmotsu(0.5, 1.0));
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 4096; ++i) {
      double v = g(g.period * i / 4096.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(std::fabs(lo - 0.5) < 1e-6);
    CHECK(std::fabs(hi - 1.5) < 1e-6);
  }
  // nodoid parameters are not invertible
  CHECK_THROWS_AS(profile_to_graph(RotationalProfile::kenmotsu(1.0, 1.0)), NotInvertible);
}

TEST_CASE("tau_eval on balls and unions") {
  BallSet ball(2, Vec(0, 0), 1.0);
  CHECK(tau_eval(ball, Vec(0, 0)) == -1);
  CHECK(tau_eval(ball, Vec(2, 0)) == +1);
  CHECK_THROWS_AS(tau_eval(ball, Vec(1.0, 0.0)), OnBoundary);

  BallUnionSet uni(2, {BallSet(2, Vec(0, 0), 1.0), BallSet(2, Vec(4, 0), 1.0)});
  CHECK(tau_eval(uni, Vec(0.2, 0.1)) == -1);
  CHECK(tau_eval(uni, Vec(4.2, 0.1)) == -1);
  CHECK(tau_eval(uni, Vec(2.0, 0.0)) == +1);
}

TEST_CASE("ray segments: analytic ball crossings and boolean algebra") {
  BallSet ball(2, Vec(0, 0), 1.0);
  // chord through the center from a boundary point
  RaySegments s = ball.segments(Vec(-1, 0), Vec(1, 0), kInf);
  REQUIRE(s.size() == 1);
  CHECK(std::fabs(s[0].lo - 0.0) < 1e-12);
  CHECK(std::fabs(s[0].hi - 2.0) < 1e-12);
  // complement of [0,2] on [0,5]
  RaySegments c = segments_complement(s, 5.0);
  REQUIRE(c.size() == 1);
  CHECK(std::fabs(c[0].lo - 2.0) < 1e-12);
  CHECK(std::fabs(c[0].hi - 5.0) < 1e-12);
  // intersection
  RaySegments i = segments_intersect({{0.0, 2.0}}, {{1.0, 3.0}});
  REQUIRE(i.size() == 1);
  CHECK(i[0].lo == 1.0);
  CHECK(i[0].hi == 2.0);
}

TEST_CASE("star set: generic bracketing matches analytic ball answers") {
  StarSet star(SphereGraph::constant(2, 1.0));
  BallSet ball(2, Vec(0, 0), 1.0);
  Vec x(1.7, 0.4);
  for (double phi : {0.3, 2.0, 3.9, 5.5}) {
    Vec w = circle_dir(phi);
    RaySegments a = star.segments(x, w, 10.0);
    RaySegments b = ball.segments(x, w, 10.0);
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.size(); ++k) {
      CHECK(std::fabs(a[k].lo - b[k].lo) < 1e-9);
      CHECK(std::fabs(a[k].hi - b[k].hi) < 1e-9);
    }
  }
}

TEST_CASE("orientation consistency: boundary normals point toward tau = +1") {
  ModeVector mv = ModeVector::zeros(ModeVector::Basis::fourier_cos_even, 4);
  mv.coef[1] = 0.15;  // cos(2 phi) bump
  SphereGraph sg = SphereGraph::from_modes(2, mv);
  Surface surf = StarShape{sg, Vec(0, 0, 0)};
  StarSet solid(sg);
  check_orientation(surf, solid, 24);

  Surface sph = SphereShape{3, Vec(0.5, -0.2, 0.1), 2.0};
  BallSet bset(3, Vec(0.5, -0.2, 0.1), 2.0);
  check_orientation(sph, bset, 32);
}

TEST_CASE("sphere lattice: disjointness gate and indicator") {
  Lattice lat = Lattice::integers(2);
  SphereGraph unit = SphereGraph::constant(2, 1.0);
  CHECK_THROWS_AS(sphere_lattice_surface(lat, 1.9, unit), Overlap);
  SphereLatticeSet set = sphere_lattice_surface(lat, 6.0, unit);
  CHECK(tau_eval(set, Vec(0.0, 0.0)) == -1);
  CHECK(tau_eval(set, Vec(6.0, 0.0)) == -1);   // image sphere center
  CHECK(tau_eval(set, Vec(3.0, 0.0)) == +1);   // between spheres
  CHECK(tau_eval(set, Vec(0.0, 3.0)) == +1);
}

TEST_CASE("mode vectors: evaluation, gradients, stable differences") {
  ModeVector mv = ModeVector::zeros(ModeVector::Basis::fourier_cos, 3);
  mv.coef = {0.1, 0.5, -0.2, 0.05};
  double t = 0.7;
  double ref = 0.1 + 0.5 * std::cos(t) - 0.2 * std::cos(2 * t) + 0.05 * std::cos(3 * t);
  CHECK(std::fabs(mv.eval_angle(t) - ref) < 1e-14);
  double dref = -0.5 * std::sin(t) + 0.4 * std::sin(2 * t) - 0.15 * std::sin(3 * t);
  CHECK(std::fabs(mv.deriv_angle(t) - dref) < 1e-14);

  // stable difference identity vs direct subtraction at moderate separation
  ModeVector ev = ModeVector::zeros(ModeVector::Basis::fourier_cos_even, 4);
  ev.coef = {0.0, 0.3, -0.1};
  Vec a = circle_dir(0.9), b = circle_dir(0.2);
  CHECK(std::fabs(mode_diff(ev, a, b) - (ev.eval_dir(a) - ev.eval_dir(b))) < 1e-13);

  // zonal Legendre basis on S^2
  ModeVector zon = ModeVector::zeros(ModeVector::Basis::legendre_zonal_even, 4);
  zon.coef = {0.0, 0.2, 0.1};
  zon.axis = Vec(0, 0, 1);
  Vec d = normalized(Vec(0.3, -0.4, 0.85));
  double z = d[2];
  double refz = 0.2 * legendre_p(2, z) + 0.1 * legendre_p(4, z);
  CHECK(std::fabs(zon.eval_dir(d) - refz) < 1e-13);
  // tangential gradient is orthogonal to the direction
  CHECK(std::fabs(dot(zon.grad_dir(d), d)) < 1e-12);
}

TEST_CASE("sphere graph validation: positivity, evenness, perturbation norm") {
  CHECK_THROWS_AS(SphereGraph::constant(2, -1.0), InvalidArgument);
  ModeVector mv = ModeVector::zeros(ModeVector::Basis::fourier_cos, 1);
  mv.coef = {0.0, 1.2};  // psi = 1 + 1.2 cos(phi) dips negative
  CHECK_THROWS_AS(SphereGraph::from_modes(2, mv), InvalidArgument);
}

TEST_CASE("lattice basics") {
  CHECK_THROWS_AS(Lattice(2, {Vec(1, 0), Vec(2, 0)}), InvalidArgument);  // dependent
  Lattice sq = Lattice::square(3, 2, 1.5);
  CHECK(sq.min_nonzero_norm() == doctest::Approx(1.5));
  auto pts = sq.nonzero_points_in_ball(3.01);
  // shells: 4 at 1.5, 4 at 1.5 sqrt2, 4 at 3.0 -> 12 points
  CHECK(pts.size() == 12);
  CHECK(norm(pts.front()) == doctest::Approx(1.5));
}

TEST_CASE("euclidean graph: Hoelder seed guardrail and stable differences") {
  EuclideanGraph g = EuclideanGraph::cosine(2, 0.3, 2.0);
  g.verify_holder_seed();
  Vec a(0.401, 0), b(0.4, 0);
  CHECK(std::fabs(g.diff(a, b) - (g.u(a) - g.u(b))) < 1e-14);
  // tiny separation: the product identity keeps full relative accuracy where
  // direct subtraction would return zero
  Vec c(1e-9, 0), d(0.0, 0);
  double analytic = -0.3 * 2.0 * std::sin(1e-9) * std::sin(1e-9);
  CHECK(std::fabs(g.diff(c, d) - analytic) < 1e-30);
  CHECK(g.diff(c, d) != 0.0);
}
