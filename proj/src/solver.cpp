#include "fracgeo/solver.hpp"

#include <algorithm>
#include <cmath>

namespace fracgeo {

// ---------------------------------------------------------------------------
// spherical fractional Laplacian
// ---------------------------------------------------------------------------

namespace {

EvalResult l_alpha_core(const std::function<double(const Vec&)>& psi,
                        const std::function<double(const Vec&, const Vec&)>& psi_diff,
                        const Vec& theta, const FracOrder& fo, const QuadSpec& q) {
  const int N = fo.dim;
  const double a = fo.alpha;
  Frame fr = frame_from_normal(theta, N == 2 ? 2 : 3);
  auto diff = [&](const Vec& sig) {
    return psi_diff ? psi_diff(theta, sig) : psi(theta) - psi(sig);
  };
  QuadSpec qs = q;
  // excision radii are chordal; the shell variable is the geodesic angle
  for (double& e : qs.pv_excision) e = 2.0 * std::asin(std::min(1.0, 0.5 * e));

  Fn1 shell;
  QuadSpec inner = q;
  inner.abs_tol *= 0.05;
  inner.rel_tol *= 0.25;
  if (N == 2) {
    shell = [&, diff](double g) {
      double dist = 2.0 * std::sin(0.5 * g);
      Vec s1 = std::cos(g) * fr.n + std::sin(g) * fr.t1;
      Vec s2 = std::cos(g) * fr.n - std::sin(g) * fr.t1;
      return (diff(s1) + diff(s2)) * std::pow(dist, -(2.0 + a));
    };
  } else {
    shell = [&, diff](double g) {
      double dist = 2.0 * std::sin(0.5 * g);
      double cg = std::cos(g), sg = std::sin(g);
      Fn1 ring = [&](double beta) {
        Vec sig = cg * fr.n + sg * (std::cos(beta) * fr.t1 + std::sin(beta) * fr.t2);
        return diff(sig);
      };
      double avg = integrate_periodic(ring, 2.0 * M_PI, inner, 16).value;
      return avg * sg * std::pow(dist, -(3.0 + a));
    };
  }
  return pv_radial(shell, M_PI, fo, qs);
}

}  // namespace

EvalResult spherical_frac_laplacian(const std::function<double(const Vec&)>& psi,
                                    const Vec& theta, const FracOrder& fo, const QuadSpec& q) {
  return l_alpha_core(psi, nullptr, theta, fo, q);
}

EvalResult spherical_frac_laplacian(const ModeVector& psi, const Vec& theta, const FracOrder& fo,
                                    const QuadSpec& q) {
  auto f = [psi](const Vec& d) { return psi.eval_dir(d); };
  auto fd = [psi](const Vec& x, const Vec& y) { return mode_diff(psi, x, y); };
  return l_alpha_core(f, fd, theta, fo, q);
}

// ---------------------------------------------------------------------------
// linearized cylinder operator and bifurcation radius
// ---------------------------------------------------------------------------

namespace {

// [H(R + eps cos(mu .)) - H(R)](s = 0) assembled as one integral of the
// pointwise integrand difference (no subtraction of independent quadratures)
double slab_band_delta(double R, double mu, double eps, const FracOrder& fo, const QuadSpec& q) {
  const double a = fo.alpha;
  const double Rt = mu > 0.0 ? std::max(q.trunc_radius, 8.0 * 2.0 * M_PI / mu) : q.trunc_radius;
  SlabGraph sg = mu > 0.0 ? SlabGraph::cosine(1, R, eps, mu)
                          : SlabGraph::constant_radius(1, 1, R + eps);
  const double us = sg.u(0.0);

  // first (graph) term vanishes identically for the constant profile
  Fn1 pair1 = [&](double t) {
    double acc = 0.0;
    for (double tt : {t, -t}) {
      double w = sg.diff(0.0, tt);
      double num = sg.graph_numerator(0.0, tt);
      double den = tt * tt + w * w;
      acc += num * std::pow(den, -0.5 * (2.0 + a));
    }
    return acc;
  };
  // interaction term: difference of the perturbed and straight integrands
  Fn1 pair2d = [&](double t) {
    double acc = 0.0;
    for (double tt : {t, -t}) {
      double v = us + sg.u(-tt);
      double num = v + tt * sg.du(-tt);
      double den = tt * tt + v * v;
      double base = 2.0 * R * std::pow(tt * tt + 4.0 * R * R, -0.5 * (2.0 + a));
      acc += num * std::pow(den, -0.5 * (2.0 + a)) - base;
    }
    return acc;
  };
  // the difference scales with eps; a fixed floor keeps the quotient noise
  // well below the 1e-6 residual scale of the bisection without chasing
  // unreachable absolute targets
  QuadSpec part = q;
  part.abs_tol = std::max(1e-13, 0.25 * q.abs_tol * eps);
  part.rel_tol = std::max(1e-9, 0.25 * q.rel_tol);
  EvalResult t1 = integrate_1d(pair1, 0.0, Rt, part, Endpoint{a});
  EvalResult t2 = integrate_1d(pair2d, 0.0, Rt, part);

  // tail differences: the mean terms of the perturbed band minus the straight
  // band; the oscillating remainders are O(eps R^{-1-a}) and cancel to the
  // accuracy of the bounds already folded into branch evaluations
  double tail1 = 2.0 * (us - sg.u_mean) * power_tail_integral(2.0 + a, Rt);
  double cbar_u = (us + sg.u_mean) * (us + sg.u_mean);
  double cbar_r = 4.0 * R * R;
  double tail2 = (2.0 * us + 2.0 * sg.u_mean) *
                     (power_tail_integral(2.0 + a, Rt) -
                      0.5 * (2.0 + a) * cbar_u * power_tail_integral(4.0 + a, Rt)) -
                 4.0 * R * (power_tail_integral(2.0 + a, Rt) -
                            0.5 * (2.0 + a) * cbar_r * power_tail_integral(4.0 + a, Rt));
  return (2.0 / a) * (t2.value + tail2 - t1.value - tail1);
}

}  // namespace

double linearized_cylinder_operator(double R, double mu, const FracOrder& fo, const QuadSpec& q,
                                    double eps) {
  if (!(R > 0.0)) throw InvalidArgument("linearized_cylinder_operator: R must be positive");
  if (fo.dim != 2)
    throw InvalidArgument("linearized_cylinder_operator: desk-scale build works in R^2");
  double d1 = slab_band_delta(R, mu, eps, fo, q) / eps;
  double d2 = slab_band_delta(R, mu, 0.5 * eps, fo, q) / (0.5 * eps);
  return 2.0 * d2 - d1;  // one Richardson step removes the O(eps) error
}

double bifurcation_radius(const FracOrder& fo, const QuadSpec& q, double lo, double hi,
                          double tol) {
  double flo = linearized_cylinder_operator(lo, 1.0, fo, q);
  double fhi = linearized_cylinder_operator(hi, 1.0, fo, q);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw NoSignChange("bifurcation_radius: bracket does not straddle a root");
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = linearized_cylinder_operator(mid, 1.0, fo, q);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// unduloid continuation
// ---------------------------------------------------------------------------

namespace {

SlabGraph band_from_modes(const std::vector<double>& b, double lambda) {
  const int kmax = static_cast<int>(b.size()) - 1;
  auto u = [b, lambda, kmax](double s) {
    double t = lambda * s;
    double acc = 0.0;
    for (int k = 0; k <= kmax; ++k) acc += b[static_cast<size_t>(k)] * std::cos(k * t);
    return acc;
  };
  auto du = [b, lambda, kmax](double s) {
    double t = lambda * s;
    double acc = 0.0;
    for (int k = 1; k <= kmax; ++k) acc -= b[static_cast<size_t>(k)] * k * lambda * std::sin(k * t);
    return acc;
  };
  SlabGraph sg = SlabGraph::periodic_fn(1, u, du, 2.0 * M_PI / lambda);
  sg.u_diff = [b, lambda, kmax](double s, double t) {
    double p = lambda * s, r = lambda * (s - t);
    double acc = 0.0;
    for (int k = 1; k <= kmax; ++k)
      acc += b[static_cast<size_t>(k)] * (-2.0) * std::sin(0.5 * k * (p + r)) *
             std::sin(0.5 * k * (p - r));
    return acc;
  };
  sg.taylor_rem = [b, lambda, kmax](double s, double t) {
    double acc = 0.0;
    for (int k = 1; k <= kmax; ++k)
      acc += b[static_cast<size_t>(k)] *
             cosine_taylor_rem(static_cast<double>(k), lambda * s, lambda * (s - t));
    return acc;
  };
  return sg;
}

struct BandSystem {
  int kmax;
  double a;      // fixed amplitude
  double h_target;
  FracOrder fo;
  QuadSpec q;

  // unknowns: [b0, b2, .., bK, lambda]
  int size() const { return kmax + 1; }

  std::vector<double> coeffs(const std::vector<double>& x) const {
    std::vector<double> b(static_cast<size_t>(kmax) + 1, 0.0);
    b[0] = x[0];
    double lambda = x[static_cast<size_t>(kmax)];
    b[1] = a / lambda;
    for (int k = 2; k <= kmax; ++k) b[static_cast<size_t>(k)] = x[static_cast<size_t>(k) - 1];
    return b;
  }

  void residual(const std::vector<double>& x, std::vector<double>& f) const {
    double lambda = x[static_cast<size_t>(kmax)];
    if (!(lambda > 0.25 && lambda < 4.0))
      throw NewtonDiverged("unduloid_continuation: wavelength left the trust region");
    SlabGraph sg = band_from_modes(coeffs(x), lambda);
    f.resize(static_cast<size_t>(kmax) + 1);
    for (int j = 0; j <= kmax; ++j) {
      double t = M_PI * j / kmax;
      f[static_cast<size_t>(j)] = nmc_slab(sg, t / lambda, fo, q).value - h_target;
    }
  }
};

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// damped Newton with forward-difference Jacobian and a step clamp
void newton_solve(const std::function<void(const std::vector<double>&, std::vector<double>&)>& F,
                  std::vector<double>& x, double tol, int max_iter, const char* what) {
  const int n = static_cast<int>(x.size());
  std::vector<double> f, f2, xt;
  try {
    F(x, f);
  } catch (const NumericError& e) {
    throw NewtonDiverged(std::string(what) + ": initial residual failed (" + e.what() + ")");
  }
  for (int it = 0; it < max_iter; ++it) {
    double r0 = sup_norm(f);
    if (r0 < tol) return;
    std::vector<double> jac(static_cast<size_t>(n) * n);
    const double h = 1e-6;
    for (int c = 0; c < n; ++c) {
      xt = x;
      xt[static_cast<size_t>(c)] += h;
      try {
        F(xt, f2);
      } catch (const NumericError& e) {
        throw NewtonDiverged(std::string(what) + ": Jacobian column failed (" + e.what() + ")");
      }
      for (int r = 0; r < n; ++r)
        jac[static_cast<size_t>(r) * n + c] = (f2[static_cast<size_t>(r)] - f[static_cast<size_t>(r)]) / h;
    }
    std::vector<double> step = f;
    solve_dense(jac, step, n);
    // clamp the step so trial iterates stay in the perturbative neighbourhood
    double smax = sup_norm(step);
    double cap = 0.25 * std::max(1.0, sup_norm(x));
    if (smax > cap)
      for (double& s : step) s *= cap / smax;
    double damp = 1.0;
    for (int bt = 0; bt < 30; ++bt) {
      xt = x;
      for (int i = 0; i < n; ++i) xt[static_cast<size_t>(i)] -= damp * step[static_cast<size_t>(i)];
      try {
        F(xt, f2);
        if (sup_norm(f2) < (1.0 - 1e-4 * damp) * r0) break;
      } catch (const NumericError&) {
        // fall through to a smaller step
      }
      damp *= 0.5;
      if (bt == 29) throw NewtonDiverged(std::string(what) + ": backtracking failed");
    }
    x = xt;
    f = f2;
  }
  if (sup_norm(f) >= tol) throw NewtonDiverged(std::string(what) + ": max iterations reached");
}

}  // namespace

double BranchPoint::u(double s) const {
  double t = lambda * s;
  double acc = 0.0;
  for (size_t k = 0; k < profile.coef.size(); ++k) acc += profile.coef[k] * std::cos(k * t);
  return acc;
}

double BranchPoint::du(double s) const {
  double t = lambda * s;
  double acc = 0.0;
  for (size_t k = 1; k < profile.coef.size(); ++k)
    acc -= profile.coef[k] * k * lambda * std::sin(k * t);
  return acc;
}

double BranchPoint::v_sup(int samples) const {
  // v_a(t) = (lambda/a)(u - R) - cos t
  if (a == 0.0) return 0.0;
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    double t = 2.0 * M_PI * i / samples;
    double dev = 0.0;
    for (size_t k = 0; k < profile.coef.size(); ++k) {
      double base = (k == 0) ? radius : 0.0;
      dev += (profile.coef[k] - base) * std::cos(k * t);
    }
    double v = (lambda / a) * dev - std::cos(t);
    m = std::max(m, std::fabs(v));
  }
  return m;
}

double BranchPoint::v_cos_moment(const QuadSpec& q) const {
  if (a == 0.0) return 0.0;
  Fn1 f = [&](double t) {
    double dev = 0.0;
    for (size_t k = 0; k < profile.coef.size(); ++k) {
      double base = (k == 0) ? radius : 0.0;
      dev += (profile.coef[k] - base) * std::cos(k * t);
    }
    return ((lambda / a) * dev - std::cos(t)) * std::cos(t);
  };
  return integrate_1d(f, -M_PI, M_PI, q).value;
}

std::vector<BranchPoint> unduloid_continuation(double a_target, int steps, const FracOrder& fo,
                                               const QuadSpec& q, int modes) {
  if (modes < 8) throw InvalidArgument("unduloid_continuation: need K >= 8 modes");
  if (steps < 1) throw InvalidArgument("unduloid_continuation: need at least one step");
  q.validate();
  // converged quadratures keep the collocation residual meaningful under the
  // refined-QuadSpec re-evaluation required of every branch point
  QuadSpec qs = q.with_tols(std::min(q.rel_tol, 1e-9), std::min(q.abs_tol * 0.1, 1e-10));

  const double rstar = bifurcation_radius(fo, qs);
  if (std::fabs(a_target) > 0.5 * rstar)
    throw StepTooLarge("unduloid_continuation: amplitude beyond the perturbative regime");
  SlabGraph straight = SlabGraph::constant_radius(1, 1, rstar);
  const double h_target = nmc_slab(straight, 0.0, fo, qs).value;

  std::vector<BranchPoint> branch;
  BranchPoint trivial;
  trivial.a = 0.0;
  trivial.lambda = 1.0;
  trivial.radius = rstar;
  trivial.h_target = h_target;
  trivial.residual = 0.0;
  trivial.profile = ModeVector::zeros(ModeVector::Basis::fourier_cos, modes);
  trivial.profile.coef[0] = rstar;
  branch.push_back(trivial);

  BandSystem sys{modes, 0.0, h_target, fo, qs};
  std::vector<double> x(static_cast<size_t>(modes) + 1, 0.0);
  x[0] = rstar;
  x[static_cast<size_t>(modes)] = 1.0;
  std::vector<double> xprev = x;

  for (int m = 1; m <= steps; ++m) {
    double am = a_target * m / steps;
    sys.a = am;
    std::vector<double> xpred = x;
    if (m >= 2)
      for (size_t i = 0; i < x.size(); ++i) xpred[i] = 2.0 * x[i] - xprev[i];
    xprev = x;
    x = xpred;
    auto F = [&](const std::vector<double>& xx, std::vector<double>& ff) { sys.residual(xx, ff); };
    newton_solve(F, x, 1e-10 * std::max(1.0, std::fabs(h_target)), 25, "unduloid_continuation");

    BranchPoint bp;
    bp.a = am;
    bp.lambda = x[static_cast<size_t>(modes)];
    bp.radius = rstar;
    bp.h_target = h_target;
    bp.profile = ModeVector::zeros(ModeVector::Basis::fourier_cos, modes);
    bp.profile.coef = sys.coeffs(x);
    std::vector<double> f;
    sys.residual(x, f);
    bp.residual = sup_norm(f);
    branch.push_back(bp);
  }
  return branch;
}

double branch_residual(const BranchPoint& bp, const FracOrder& fo, const QuadSpec& q) {
  if (bp.a == 0.0) return 0.0;
  SlabGraph sg = band_from_modes(bp.profile.coef, bp.lambda);
  double r = 0.0;
  const int kmax = static_cast<int>(bp.profile.coef.size()) - 1;
  for (int j = 0; j <= kmax; ++j) {
    double t = M_PI * j / kmax;
    r = std::max(r, std::fabs(nmc_slab(sg, t / bp.lambda, fo, q).value - bp.h_target));
  }
  return r;
}

// ---------------------------------------------------------------------------
// near-sphere lattices
// ---------------------------------------------------------------------------

namespace {

struct BodyMoments {
  double volume = 0.0;
  double j_par = 0.0;   // int_E (z . axis)^2
  double j_tr = 0.0;    // int_E |z|^2
};

BodyMoments star_moments(const SphereGraph& psi, const Vec& axis, const QuadSpec& q) {
  const int N = psi.ambient_dim;
  BodyMoments m;
  if (N == 2) {
    m.volume = integrate_periodic(
                   [&](double phi) { return std::pow(psi.psi(circle_dir(phi)), 2) / 2.0; },
                   2.0 * M_PI, q)
                   .value;
    m.j_par = integrate_periodic(
                  [&](double phi) {
                    Vec d = circle_dir(phi);
                    double c = dot(d, axis);
                    return c * c * std::pow(psi.psi(d), 4) / 4.0;
                  },
                  2.0 * M_PI, q)
                  .value;
    m.j_tr = integrate_periodic(
                 [&](double phi) { return std::pow(psi.psi(circle_dir(phi)), 4) / 4.0; },
                 2.0 * M_PI, q)
                 .value;
    return m;
  }
  m.volume = star_volume(psi, q);
  m.j_par = integrate_2d(
                [&](double z, double phi) {
                  double rz = std::sqrt(std::max(0.0, 1.0 - z * z));
                  Vec d(rz * std::cos(phi), rz * std::sin(phi), z);
                  double c = dot(d, axis);
                  return c * c * std::pow(psi.psi(d), 5) / 5.0;
                },
                -1.0, 1.0, 0.0, 2.0 * M_PI, q)
                .value;
  m.j_tr = integrate_2d(
               [&](double z, double phi) {
                 double rz = std::sqrt(std::max(0.0, 1.0 - z * z));
                 Vec d(rz * std::cos(phi), rz * std::sin(phi), z);
                 return std::pow(psi.psi(d), 5) / 5.0;
               },
               -1.0, 1.0, 0.0, 2.0 * M_PI, q)
               .value;
  return m;
}

}  // namespace

EvalResult nmc_sphere_lattice(const Lattice& lat, double r, const SphereGraph& psi,
                              const Vec& theta, const FracOrder& fo, const QuadSpec& q) {
  if (!(r * lat.min_nonzero_norm() > 2.0 * psi.psi_max))
    throw Overlap("nmc_sphere_lattice: disjointness gate fails");
  const double s_exp = fo.s();
  EvalResult h = nmc_sphere_graph(psi, theta, fo, q);
  const Vec x = psi.psi(theta) * theta;

  // near images: exact solid masses through the divergence identity,
  // H_image = -2 int_{E_p} |x - y|^{-N-alpha} dy. The images are O((r|p|)^-s)
  // corrections, so their quadrature runs at a matching relative target.
  const double near_cut = 8.5;
  QuadSpec qk = q.with_tols(std::max(q.rel_tol, 1e-6), std::max(q.abs_tol, 1e-9));
  StarSet body(psi);
  EvalResult near_sum;
  for (const Vec& p : lat.nonzero_points_in_ball(near_cut)) {
    StarSet image(psi, r * p);
    EvalResult m = kernel_mass(image, x, s_exp, qk);
    near_sum += (-2.0) * m;
  }

  // far images: multipole expansion with exact centers up to |k| = 4096, then
  // a zeta tail on the leading term (rank-1 lattices; higher ranks use the
  // integral-comparison bound)
  BodyMoments mom = star_moments(psi, normalized(lat.basis[0]), q);
  double far_val = 0.0, far_err = 0.0;
  auto multipole = [&](const Vec& center) {
    Vec d = center - x;
    double D2 = norm2(d);
    double D = std::sqrt(D2);
    double zhat_par = dot((1.0 / D) * d, normalized(lat.basis[0]));
    double jdd = mom.j_par * zhat_par * zhat_par +
                 (mom.j_tr - mom.j_par) * (1.0 - zhat_par * zhat_par) /
                     std::max(1, fo.dim - 1);
    double lead = mom.volume + 0.5 * s_exp * (s_exp + 2.0) * jdd / D2 -
                  0.5 * s_exp * mom.j_tr / D2;
    return -2.0 * std::pow(D, -s_exp) * lead;
  };
  if (lat.rank == 1) {
    const Vec b0 = lat.basis[0];
    const long kfar = 4096;
    for (long k = 9; k <= kfar; ++k) {
      far_val += multipole(r * static_cast<double>(k) * b0);
      far_val += multipole(-r * static_cast<double>(k) * b0);
    }
    double rb = r * norm(b0);
    double tail = 2.0 * mom.volume * std::pow(rb, -s_exp) * zeta_tail(s_exp, kfar);
    far_val -= 2.0 * tail;
    far_err += 2.0 * std::fabs(tail) * (2.0 / (rb * kfar) + 4.0 / (rb * rb));
  } else {
    QuadSpec ql = q;
    ql.trunc_radius = 4096.0;
    EvalResult s0 = lattice_sum(lat, s_exp, LatticeWeight::unit(), ql);
    double scale = std::pow(r, -s_exp);
    // subtract the near part already summed exactly
    double near_part = 0.0;
    for (const Vec& p : lat.nonzero_points_in_ball(near_cut))
      near_part += std::pow(norm(p), -s_exp);
    far_val += -2.0 * mom.volume * scale * (s0.value - near_part);
    far_err += 2.0 * mom.volume * scale * s0.tail_err +
               2.0 * scale * (0.5 * s_exp * (mom.j_tr + mom.j_par)) / (r * r) *
                   (s0.value - near_part);
  }
  EvalResult out = h + near_sum;
  out.value += far_val;
  out.tail_err += far_err + 2.0 * mom.volume * 1e-7;  // multipole truncation slack
  return out;
}

LatticeCorrection lattice_correction(const Lattice& lat, double r, const FracOrder& fo,
                                     const QuadSpec& q, int max_degree) {
  if (max_degree < 4 || max_degree % 2 != 0)
    throw InvalidArgument("lattice_correction: need an even max degree >= 4");
  q.validate();
  const int N = fo.dim;
  ModeVector::Basis basis = N == 2 ? ModeVector::Basis::fourier_cos_even
                                   : ModeVector::Basis::legendre_zonal_even;
  ModeVector mv = ModeVector::zeros(basis, max_degree);
  mv.axis = normalized(lat.basis[0]);
  const int m = static_cast<int>(mv.coef.size());

  QuadSpec qs = q.with_tols(std::min(q.rel_tol, 1e-7), std::min(q.abs_tol, 1e-10));
  const double h_target = nmc_sphere_graph(SphereGraph::constant(N, 1.0),
                                           N == 2 ? Vec(1, 0) : Vec(0, 0, 1), fo, qs)
                              .value;

  // collocation directions in the fundamental sector [0, pi/2] from the axis
  Frame fr = frame_from_normal(mv.axis, N == 2 ? 2 : 3);
  std::vector<Vec> nodes;
  for (int j = 0; j < m; ++j) {
    double ang = 0.5 * M_PI * j / (m - 1);
    nodes.push_back(std::cos(ang) * fr.n + std::sin(ang) * fr.t1);
  }

  auto F = [&](const std::vector<double>& c, std::vector<double>& f) {
    ModeVector trial = mv;
    trial.coef = c;
    SphereGraph sg = SphereGraph::from_modes(N, trial);
    if (!(r * lat.min_nonzero_norm() > 2.0 * sg.psi_max))
      throw Overlap("lattice_correction: iterate violates the disjointness gate");
    f.resize(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j)
      f[static_cast<size_t>(j)] = nmc_sphere_lattice(lat, r, sg, nodes[static_cast<size_t>(j)], fo, qs).value -
                                  h_target;
  };

  std::vector<double> c(static_cast<size_t>(m), 0.0);
  newton_solve(F, c, 1e-9 * std::max(1.0, std::fabs(h_target)), 25, "lattice_correction");

  LatticeCorrection out;
  out.phi = mv;
  out.phi.coef = c;
  out.h_target = h_target;
  out.mean = c[0];
  std::vector<double> f;
  F(c, f);
  out.residual = sup_norm(f);
  return out;
}

}  // namespace fracgeo
