#include "fracgeo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracgeo {

// ---------------------------------------------------------------------------
// ModeVector
// ---------------------------------------------------------------------------

ModeVector ModeVector::zeros(Basis b, int max_degree) {
  ModeVector mv;
  mv.basis = b;
  mv.max_degree = max_degree;
  if (b == Basis::fourier_cos)
    mv.coef.assign(static_cast<size_t>(max_degree) + 1, 0.0);
  else
    mv.coef.assign(static_cast<size_t>(max_degree / 2) + 1, 0.0);
  return mv;
}

std::vector<int> ModeVector::degrees() const {
  std::vector<int> d;
  if (basis == Basis::fourier_cos) {
    for (int k = 0; k <= max_degree; ++k) d.push_back(k);
  } else {
    for (int k = 0; k <= max_degree; k += 2) d.push_back(k);
  }
  return d;
}

double ModeVector::eval_angle(double t) const {
  double s = 0.0;
  auto ds = degrees();
  for (size_t i = 0; i < ds.size(); ++i) s += coef[i] * std::cos(ds[i] * t);
  return s;
}

double ModeVector::deriv_angle(double t) const {
  double s = 0.0;
  auto ds = degrees();
  for (size_t i = 0; i < ds.size(); ++i) s -= coef[i] * ds[i] * std::sin(ds[i] * t);
  return s;
}

double ModeVector::eval_dir(const Vec& sigma) const {
  if (basis == Basis::legendre_zonal_even) {
    double z = dot(sigma, axis);
    z = std::clamp(z, -1.0, 1.0);
    double s = 0.0;
    auto ds = degrees();
    for (size_t i = 0; i < ds.size(); ++i) s += coef[i] * legendre_p(ds[i], z);
    return s;
  }
  Vec perp(-axis[1], axis[0]);
  double phi = std::atan2(dot(sigma, perp), dot(sigma, axis));
  return eval_angle(phi);
}

Vec ModeVector::grad_dir(const Vec& sigma) const {
  if (basis == Basis::legendre_zonal_even) {
    double z = std::clamp(dot(sigma, axis), -1.0, 1.0);
    double df = 0.0;
    auto ds = degrees();
    for (size_t i = 0; i < ds.size(); ++i) df += coef[i] * legendre_dp(ds[i], z);
    Vec tangential = axis - z * sigma;  // tangential gradient of z
    return df * tangential;
  }
  Vec perp(-axis[1], axis[0]);
  double phi = std::atan2(dot(sigma, perp), dot(sigma, axis));
  Vec dsig = -std::sin(phi) * axis + std::cos(phi) * perp;
  return deriv_angle(phi) * dsig;
}

// psi(a) - psi(b) via product identities: cos kx - cos ky =
// -2 sin(k(x+y)/2) sin(k(x-y)/2), and a midpoint-derivative form for the
// Legendre basis once the arguments nearly coincide.
double mode_diff(const ModeVector& mv, const Vec& a, const Vec& b) {
  if (mv.basis == ModeVector::Basis::legendre_zonal_even) {
    double za = std::clamp(dot(a, mv.axis), -1.0, 1.0);
    double zb = std::clamp(dot(b, mv.axis), -1.0, 1.0);
    double dz = za - zb;
    auto ds = mv.degrees();
    if (std::fabs(dz) > 1e-5) {
      double s = 0.0;
      for (size_t i = 0; i < ds.size(); ++i)
        s += mv.coef[i] * (legendre_p(ds[i], za) - legendre_p(ds[i], zb));
      return s;
    }
    double zm = 0.5 * (za + zb);
    double s = 0.0;
    for (size_t i = 0; i < ds.size(); ++i) s += mv.coef[i] * legendre_dp(ds[i], zm) * dz;
    return s;
  }
  Vec perp(-mv.axis[1], mv.axis[0]);
  double pa = std::atan2(dot(a, perp), dot(a, mv.axis));
  double pb = std::atan2(dot(b, perp), dot(b, mv.axis));
  double dif = pa - pb;
  if (dif > M_PI) dif -= 2.0 * M_PI;
  if (dif < -M_PI) dif += 2.0 * M_PI;
  // rebuild the second angle from the wrapped difference so the product
  // identity stays exact for odd modes as well
  double sum = 2.0 * pa - dif;
  double s = 0.0;
  auto ds = mv.degrees();
  for (size_t i = 0; i < ds.size(); ++i)
    s += mv.coef[i] * (-2.0) * std::sin(0.5 * ds[i] * sum) * std::sin(0.5 * ds[i] * dif);
  return s;
}

double ModeVector::max_abs() const {
  double m = 0.0;
  for (double c : coef) m = std::max(m, std::fabs(c));
  return m;
}

void ModeVector::check_finite() const {
  for (double c : coef)
    if (!std::isfinite(c)) throw NumericError("ModeVector: non-finite coefficient");
}

// ---------------------------------------------------------------------------
// EuclideanGraph
// ---------------------------------------------------------------------------

EuclideanGraph EuclideanGraph::cosine(int N, double amplitude, double wavenumber, double offset) {
  if (N < 2 || N > 3) throw InvalidArgument("EuclideanGraph: ambient dim must be 2 or 3");
  if (!(wavenumber > 0.0)) throw InvalidArgument("EuclideanGraph::cosine: wavenumber <= 0");
  EuclideanGraph g;
  g.ambient_dim = N;
  g.u = [=](const Vec& x) { return offset + amplitude * std::cos(wavenumber * x[0]); };
  g.grad = [=](const Vec& x) {
    return Vec(-amplitude * wavenumber * std::sin(wavenumber * x[0]), 0.0, 0.0);
  };
  g.u_diff = [=](const Vec& a, const Vec& b) {
    // cos p - cos q = -2 sin((p+q)/2) sin((p-q)/2)
    double p = wavenumber * a[0], r = wavenumber * b[0];
    return -2.0 * amplitude * std::sin(0.5 * (p + r)) * std::sin(0.5 * (p - r));
  };
  g.period = 2.0 * M_PI / wavenumber;
  g.mean = offset;
  g.sup_dev = std::fabs(amplitude);
  g.seed.holder_C = 4.0 * (1.0 + std::fabs(amplitude) * wavenumber * wavenumber);
  return g;
}

EuclideanGraph EuclideanGraph::affine(int N, const Vec& slope, double offset) {
  EuclideanGraph g;
  g.ambient_dim = N;
  g.u = [=](const Vec& x) { return offset + dot(slope, x); };
  g.grad = [=](const Vec&) { return slope; };
  g.odd_symmetric_tail = true;
  g.period = 0.0;
  return g;
}

EuclideanGraph EuclideanGraph::constant(int N, double c) { return affine(N, Vec(0, 0, 0), c); }

EuclideanGraph EuclideanGraph::periodic_fn(int N, std::function<double(const Vec&)> u,
                                           std::function<Vec(const Vec&)> grad, double period) {
  if (!(period > 0.0)) throw InvalidArgument("EuclideanGraph: period must be positive");
  EuclideanGraph g;
  g.ambient_dim = N;
  g.u = std::move(u);
  g.grad = std::move(grad);
  g.period = period;
  // cell mean and sup deviation, sampled on a fine grid
  const int n = 1024;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += g.u(Vec(period * i / n, 0.0));
  g.mean = sum / n;
  double dev = 0.0;
  for (int i = 0; i < n; ++i) dev = std::max(dev, std::fabs(g.u(Vec(period * i / n, 0.0)) - g.mean));
  g.sup_dev = dev;
  g.seed.holder_C = 100.0;
  return g;
}

void EuclideanGraph::verify_holder_seed(int samples) const {
  double cell = period > 0.0 ? period : 1.0;
  for (int i = 0; i < samples; ++i) {
    for (int j = i + 1; j < samples; ++j) {
      Vec a(cell * i / samples, 0.0), b(cell * j / samples, 0.0);
      double d = norm(a - b);
      if (d < 1e-12) continue;
      double lhs = norm(grad(a) - grad(b));
      if (lhs > seed.holder_C * std::pow(d, seed.holder_beta) + 1e-12)
        throw InvalidArgument("EuclideanGraph: sampled Hoelder seed check failed");
    }
  }
}

// ---------------------------------------------------------------------------
// Rotational profiles
// ---------------------------------------------------------------------------

RotationalProfile RotationalProfile::kenmotsu(double b, double h) {
  if (!(b >= 0.0 && b <= 1.0)) throw InvalidArgument("kenmotsu: b must lie in [0,1]");
  if (!(h > 0.0)) throw InvalidArgument("kenmotsu: h must be positive");
  auto Q = [=](double s) { return 1.0 + b * b + 2.0 * b * std::sin(h * s); };
  RotationalProfile p;
  p.kenmotsu_b = b;
  p.kenmotsu_h = h;
  p.y = [=](double s) { return std::sqrt(Q(s)) / h; };
  p.yp = [=](double s) { return b * std::cos(h * s) / std::sqrt(Q(s)); };
  p.ypp = [=](double s) {
    double S = std::sin(h * s), C = std::cos(h * s), q = Q(s);
    return -b * h * (S * q + b * C * C) / std::pow(q, 1.5);
  };
  p.xp = [=](double s) { return (1.0 + b * std::sin(h * s)) / std::sqrt(Q(s)); };
  p.xpp = [=](double s) {
    double S = std::sin(h * s), C = std::cos(h * s), q = Q(s);
    return b * b * h * C * (b + S) / std::pow(q, 1.5);
  };
  p.x = [=](double s) {
    // x_b(0) = 0; smooth integrand, fixed composite Gauss per half period
    QuadSpec q2;
    q2.abs_tol = 1e-13;
    q2.rel_tol = 1e-13;
    auto integrand = [=](double r) { return (1.0 + b * std::sin(h * r)) / std::sqrt(Q(r)); };
    if (s >= 0.0) return integrate_1d(integrand, 0.0, s, q2).value;
    return -integrate_1d(integrand, s, 0.0, q2).value;
  };
  return p;
}

RotationalProfile RotationalProfile::sphere(double R) {
  RotationalProfile p;
  p.x = [=](double s) { return R * std::sin(s / R); };
  p.y = [=](double s) { return R * std::cos(s / R); };
  p.xp = [=](double s) { return std::cos(s / R); };
  p.yp = [=](double s) { return -std::sin(s / R); };
  p.xpp = [=](double s) { return -std::sin(s / R) / R; };
  p.ypp = [=](double s) { return -std::cos(s / R) / R; };
  return p;
}

RotationalProfile RotationalProfile::cylinder(double h) {
  RotationalProfile p;
  p.x = [](double s) { return s; };
  p.y = [=](double) { return 1.0 / h; };
  p.xp = [](double) { return 1.0; };
  p.yp = [](double) { return 0.0; };
  p.xpp = [](double) { return 0.0; };
  p.ypp = [](double) { return 0.0; };
  return p;
}

void RotationalProfile::check_arclength(double s_lo, double s_hi, int samples, double tol) const {
  for (int i = 0; i <= samples; ++i) {
    double s = s_lo + (s_hi - s_lo) * i / samples;
    double v = xp(s) * xp(s) + yp(s) * yp(s);
    if (std::fabs(v - 1.0) > tol)
      throw InvalidArgument("RotationalProfile: arclength identity violated");
  }
}

Vec kenmotsu_point(double b, double h, double s, const QuadSpec& q) {
  auto p = RotationalProfile::kenmotsu(b, h);
  (void)q;  // x uses its own tight fixed tolerance
  return Vec(p.x(s), p.y(s));
}

// ---------------------------------------------------------------------------
// profile_to_graph: monotone cubic inversion of x_b
// ---------------------------------------------------------------------------

namespace {
// Fritsch-Carlson slopes for monotone data (x strictly increasing)
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y,
                                    bool periodic_derivative) {
  const size_t n = x.size();
  std::vector<double> delta(n - 1), d(n);
  for (size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  for (size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0)
      d[i] = 0.0;
    else
      d[i] = 0.5 * (delta[i - 1] + delta[i]);
  }
  if (periodic_derivative) {
    double dw = 0.5 * (delta[n - 2] + delta[0]);
    d[0] = dw;
    d[n - 1] = dw;
  } else {
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
  }
  // clamp for monotonicity
  for (size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      d[i] = d[i + 1] = 0.0;
      continue;
    }
    double a = d[i] / delta[i], b = d[i + 1] / delta[i];
    double s = a * a + b * b;
    if (s > 9.0) {
      double t = 3.0 / std::sqrt(s);
      d[i] = t * a * delta[i];
      d[i + 1] = t * b * delta[i];
    }
  }
  return d;
}

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  double h = x1 - x0, t = (x - x0) / h;
  double t2 = t * t, t3 = t2 * t;
  return y0 * (2 * t3 - 3 * t2 + 1) + h * d0 * (t3 - 2 * t2 + t) + y1 * (-2 * t3 + 3 * t2) +
         h * d1 * (t3 - t2);
}
}  // namespace

double PeriodicGraph::s_of_t(double t) const {
  double t0 = knots_t.front();
  double tw = t - t0;
  double k = std::floor(tw / period);
  double tr = tw - k * period + t0;
  auto it = std::upper_bound(knots_t.begin(), knots_t.end(), tr);
  size_t i = static_cast<size_t>(std::max<long>(0, (it - knots_t.begin()) - 1));
  if (i + 1 >= knots_t.size()) i = knots_t.size() - 2;
  double s = hermite(knots_t[i], knots_t[i + 1], knots_s[i], knots_s[i + 1], slope[i],
                     slope[i + 1], tr);
  double s_period = knots_s.back() - knots_s.front();
  return s + k * s_period;
}

double PeriodicGraph::operator()(double t) const { return y_of_s(s_of_t(t)); }

PeriodicGraph profile_to_graph(const RotationalProfile& p, int samples_per_period) {
  if (p.kenmotsu_b < 0.0)
    throw InvalidArgument("profile_to_graph: profile must come from the Kenmotsu family");
  if (p.kenmotsu_b >= 1.0)
    throw NotInvertible("profile_to_graph: x_b is not invertible for b >= 1");
  const double b = p.kenmotsu_b, h = p.kenmotsu_h;
  const double s_period = 2.0 * M_PI / h;
  const int n = samples_per_period;

  PeriodicGraph g;
  g.knots_s.resize(static_cast<size_t>(n) + 1);
  g.knots_t.resize(static_cast<size_t>(n) + 1);
  auto integrand = [=](double r) {
    return (1.0 + b * std::sin(h * r)) / std::sqrt(1.0 + b * b + 2.0 * b * std::sin(h * r));
  };
  QuadSpec qs;
  qs.abs_tol = 1e-14;
  qs.rel_tol = 1e-13;
  double acc = 0.0;
  g.knots_s[0] = 0.0;
  g.knots_t[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    double s0 = s_period * (i - 1) / n, s1 = s_period * i / n;
    acc += integrate_1d(integrand, s0, s1, qs).value;
    g.knots_s[static_cast<size_t>(i)] = s1;
    g.knots_t[static_cast<size_t>(i)] = acc;
  }
  g.period = acc;
  g.slope = monotone_slopes(g.knots_t, g.knots_s, /*periodic_derivative=*/true);
  g.y_of_s = p.y;

  // sampled inversion residual at knot midpoints (in s), folded into quad_err
  double err = 0.0, ymax_p = 0.0;
  for (int i = 0; i < n; i += std::max(1, n / 128)) {
    double sm = 0.5 * (g.knots_s[static_cast<size_t>(i)] + g.knots_s[static_cast<size_t>(i) + 1]);
    double tm = g.knots_t[static_cast<size_t>(i)] +
                integrate_1d(integrand, g.knots_s[static_cast<size_t>(i)], sm, qs).value;
    err = std::max(err, std::fabs(g.s_of_t(tm) - sm));
    ymax_p = std::max(ymax_p, std::fabs(p.yp(sm)));
  }
  g.interp_err = err * std::max(1.0, ymax_p);
  return g;
}

// ---------------------------------------------------------------------------
// SphereGraph
// ---------------------------------------------------------------------------

void SphereGraph::validate() const {
  if (ambient_dim < 2 || ambient_dim > 3)
    throw InvalidArgument("SphereGraph: ambient dim must be 2 or 3");
  std::vector<Vec> dirs = ambient_dim == 2 ? uniform_circle_points(256)
                                           : fibonacci_sphere_points(512);
  for (const Vec& d : dirs) {
    double v = psi(d);
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument("SphereGraph: psi must be positive and finite");
    if (even) {
      double w = psi(-1.0 * d);
      if (std::fabs(w - v) > 1e-10 * std::max(1.0, std::fabs(v)))
        throw InvalidArgument("SphereGraph: evenness flag set but psi(-sigma) != psi(sigma)");
    }
  }
}

SphereGraph SphereGraph::constant(int N, double R) {
  if (!(R > 0.0)) throw InvalidArgument("SphereGraph: radius must be positive");
  SphereGraph s;
  s.ambient_dim = N;
  s.psi = [R](const Vec&) { return R; };
  s.grad = [](const Vec&) { return Vec(0, 0, 0); };
  s.even = true;
  s.psi_min = s.psi_max = R;
  s.validate();
  return s;
}

SphereGraph SphereGraph::from_modes(int N, const ModeVector& mv) {
  mv.check_finite();
  SphereGraph s;
  s.ambient_dim = N;
  s.psi = [mv](const Vec& d) { return 1.0 + mv.eval_dir(d); };
  s.grad = [mv](const Vec& d) { return mv.grad_dir(d); };
  s.psi_diff = [mv](const Vec& a, const Vec& b) { return mode_diff(mv, a, b); };
  s.even = (mv.basis != ModeVector::Basis::fourier_cos);
  std::vector<Vec> dirs = N == 2 ? uniform_circle_points(512) : fibonacci_sphere_points(1024);
  double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
  for (const Vec& d : dirs) {
    double v = s.psi(d);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  s.psi_min = lo;
  s.psi_max = hi;
  if (!(hi - 1.0 < 1.0 && 1.0 - lo < 1.0))
    throw InvalidArgument("SphereGraph: perturbation norm must stay below 1");
  s.validate();
  return s;
}

SphereGraph SphereGraph::radial_fn(int N, std::function<double(const Vec&)> psi,
                                   std::function<Vec(const Vec&)> grad, bool even) {
  SphereGraph s;
  s.ambient_dim = N;
  s.psi = std::move(psi);
  s.grad = std::move(grad);
  s.even = even;
  std::vector<Vec> dirs = N == 2 ? uniform_circle_points(512) : fibonacci_sphere_points(1024);
  double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
  for (const Vec& d : dirs) {
    double v = s.psi(d);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  s.psi_min = lo;
  s.psi_max = hi;
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// SlabGraph
// ---------------------------------------------------------------------------

SlabGraph SlabGraph::constant_radius(int m, int n, double R) {
  if (!(R > 0.0)) throw InvalidArgument("SlabGraph: radius must be positive");
  if (m < 1 || n < 1) throw InvalidArgument("SlabGraph: m, n must be >= 1");
  SlabGraph s;
  s.m = m;
  s.n = n;
  s.u = [R](double) { return R; };
  s.du = [](double) { return 0.0; };
  s.period = 0.0;
  s.u_mean = s.u_min = s.u_max = R;
  s.du_max = 0.0;
  return s;
}

namespace {
// h cos h - sin h, stable at small h (leading term -h^3/3)
double hcos_minus_sin(double h) {
  if (std::fabs(h) < 1e-2) {
    double h2 = h * h;
    return -h * h2 * (1.0 / 3.0) * (1.0 - 0.1 * h2);
  }
  return h * std::cos(h) - std::sin(h);
}
}  // namespace

// cos(A) - cos(B) - (A - B) dcos/dB for A = k p, B = k r: the O((A-B)^2)
// remainder in fully multiplicative form
double cosine_taylor_rem(double k, double p, double r) {
  double h = 0.5 * k * (p - r);
  double m = 0.5 * k * (p + r);
  return 2.0 * std::sin(m) * hcos_minus_sin(h) - 2.0 * h * std::cos(m) * std::sin(h);
}

SlabGraph SlabGraph::cosine(int n, double R, double amplitude, double wavenumber) {
  if (!(R - std::fabs(amplitude) > 0.0))
    throw InvalidArgument("SlabGraph: profile must stay positive");
  if (!(wavenumber > 0.0)) throw InvalidArgument("SlabGraph: wavenumber must be positive");
  SlabGraph s;
  s.m = 1;
  s.n = n;
  s.u = [=](double t) { return R + amplitude * std::cos(wavenumber * t); };
  s.du = [=](double t) { return -amplitude * wavenumber * std::sin(wavenumber * t); };
  s.u_diff = [=](double sp, double t) {
    double p = wavenumber * sp, r = wavenumber * (sp - t);
    return -2.0 * amplitude * std::sin(0.5 * (p + r)) * std::sin(0.5 * (p - r));
  };
  s.taylor_rem = [=](double sp, double t) {
    return amplitude * cosine_taylor_rem(1.0, wavenumber * sp, wavenumber * (sp - t));
  };
  s.period = 2.0 * M_PI / wavenumber;
  s.u_mean = R;
  s.u_min = R - std::fabs(amplitude);
  s.u_max = R + std::fabs(amplitude);
  s.du_max = std::fabs(amplitude) * wavenumber;
  return s;
}

SlabGraph SlabGraph::periodic_fn(int n, std::function<double(double)> u,
                                 std::function<double(double)> du, double period) {
  if (!(period > 0.0)) throw InvalidArgument("SlabGraph: period must be positive");
  SlabGraph s;
  s.m = 1;
  s.n = n;
  s.u = std::move(u);
  s.du = std::move(du);
  s.period = period;
  const int grid = 2048;
  double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (int i = 0; i < grid; ++i) {
    double t = period * i / grid;
    double v = s.u(t);
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    dmax = std::max(dmax, std::fabs(s.du(t)));
  }
  s.u_mean = sum / grid;
  s.u_min = lo;
  s.u_max = hi;
  s.du_max = dmax;
  if (!(lo > 0.0)) throw InvalidArgument("SlabGraph: u must stay positive");
  return s;
}

void SlabGraph::check_integrability(const FracOrder& fo) const {
  // gate: int (1+|u'|) u^{n-1} (1+|t|+u)^{1-N-alpha} dt < inf. For bounded
  // periodic u the integrand decays like |t|^{1-N-alpha}; convergence in R^m
  // is exactly the condition of power_tail_bound below.
  try {
    (void)power_tail_bound(m, static_cast<double>(ambient_dim()) - 1.0 + fo.alpha, 1.0);
  } catch (const DivergentTail&) {
    throw IntegrabilityFailure("SlabGraph: integrability gate fails for this (m, n, alpha)");
  }
  if (fo.dim != ambient_dim())
    throw InvalidArgument("SlabGraph: FracOrder dimension does not match m + n");
}

// ---------------------------------------------------------------------------
// Lattice
// ---------------------------------------------------------------------------

Lattice::Lattice(int N, std::vector<Vec> basis_vectors)
    : ambient_dim(N), rank(static_cast<int>(basis_vectors.size())), basis(std::move(basis_vectors)) {
  if (N < 2 || N > 3) throw InvalidArgument("Lattice: ambient dim must be 2 or 3");
  if (rank < 1 || rank > N) throw InvalidArgument("Lattice: rank must lie in [1, N]");
  if (gram_det() <= 1e-12) throw InvalidArgument("Lattice: basis is (near-)dependent");
}

Lattice Lattice::integers(int N) { return Lattice(N, {Vec(1, 0, 0)}); }

Lattice Lattice::square(int N, int M, double spacing) {
  std::vector<Vec> b;
  for (int i = 0; i < M; ++i) {
    Vec v(0, 0, 0);
    v[i] = spacing;
    b.push_back(v);
  }
  return Lattice(N, b);
}

double Lattice::gram_det() const {
  double g[3][3] = {};
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) g[i][j] = dot(basis[static_cast<size_t>(i)], basis[static_cast<size_t>(j)]);
  if (rank == 1) return g[0][0];
  if (rank == 2) return g[0][0] * g[1][1] - g[0][1] * g[1][0];
  return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
         g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
         g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
}

namespace {
// smallest eigenvalue of the rank x rank Gram matrix (Jacobi sweeps)
double gram_lambda_min(const std::vector<Vec>& basis, int rank) {
  double a[3][3] = {};
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) a[i][j] = dot(basis[static_cast<size_t>(i)], basis[static_cast<size_t>(j)]);
  if (rank == 1) return a[0][0];
  for (int sweep = 0; sweep < 32; ++sweep) {
    for (int p = 0; p < rank; ++p)
      for (int q = p + 1; q < rank; ++q) {
        if (std::fabs(a[p][q]) < 1e-15) continue;
        double th = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
        double c = std::cos(th), s = std::sin(th);
        for (int k = 0; k < rank; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < rank; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  double lmin = a[0][0];
  for (int i = 1; i < rank; ++i) lmin = std::min(lmin, a[i][i]);
  return lmin;
}
}  // namespace

std::vector<Vec> Lattice::nonzero_points_in_ball(double R) const {
  double lmin = gram_lambda_min(basis, rank);
  if (!(lmin > 0.0)) throw InvalidArgument("Lattice: degenerate Gram matrix");
  int kb = static_cast<int>(std::ceil(R / std::sqrt(lmin))) + 1;
  struct Entry {
    double n2;
    int k[3];
    Vec p;
  };
  std::vector<Entry> entries;
  int k0lim = kb, k1lim = rank >= 2 ? kb : 0, k2lim = rank >= 3 ? kb : 0;
  for (int k0 = -k0lim; k0 <= k0lim; ++k0)
    for (int k1 = -k1lim; k1 <= k1lim; ++k1)
      for (int k2 = -k2lim; k2 <= k2lim; ++k2) {
        if (k0 == 0 && k1 == 0 && k2 == 0) continue;
        Vec p = static_cast<double>(k0) * basis[0];
        if (rank >= 2) p += static_cast<double>(k1) * basis[1];
        if (rank >= 3) p += static_cast<double>(k2) * basis[2];
        double n2 = norm2(p);
        if (n2 <= R * R * (1.0 + 1e-12)) entries.push_back({n2, {k0, k1, k2}, p});
      }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.n2 != b.n2) return a.n2 < b.n2;
    if (a.k[0] != b.k[0]) return a.k[0] < b.k[0];
    if (a.k[1] != b.k[1]) return a.k[1] < b.k[1];
    return a.k[2] < b.k[2];
  });
  std::vector<Vec> pts;
  pts.reserve(entries.size());
  for (const Entry& e : entries) pts.push_back(e.p);
  return pts;
}

double Lattice::min_nonzero_norm() const {
  double r = norm(basis[0]);
  for (int i = 1; i < rank; ++i) r = std::min(r, norm(basis[static_cast<size_t>(i)]));
  auto pts = nonzero_points_in_ball(r * (1.0 + 1e-12));
  double m = r;
  for (const Vec& p : pts) m = std::min(m, norm(p));
  return m;
}

}  // namespace fracgeo
