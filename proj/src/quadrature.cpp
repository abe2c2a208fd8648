#include "fracgeo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>

namespace fracgeo {

namespace {

// Gauss-Kronrod 7/15 pair on [-1,1] (QUADPACK abscissae, positive half).
constexpr int kGkN = 8;
constexpr double kGkNode[kGkN] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kGkWk[kGkN] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss-7 weights aligned with odd Kronrod indices (1,3,5,7)
constexpr double kGkWg[4] = {0.129484966168870, 0.279705391489277,
                             0.381830050505119, 0.417959183673469};

// nested tensor Gauss-Legendre rules for 2D/3D cells
constexpr double kGl5x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                             0.5384693101056831, 0.9061798459386640};
constexpr double kGl5w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                             0.4786286704993665, 0.2369268850561891};
constexpr double kGl8x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                             -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                             0.7966664774136267,  0.9602898564975363};
constexpr double kGl8w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};
constexpr double kGl4x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                             0.8611363115940526};
constexpr double kGl4w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                             0.3478548451374538};
constexpr double kGl6x[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                             0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr double kGl6w[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                             0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

void check_finite(double v) {
  if (!std::isfinite(v)) throw NumericError("quadrature: integrand returned a non-finite value");
}

// Kronrod-15 with embedded Gauss-7 on [a,b]; writes m sums, returns error metric.
double gk15_multi(const FnM1& f, int m, double a, double b, double* sum) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::vector<double> fv(static_cast<size_t>(m));
  std::vector<double> k15(static_cast<size_t>(m), 0.0), g7(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < kGkN; ++i) {
    const int reps = (kGkNode[i] == 0.0) ? 1 : 2;
    for (int sgn = 0; sgn < reps; ++sgn) {
      double x = c + (sgn == 0 ? h * kGkNode[i] : -h * kGkNode[i]);
      f(x, fv.data());
      for (int j = 0; j < m; ++j) {
        check_finite(fv[static_cast<size_t>(j)]);
        k15[static_cast<size_t>(j)] += kGkWk[i] * fv[static_cast<size_t>(j)];
        if (i % 2 == 1) g7[static_cast<size_t>(j)] += kGkWg[i / 2] * fv[static_cast<size_t>(j)];
      }
    }
  }
  double err = 0.0;
  for (int j = 0; j < m; ++j) {
    k15[static_cast<size_t>(j)] *= h;
    g7[static_cast<size_t>(j)] *= h;
    sum[j] = k15[static_cast<size_t>(j)];
    err = std::max(err, std::fabs(k15[static_cast<size_t>(j)] - g7[static_cast<size_t>(j)]));
  }
  return err;
}

struct Cell {
  double lo[3], hi[3];
  std::vector<double> val;
  double err;
  long seq;
};
struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const {
    if (a.err != b.err) return a.err < b.err;
    return a.seq > b.seq;  // older cell wins ties
  }
};

// generic adaptive driver over dim-dimensional cells
template <typename EvalCell>
void adapt_multi(int dim, int m, const double* lo, const double* hi, int pre_split,
                 const QuadSpec& q, EvalCell eval, double* values, double* errs) {
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
  long seq = 0;
  std::vector<double> tot(static_cast<size_t>(m), 0.0);
  double tot_err = 0.0;

  auto push_cell = [&](const double* clo, const double* chi) {
    Cell c;
    for (int d = 0; d < 3; ++d) {
      c.lo[d] = d < dim ? clo[d] : 0.0;
      c.hi[d] = d < dim ? chi[d] : 0.0;
    }
    c.val.assign(static_cast<size_t>(m), 0.0);
    c.err = eval(c.lo, c.hi, c.val.data());
    c.seq = seq++;
    for (int j = 0; j < m; ++j) tot[static_cast<size_t>(j)] += c.val[static_cast<size_t>(j)];
    tot_err += c.err;
    heap.push(std::move(c));
  };

  {  // deterministic initial partition along axis 0
    double clo[3], chi[3];
    for (int d = 0; d < dim; ++d) {
      clo[d] = lo[d];
      chi[d] = hi[d];
    }
    double w = (hi[0] - lo[0]) / pre_split;
    for (int i = 0; i < pre_split; ++i) {
      clo[0] = lo[0] + i * w;
      chi[0] = (i == pre_split - 1) ? hi[0] : lo[0] + (i + 1) * w;
      push_cell(clo, chi);
    }
  }

  auto done = [&] {
    double scale = 0.0;
    for (int j = 0; j < m; ++j) scale = std::max(scale, std::fabs(tot[static_cast<size_t>(j)]));
    return tot_err <= std::max(q.abs_tol, q.rel_tol * scale);
  };

  int splits = 0;
  while (!done()) {
    if (splits >= q.max_subdivisions) {
      double scale = 0.0;
      for (int j = 0; j < m; ++j) scale = std::max(scale, std::fabs(tot[static_cast<size_t>(j)]));
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "quadrature: subdivision budget exhausted (dim=%d err=%.3e target=%.3e "
                    "domain=[%.3g,%.3g])",
                    dim, tot_err, std::max(q.abs_tol, q.rel_tol * scale), lo[0], hi[0]);
      throw SubdivisionBudgetExceeded(msg);
    }
    Cell worst = heap.top();
    heap.pop();
    for (int j = 0; j < m; ++j) tot[static_cast<size_t>(j)] -= worst.val[static_cast<size_t>(j)];
    tot_err -= worst.err;
    // split the longest axis
    int ax = 0;
    double best = worst.hi[0] - worst.lo[0];
    for (int d = 1; d < dim; ++d)
      if (worst.hi[d] - worst.lo[d] > best) {
        best = worst.hi[d] - worst.lo[d];
        ax = d;
      }
    double mid = 0.5 * (worst.lo[ax] + worst.hi[ax]);
    if (mid <= worst.lo[ax] || mid >= worst.hi[ax])
      throw NonConvergent("quadrature: cell collapsed below machine precision");
    double clo[3], chi[3];
    for (int d = 0; d < dim; ++d) {
      clo[d] = worst.lo[d];
      chi[d] = worst.hi[d];
    }
    chi[ax] = mid;
    push_cell(clo, chi);
    clo[ax] = mid;
    chi[ax] = worst.hi[ax];
    push_cell(clo, chi);
    ++splits;
  }
  for (int j = 0; j < m; ++j) values[j] = tot[static_cast<size_t>(j)];
  if (errs) {
    // total error is a shared bound; report it for every component
    for (int j = 0; j < m; ++j) errs[j] = tot_err;
  }
}

// endpoint substitution u = (t-a)^{1-beta}; returns wrapped integrand on (0, U)
FnM1 left_transform(const FnM1& f, int m, double a, double beta, double* U, double len) {
  *U = std::pow(len, 1.0 - beta);
  double inv = 1.0 / (1.0 - beta);
  return [f, m, a, beta, inv](double u, double* out) {
    double dt = std::pow(u, inv);
    // keep the offset representable when beta is close to 1 (u^inv underflows)
    if (dt < 1e-305) dt = 1e-305;
    f(a + dt, out);
    double w = inv * std::pow(u, beta * inv);
    for (int j = 0; j < m; ++j) out[j] *= w;
  };
}

}  // namespace

void integrate_1d_multi(const FnM1& f, int m, double a, double b, const QuadSpec& q,
                        double* values, double* errs, Endpoint left, Endpoint right) {
  if (!(b > a)) {
    for (int j = 0; j < m; ++j) values[j] = 0.0;
    if (errs)
      for (int j = 0; j < m; ++j) errs[j] = 0.0;
    return;
  }
  const bool ls = left.exponent > 0.0, rs = right.exponent > 0.0;
  if (ls && rs) {
    // split at the midpoint and treat each side separately
    double mid = 0.5 * (a + b);
    std::vector<double> v1(static_cast<size_t>(m)), v2(static_cast<size_t>(m));
    std::vector<double> e1(static_cast<size_t>(m)), e2(static_cast<size_t>(m));
    QuadSpec half = q;
    half.abs_tol *= 0.5;
    integrate_1d_multi(f, m, a, mid, half, v1.data(), e1.data(), left, Endpoint{});
    integrate_1d_multi(f, m, mid, b, half, v2.data(), e2.data(), Endpoint{}, right);
    for (int j = 0; j < m; ++j) {
      values[j] = v1[static_cast<size_t>(j)] + v2[static_cast<size_t>(j)];
      if (errs) errs[j] = e1[static_cast<size_t>(j)] + e2[static_cast<size_t>(j)];
    }
    return;
  }
  if (rs) {
    // mirror so the singular end sits at the left
    FnM1 g = [&f](double t, double* out) { f(-t, out); };
    integrate_1d_multi(g, m, -b, -a, q, values, errs, right, Endpoint{});
    return;
  }
  FnM1 g = f;
  double a2 = a, b2 = b;
  if (ls) {
    if (!(left.exponent < 1.0))
      throw InvalidArgument("integrate_1d: endpoint exponent must be < 1");
    double U;
    g = left_transform(f, m, a, left.exponent, &U, b - a);
    a2 = 0.0;
    b2 = U;
  }
  auto eval = [&g, m](const double* lo, const double* hi, double* sum) {
    return gk15_multi(g, m, lo[0], hi[0], sum);
  };
  adapt_multi(1, m, &a2, &b2, 4, q, eval, values, errs);
}

EvalResult integrate_1d(const Fn1& f, double a, double b, const QuadSpec& q,
                        Endpoint left, Endpoint right) {
  FnM1 g = [&f](double t, double* out) { out[0] = f(t); };
  double v, e;
  integrate_1d_multi(g, 1, a, b, q, &v, &e, left, right);
  return EvalResult(v, e);
}

void integrate_2d_multi(const FnM2& f, int m, double ax, double bx, double ay, double by,
                        const QuadSpec& q, double* values, double* errs) {
  auto eval = [&f, m](const double* lo, const double* hi, double* sum) {
    const double cx = 0.5 * (lo[0] + hi[0]), hxw = 0.5 * (hi[0] - lo[0]);
    const double cy = 0.5 * (lo[1] + hi[1]), hyw = 0.5 * (hi[1] - lo[1]);
    std::vector<double> fv(static_cast<size_t>(m));
    std::vector<double> coarse(static_cast<size_t>(m), 0.0), fine(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        f(cx + hxw * kGl5x[i], cy + hyw * kGl5x[j], fv.data());
        for (int k = 0; k < m; ++k) {
          check_finite(fv[static_cast<size_t>(k)]);
          coarse[static_cast<size_t>(k)] += kGl5w[i] * kGl5w[j] * fv[static_cast<size_t>(k)];
        }
      }
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        f(cx + hxw * kGl8x[i], cy + hyw * kGl8x[j], fv.data());
        for (int k = 0; k < m; ++k) {
          check_finite(fv[static_cast<size_t>(k)]);
          fine[static_cast<size_t>(k)] += kGl8w[i] * kGl8w[j] * fv[static_cast<size_t>(k)];
        }
      }
    double scale = hxw * hyw, err = 0.0;
    for (int k = 0; k < m; ++k) {
      sum[k] = fine[static_cast<size_t>(k)] * scale;
      err = std::max(err, std::fabs((fine[static_cast<size_t>(k)] - coarse[static_cast<size_t>(k)]) * scale));
    }
    return err;
  };
  double lo[2] = {ax, ay}, hi[2] = {bx, by};
  adapt_multi(2, m, lo, hi, 2, q, eval, values, errs);
}

EvalResult integrate_2d(const Fn2& f, double ax, double bx, double ay, double by,
                        const QuadSpec& q) {
  FnM2 g = [&f](double x, double y, double* out) { out[0] = f(x, y); };
  double v, e;
  integrate_2d_multi(g, 1, ax, bx, ay, by, q, &v, &e);
  return EvalResult(v, e);
}

EvalResult integrate_3d(const Fn3& f, const Vec& blo, const Vec& bhi, const QuadSpec& q) {
  auto eval = [&f](const double* lo, const double* hi, double* sum) {
    double c[3], h[3];
    for (int d = 0; d < 3; ++d) {
      c[d] = 0.5 * (lo[d] + hi[d]);
      h[d] = 0.5 * (hi[d] - lo[d]);
    }
    double coarse = 0.0, fine = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          double v = f(c[0] + h[0] * kGl4x[i], c[1] + h[1] * kGl4x[j], c[2] + h[2] * kGl4x[k]);
          check_finite(v);
          coarse += kGl4w[i] * kGl4w[j] * kGl4w[k] * v;
        }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k) {
          double v = f(c[0] + h[0] * kGl6x[i], c[1] + h[1] * kGl6x[j], c[2] + h[2] * kGl6x[k]);
          check_finite(v);
          fine += kGl6w[i] * kGl6w[j] * kGl6w[k] * v;
        }
    double scale = h[0] * h[1] * h[2];
    sum[0] = fine * scale;
    return std::fabs((fine - coarse) * scale);
  };
  double lo[3] = {blo[0], blo[1], blo[2]}, hi[3] = {bhi[0], bhi[1], bhi[2]};
  double v, e;
  adapt_multi(3, 1, lo, hi, 2, q, eval, &v, &e);
  return EvalResult(v, e);
}

EvalResult integrate_line(const Fn1& f, const QuadSpec& q, double decay_exponent) {
  if (!(decay_exponent > 1.0))
    throw DivergentTail("integrate_line: decay exponent must exceed 1");
  Fn1 g = [&f](double phi) {
    double c = std::cos(phi);
    double t = std::tan(phi);
    return f(t) / (c * c);
  };
  double se = std::max(0.0, 2.0 - decay_exponent);
  return integrate_1d(g, -0.5 * M_PI, 0.5 * M_PI, q, Endpoint{se}, Endpoint{se});
}

EvalResult integrate_halfline(const Fn1& f, double a, const QuadSpec& q, double decay_exponent) {
  if (!(decay_exponent > 1.0))
    throw DivergentTail("integrate_halfline: decay exponent must exceed 1");
  Fn1 g = [&f, a](double phi) {
    double c = std::cos(phi);
    return f(a + std::tan(phi)) / (c * c);
  };
  double se = std::max(0.0, 2.0 - decay_exponent);
  return integrate_1d(g, 0.0, 0.5 * M_PI, q, Endpoint{}, Endpoint{se});
}

void integrate_periodic_multi(const FnM1& f, int m, double period, const QuadSpec& q,
                              double* values, double* errs, int n0, int nmax) {
  std::vector<double> fv(static_cast<size_t>(m));
  std::vector<double> sum(static_cast<size_t>(m), 0.0);
  int n = n0;
  for (int i = 0; i < n; ++i) {
    f(period * i / n, fv.data());
    for (int j = 0; j < m; ++j) {
      check_finite(fv[static_cast<size_t>(j)]);
      sum[static_cast<size_t>(j)] += fv[static_cast<size_t>(j)];
    }
  }
  std::vector<double> prev(static_cast<size_t>(m));
  double change = std::numeric_limits<double>::infinity();
  while (true) {
    for (int j = 0; j < m; ++j) prev[static_cast<size_t>(j)] = sum[static_cast<size_t>(j)] * period / n;
    if (2 * n > nmax) break;
    for (int i = 0; i < n; ++i) {  // new midpoints
      f(period * (2 * i + 1) / (2 * n), fv.data());
      for (int j = 0; j < m; ++j) {
        check_finite(fv[static_cast<size_t>(j)]);
        sum[static_cast<size_t>(j)] += fv[static_cast<size_t>(j)];
      }
    }
    n *= 2;
    change = 0.0;
    double scale = 0.0;
    for (int j = 0; j < m; ++j) {
      double cur = sum[static_cast<size_t>(j)] * period / n;
      change = std::max(change, std::fabs(cur - prev[static_cast<size_t>(j)]));
      scale = std::max(scale, std::fabs(cur));
    }
    if (change <= std::max(0.25 * q.abs_tol, 0.25 * q.rel_tol * scale)) break;
  }
  for (int j = 0; j < m; ++j) values[j] = sum[static_cast<size_t>(j)] * period / n;
  if (errs)
    for (int j = 0; j < m; ++j) errs[j] = std::isfinite(change) ? change : 0.0;
}

EvalResult integrate_periodic(const Fn1& f, double period, const QuadSpec& q, int n0, int nmax) {
  FnM1 g = [&f](double t, double* out) { out[0] = f(t); };
  double v, e;
  integrate_periodic_multi(g, 1, period, q, &v, &e, n0, nmax);
  return EvalResult(v, e);
}

EvalResult integrate_rect_singular(const FnSing2& fs, double ax, double bx, double ay, double by,
                                   double sx, double sy, double beta, const QuadSpec& q) {
  if (!(sx > ax && sx < bx && sy > ay && sy < by))
    throw SingularityOnBoundary("integrate_rect_singular: singular point on or outside boundary");
  if (!(beta < 2.0)) throw DivergentTail("integrate_rect_singular: beta must be < 2");
  // distance to the rectangle boundary along direction theta
  auto rho_max = [&](double th) {
    double cx = std::cos(th), cy = std::sin(th);
    double tx = std::numeric_limits<double>::infinity();
    double ty = tx;
    if (cx > 1e-300) tx = (bx - sx) / cx;
    else if (cx < -1e-300) tx = (ax - sx) / cx;
    if (cy > 1e-300) ty = (by - sy) / cy;
    else if (cy < -1e-300) ty = (ay - sy) / cy;
    return std::min(tx, ty);
  };
  Endpoint sing{std::max(0.0, beta - 1.0)};
  QuadSpec inner = q;
  inner.abs_tol = 0.1 * q.abs_tol;
  Fn1 angular = [&](double th) {
    double rmax = rho_max(th);
    double ct = std::cos(th), st = std::sin(th);
    // rho * f = rho^{1-beta} fs; the power factor stays with the quadrature
    Fn1 radial = [&](double rho) {
      return std::pow(rho, 1.0 - beta) * fs(sx + rho * ct, sy + rho * st, rho);
    };
    return integrate_1d(radial, 0.0, rmax, inner, sing).value;
  };
  // split the angular range at the corner directions
  double cs[4] = {std::atan2(ay - sy, ax - sx), std::atan2(ay - sy, bx - sx),
                  std::atan2(by - sy, ax - sx), std::atan2(by - sy, bx - sx)};
  std::vector<double> brk(cs, cs + 4);
  for (double& t : brk)
    if (t < 0.0) t += 2.0 * M_PI;
  brk.push_back(0.0);
  brk.push_back(2.0 * M_PI);
  std::sort(brk.begin(), brk.end());
  EvalResult total;
  QuadSpec outer = q;
  outer.abs_tol = q.abs_tol / 6.0;
  for (size_t i = 0; i + 1 < brk.size(); ++i) {
    if (brk[i + 1] - brk[i] < 1e-14) continue;
    total += integrate_1d(angular, brk[i], brk[i + 1], outer);
  }
  return total;
}

double power_tail_bound(int dim, double decay_exponent, double R) {
  if (!(decay_exponent > dim))
    throw DivergentTail("power_tail_bound: decay exponent must exceed dim");
  if (!(R > 0.0)) throw InvalidArgument("power_tail_bound: R must be positive");
  return sphere_measure(dim - 1) * std::pow(R, dim - decay_exponent) / (decay_exponent - dim);
}

double power_tail_integral(double p, double R) {
  if (!(p > 1.0)) throw DivergentTail("power_tail_integral: exponent must exceed 1");
  return std::pow(R, 1.0 - p) / (p - 1.0);
}

double richardson_extrapolate(const std::vector<double>& eps, const std::vector<double>& vals,
                              double q, double* err) {
  const size_t n = eps.size();
  if (n != vals.size() || n < 2)
    throw InvalidArgument("richardson_extrapolate: need >= 2 matching samples");
  for (size_t k = 0; k + 1 < n; ++k)
    if (!(eps[k + 1] < eps[k]) || !(eps[k + 1] > 0.0))
      throw InvalidArgument("richardson_extrapolate: eps must be positive decreasing");
  // Sequential single-exponent elimination. After each column the residual of
  // entry k stays proportional to eps_k^{p_j} for geometric schedules, so the
  // next column combines adjacent entries with those adjacent ratios.
  const size_t max_col = std::min<size_t>(n - 1, 3);
  std::vector<std::vector<double>> tab(max_col + 1);
  tab[0] = vals;
  for (size_t j = 1; j <= max_col; ++j) {
    double p = q + static_cast<double>(j - 1);
    tab[j].resize(n - j);
    for (size_t k = 0; k + j < n; ++k) {
      double ra = std::pow(eps[k], p), rb = std::pow(eps[k + 1], p);
      tab[j][k] = (ra * tab[j - 1][k + 1] - rb * tab[j - 1][k]) / (ra - rb);
    }
  }
  double result = tab[max_col].back();
  double prev = (tab[max_col].size() >= 2) ? tab[max_col][tab[max_col].size() - 2]
                                           : tab[max_col - 1].back();
  double corr = std::fabs(result - prev) + std::fabs(result - tab[max_col - 1].back());
  if (err) *err = corr + 1e-15 * std::fabs(result);
  return result;
}

EvalResult pv_radial(const Fn1& shell, double r_max, const FracOrder& fo, const QuadSpec& q,
                     Endpoint) {
  q.validate();
  const std::vector<double>& eps = q.pv_excision;
  if (!(eps.front() < r_max))
    throw InvalidArgument("pv_radial: excision radii must stay below the outer radius");
  const size_t L = eps.size();
  QuadSpec seg = q;
  seg.abs_tol = q.abs_tol / (3.0 * static_cast<double>(L));
  seg.rel_tol = q.rel_tol * 0.25;
  std::vector<double> I(L), qe(L);
  EvalResult outer = integrate_1d(shell, eps[0], r_max, seg);
  I[0] = outer.value;
  qe[0] = outer.quad_err;
  for (size_t k = 1; k < L; ++k) {
    EvalResult ring = integrate_1d(shell, eps[k], eps[k - 1], seg);
    I[k] = I[k - 1] + ring.value;
    qe[k] = qe[k - 1] + ring.quad_err;
  }
  double ext_err = 0.0;
  double v = richardson_extrapolate(eps, I, std::min(1.0, 1.0 - fo.alpha), &ext_err);
  if (!std::isfinite(v)) throw NonConvergent("pv_radial: extrapolation failed");
  // Cauchy sanity on the excision sequence
  double seq_scale = 0.0;
  for (double x : I) seq_scale = std::max(seq_scale, std::fabs(x));
  if (std::fabs(I[L - 1] - I[L - 2]) >
      64.0 * (std::fabs(I[1] - I[0]) + qe[L - 1] + q.abs_tol) + 1e-12 * seq_scale)
    throw NonConvergent("pv_radial: excision values do not Cauchy-converge");
  return EvalResult(v, ext_err + qe[L - 1]);
}

EvalResult pv_angular(const FnM1& section1, const FnM2& section2, int levels,
                      const ParamBox& box, const FracOrder& fo, const QuadSpec& q) {
  q.validate();
  if (static_cast<size_t>(levels) != q.pv_excision.size())
    throw InvalidArgument("pv_angular: level count must match the excision schedule");
  std::vector<double> I(static_cast<size_t>(levels)), qe(static_cast<size_t>(levels));
  QuadSpec sub = q;
  sub.abs_tol = q.abs_tol / 3.0;
  sub.rel_tol = q.rel_tol * 0.5;
  if (box.dim == 1) {
    integrate_1d_multi(section1, levels, box.lo[0], box.hi[0], sub, I.data(), qe.data());
  } else if (box.dim == 2) {
    integrate_2d_multi(section2, levels, box.lo[0], box.hi[0], box.lo[1], box.hi[1], sub,
                       I.data(), qe.data());
  } else {
    throw InvalidArgument("pv_angular: box dim must be 1 or 2");
  }
  double ext_err = 0.0;
  double v = richardson_extrapolate(q.pv_excision, I, std::min(1.0, 1.0 - fo.alpha), &ext_err);
  if (!std::isfinite(v)) throw NonConvergent("pv_angular: extrapolation failed");
  return EvalResult(v, ext_err + qe.back());
}

}  // namespace fracgeo
