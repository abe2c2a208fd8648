#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracgeo {

// ----------------------------------------------------------------------------
// Error hierarchy. Numerical failures are exceptions; callers that can retry
// with a coarser tolerance catch NumericError, everything else is a usage bug.
// ----------------------------------------------------------------------------

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

#define FRACGEO_ERROR(Name, Base)                              \
  class Name : public Base {                                   \
   public:                                                     \
    explicit Name(const std::string& w = #Name) : Base(w) {}   \
  }

FRACGEO_ERROR(NonConvergent, NumericError);
FRACGEO_ERROR(SubdivisionBudgetExceeded, NumericError);
FRACGEO_ERROR(NewtonDiverged, NumericError);
FRACGEO_ERROR(StepTooLarge, NumericError);
FRACGEO_ERROR(NoSignChange, NumericError);

FRACGEO_ERROR(SingularityOnBoundary, InvalidArgument);
FRACGEO_ERROR(DivergentTail, InvalidArgument);
FRACGEO_ERROR(DivergentSum, InvalidArgument);
FRACGEO_ERROR(DivergentInteraction, InvalidArgument);
FRACGEO_ERROR(NotInvertible, InvalidArgument);
FRACGEO_ERROR(OnBoundary, InvalidArgument);
FRACGEO_ERROR(Overlap, InvalidArgument);
FRACGEO_ERROR(IntegrabilityFailure, InvalidArgument);
FRACGEO_ERROR(NotTangent, InvalidArgument);
FRACGEO_ERROR(DegenerateProfile, InvalidArgument);

#undef FRACGEO_ERROR

// ----------------------------------------------------------------------------
// FracOrder: ambient dimension N >= 2 and fractional order alpha in (0,1),
// strictly. Every kernel |z|^{-N-alpha} in the library reads its exponents
// from here.
// ----------------------------------------------------------------------------

struct FracOrder {
  int dim;
  double alpha;

  FracOrder(int dim_, double alpha_) : dim(dim_), alpha(alpha_) {
    if (dim < 2) throw InvalidArgument("FracOrder: dim must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0) || !std::isfinite(alpha))
      throw InvalidArgument("FracOrder: alpha must lie strictly in (0,1)");
  }

  // kernel exponent N + alpha
  double s() const { return static_cast<double>(dim) + alpha; }
};

// ----------------------------------------------------------------------------
// QuadSpec: tolerances, PV excision schedule, truncation radius and the
// subdivision budget shared by all singular integrals.
// ----------------------------------------------------------------------------

struct QuadSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  std::vector<double> pv_excision;  // strictly decreasing radii, length >= 3
  double trunc_radius = 50.0;
  int max_subdivisions = 40000;

  QuadSpec() : pv_excision(default_excision()) {}

  static std::vector<double> default_excision() {
    // geometric schedule 0.1 * 2^-k, six levels
    std::vector<double> eps;
    double e = 0.1;
    for (int k = 0; k < 6; ++k, e *= 0.5) eps.push_back(e);
    return eps;
  }

  static QuadSpec defaults() { return QuadSpec{}; }

  void validate() const {
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol) ||
        !(abs_tol > 0.0) || !std::isfinite(abs_tol))
      throw InvalidArgument("QuadSpec: tolerances must be finite and positive");
    if (pv_excision.size() < 3)
      throw InvalidArgument("QuadSpec: excision schedule needs >= 3 levels");
    double prev = trunc_radius;
    for (double e : pv_excision) {
      if (!(e > 0.0) || !(e < prev))
        throw InvalidArgument("QuadSpec: excision radii must be positive, strictly "
                              "decreasing and below trunc_radius");
      prev = e;
    }
    if (!(trunc_radius > 0.0)) throw InvalidArgument("QuadSpec: trunc_radius must be positive");
    if (max_subdivisions < 8) throw InvalidArgument("QuadSpec: max_subdivisions too small");
  }

  // Tighter spec used by solver re-validation and convergence studies:
  // tolerances scaled down and one extra excision level appended.
  QuadSpec refined(double factor = 0.1) const {
    QuadSpec r = *this;
    r.rel_tol *= factor;
    r.abs_tol *= factor;
    r.pv_excision.push_back(r.pv_excision.back() * 0.5);
    return r;
  }

  QuadSpec with_tols(double rel, double abs) const {
    QuadSpec r = *this;
    r.rel_tol = rel;
    r.abs_tol = abs;
    return r;
  }

  QuadSpec with_trunc(double R) const {
    QuadSpec r = *this;
    r.trunc_radius = R;
    return r;
  }
};

// ----------------------------------------------------------------------------
// EvalResult: a value with an estimated quadrature error and a rigorous-style
// bound on truncated mass. Errors are additive under composition.
// ----------------------------------------------------------------------------

struct EvalResult {
  double value = 0.0;
  double quad_err = 0.0;
  double tail_err = 0.0;

  EvalResult() = default;
  EvalResult(double v, double qe, double te = 0.0) : value(v), quad_err(qe), tail_err(te) {
    check();
  }

  void check() const {
    if (!std::isfinite(value) || !std::isfinite(quad_err) || !std::isfinite(tail_err) ||
        quad_err < 0.0 || tail_err < 0.0)
      throw NumericError("EvalResult: non-finite value or negative error field");
  }

  double total_err() const { return quad_err + tail_err; }

  EvalResult& operator+=(const EvalResult& o) {
    value += o.value;
    quad_err += o.quad_err;
    tail_err += o.tail_err;
    return *this;
  }
  EvalResult& operator-=(const EvalResult& o) {
    value -= o.value;
    quad_err += o.quad_err;
    tail_err += o.tail_err;
    return *this;
  }
  EvalResult& operator*=(double c) {
    value *= c;
    quad_err *= std::fabs(c);
    tail_err *= std::fabs(c);
    return *this;
  }
  friend EvalResult operator+(EvalResult a, const EvalResult& b) { return a += b; }
  friend EvalResult operator-(EvalResult a, const EvalResult& b) { return a -= b; }
  friend EvalResult operator*(double c, EvalResult a) { return a *= c; }
};

}  // namespace fracgeo
