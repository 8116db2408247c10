#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace spaceform {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelViolation : GeometryError {
  using GeometryError::GeometryError;
};

struct AntipodalPoints : GeometryError {
  using GeometryError::GeometryError;
};

struct OnFocalSet : GeometryError {
  using GeometryError::GeometryError;
};

struct RankDeficient : GeometryError {
  using GeometryError::GeometryError;
};

struct ContinuationStalled : GeometryError {
  using GeometryError::GeometryError;
};

struct EmptyNearestSet : GeometryError {
  using GeometryError::GeometryError;
};

struct UnknownEntry : GeometryError {
  using GeometryError::GeometryError;
};

struct ExcludedBasePoint : GeometryError {
  using GeometryError::GeometryError;
};

// All tolerances are configuration values, never hard-coded in the math.
struct Tolerances {
  double model = 1e-9;      // model-surface residency
  double antipode = 1e-6;   // exclusion radius around antipodes (c > 0)
  double focal = 1e-7;      // focal-set detection for project_W (c > 0)
  double rank = 1e-6;       // relative singular-value cutoff
  double predicate = 1e-6;  // verdict threshold for (A)/(B)/(C)
  double fiber = 1e-6;      // allowed distance spread along a walked fiber
  double level = 1e-5;      // level-set constancy
  double fd_step = 1e-5;    // base finite-difference step
  double fiber_step = 1e-2; // predictor step of the fiber walk
  int max_iter = 50;        // corrector / Gauss-Newton iteration cap
  int multistart = 32;      // optimizer restarts per search
  double search_radius = 30.0; // chart half-width over noncompact W
};

// Complete simply connected n-manifold of constant curvature c.
// Ambient coordinates: R^n for c = 0, R^{n+1} otherwise; for c < 0 the
// ambient bilinear form is Minkowski with the time coordinate first.
class SpaceForm {
 public:
  SpaceForm(int n, double c) : n_(n), c_(c) {
    if (n < 2) throw GeometryError("SpaceForm: dimension must be >= 2");
  }

  int n() const { return n_; }
  double c() const { return c_; }
  int ambient_dim() const { return c_ == 0.0 ? n_ : n_ + 1; }
  bool curved() const { return c_ != 0.0; }
  double sqrt_abs_c() const { return std::sqrt(std::abs(c_)); }

  // Ambient bilinear form.
  double form(const Vec& a, const Vec& b) const {
    double s = a.dot(b);
    if (c_ < 0.0) s -= 2.0 * a[0] * b[0];
    return s;
  }

  // Norm of a spacelike vector.
  double norm(const Vec& a) const {
    double g = form(a, a);
    if (g < 0.0) {
      if (g > -1e-12) return 0.0;
      throw ModelViolation("norm of a non-spacelike vector");
    }
    return std::sqrt(g);
  }

  std::optional<double> injectivity_bound() const {
    if (c_ > 0.0) return M_PI / std::sqrt(c_);
    return std::nullopt;
  }

  bool operator==(const SpaceForm& o) const { return n_ == o.n_ && c_ == o.c_; }

 private:
  int n_;
  double c_;
};

struct Point {
  Vec x;
};

struct TangentVector {
  Point base;
  Vec v;
};

inline double clamp_to(double value, double lo, double hi, double slack,
                       const char* what) {
  if (value < lo) {
    if (value < lo - slack) throw ModelViolation(what);
    return lo;
  }
  if (value > hi) {
    if (value > hi + slack) throw ModelViolation(what);
    return hi;
  }
  return value;
}

// Rescales ambient coordinates back onto the model surface.
inline Point normalize_to_model(const SpaceForm& M, Vec x) {
  if (M.c() > 0.0) {
    double r = x.norm();
    if (r == 0.0) throw ModelViolation("cannot normalize the zero vector");
    x /= r * std::sqrt(M.c());
  } else if (M.c() < 0.0) {
    double g = M.c() * M.form(x, x);
    if (g <= 0.0) throw ModelViolation("vector is not timelike");
    x /= std::sqrt(g);
    if (x[0] < 0.0) x = -x;
  }
  return Point{std::move(x)};
}

inline double model_residual(const SpaceForm& M, const Vec& x) {
  if (M.c() == 0.0) return 0.0;
  return std::abs(M.form(x, x) - 1.0 / M.c());
}

inline Point make_point(const SpaceForm& M, Vec x,
                        const Tolerances& tol = {}) {
  if (x.size() != M.ambient_dim())
    throw ModelViolation("point has wrong ambient dimension");
  if (M.c() != 0.0) {
    if (model_residual(M, x) > 1e3 * tol.model)
      throw ModelViolation("coordinates are off the model surface");
    if (M.c() < 0.0 && x[0] <= 0.0)
      throw ModelViolation("point is not on the upper sheet");
    return normalize_to_model(M, std::move(x));
  }
  return Point{std::move(x)};
}

inline TangentVector make_tangent(const SpaceForm& M, const Point& p, Vec v,
                                  const Tolerances& tol = {}) {
  if (M.curved()) {
    double a = M.form(p.x, v);
    if (std::abs(a) > 1e3 * tol.model)
      throw ModelViolation("vector is not tangent at its base point");
    v -= M.c() * a * p.x;  // re-project exactly
  }
  return TangentVector{p, std::move(v)};
}

// Tangent projection of an arbitrary ambient vector at p.
inline Vec project_to_tangent(const SpaceForm& M, const Point& p,
                              const Vec& w) {
  if (!M.curved()) return w;
  return w - M.c() * M.form(w, p.x) * p.x;
}

// splitmix64: cheap deterministic stream derivation for per-sample RNGs.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace spaceform
