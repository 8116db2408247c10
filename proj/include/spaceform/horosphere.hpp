#pragma once

#include "spaceform/checkers.hpp"

namespace spaceform {

// Point of the ideal boundary of a hyperbolic space form, stored as a
// future-pointing null vector normalized against a base point o so that
// <o, xi> = -1.  The normalization pins the additive gauge of the Busemann
// function: h(o) = 0.
struct IdealPoint {
  Vec xi;
};

namespace detail {

inline void require_hyperbolic(const SpaceForm& M, const char* what) {
  if (M.c() >= 0.0)
    throw GeometryError(std::string(what) + " requires negative curvature");
}

}  // namespace detail

// Ideal endpoint of the unit-speed ray from o with initial direction u.
inline IdealPoint ideal_from_ray(const SpaceForm& M, const Point& o,
                                 const TangentVector& u) {
  detail::require_hyperbolic(M, "ideal_from_ray");
  double s = M.sqrt_abs_c();
  double nu = M.norm(u.v);
  if (nu < 1e-300) throw GeometryError("ray direction is degenerate");
  Vec xi = s * s * (o.x + u.v / (s * nu));
  return IdealPoint{xi};
}

// Normalizes a raw null vector against the base point o.
inline IdealPoint make_ideal(const SpaceForm& M, const Vec& xi_raw,
                             const Point& o, const Tolerances& tol = {}) {
  detail::require_hyperbolic(M, "make_ideal");
  double null_defect = std::abs(M.form(xi_raw, xi_raw));
  if (null_defect > tol.model * std::max(1.0, xi_raw.squaredNorm()))
    throw ModelViolation("ideal point must be a null vector");
  if (xi_raw[0] <= 0.0)
    throw ModelViolation("ideal point must be future pointing");
  double g = M.form(o.x, xi_raw);
  if (g >= 0.0) throw ModelViolation("base point pairs incorrectly with xi");
  return IdealPoint{xi_raw / (-g)};
}

// Busemann function of the ray from o toward xi:
//   h(x) = (1 / sqrt(-c)) log(-<x, xi>),  h(o) = 0,
// decreasing toward xi.  Limit of d(x, alpha(t)) - t.
inline double busemann(const SpaceForm& M, const Point& x,
                       const IdealPoint& xi) {
  detail::require_hyperbolic(M, "busemann");
  double g = -M.form(x.x, xi.xi);
  if (g <= 0.0) throw ModelViolation("point pairs incorrectly with xi");
  return std::log(g) / M.sqrt_abs_c();
}

// The unit tangent at p pointing down the Busemann gradient, i.e. the initial
// direction of the unique ray from p asymptotic to xi.
inline TangentVector asymptotic_direction(const SpaceForm& M, const Point& p,
                                          const IdealPoint& xi) {
  detail::require_hyperbolic(M, "asymptotic_direction");
  Vec w = project_to_tangent(M, p, xi.xi);
  double nw = M.norm(w);
  if (nw < 1e-300)
    throw GeometryError("asymptotic direction is degenerate");
  return TangentVector{p, w / nw};
}

struct Theorem13Report {
  bool hypothesis_holds = false;   // max_residual < tol.predicate
  bool level_constant = false;     // busemann spread < tol.level
  bool consistent = true;          // hypothesis => conclusion, never violated
  double max_residual = 0.0;
  double spread = 0.0;
  double level = 0.0;              // median Busemann value
  int samples = 0;
};

// Containment-in-a-horosphere check: the hypothesis residual per sample is
// the tangential component of the asymptotic direction (zero iff the
// asymptotic ray leaves orthogonally), the conclusion is constancy of the
// Busemann function over the patch.
inline Theorem13Report check_theorem_1_3(const ImmersedPatch& patch,
                                         const IdealPoint& xi,
                                         const SamplePlan& plan,
                                         const Tolerances& tol = {}) {
  const SpaceForm& M = patch.space();
  detail::require_hyperbolic(M, "check_theorem_1_3");
  Theorem13Report rep;
  std::vector<Vec> samples = sample_parameters(patch, plan);
  rep.samples = static_cast<int>(samples.size());
  if (samples.empty()) return rep;

  std::vector<double> values;
  values.reserve(samples.size());
  for (const Vec& u : samples) {
    FrameAtPoint fr = frame_at(patch, u, tol);
    TangentVector eta = asymptotic_direction(M, fr.point, xi);
    double r2 = 0.0;
    for (int i = 0; i < fr.tangent.cols(); ++i) {
      double a = M.form(eta.v, fr.tangent.col(i));
      r2 += a * a;
    }
    rep.max_residual = std::max(rep.max_residual, std::sqrt(r2));
    values.push_back(busemann(M, fr.point, xi));
  }
  auto mm = std::minmax_element(values.begin(), values.end());
  rep.spread = *mm.second - *mm.first;
  std::nth_element(values.begin(), values.begin() + values.size() / 2,
                   values.end());
  rep.level = values[values.size() / 2];
  rep.hypothesis_holds = rep.max_residual < tol.predicate;
  rep.level_constant = rep.spread < tol.level;
  rep.consistent = !(rep.hypothesis_holds && !rep.level_constant);
  return rep;
}

}  // namespace spaceform
