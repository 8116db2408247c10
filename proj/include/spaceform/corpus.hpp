#pragma once

#include "spaceform/checkers.hpp"

#include <map>
#include <string>
#include <vector>

namespace spaceform::corpus {

// ---------------------------------------------------------------------------
// Half-space <-> hyperboloid conversion for H^3 (c = -1).
//
// Upper half-space (x, y, z), z > 0, maps to the hyperboloid in R^{3,1} with
// the time coordinate first.  Round-trip tested in the corpus suite so the
// half-space formulas of the hyperbolic cylinder example stay quotable.

inline Vec halfspace_to_hyperboloid(double x, double y, double z) {
  double S = x * x + y * y + z * z;
  Vec X(4);
  X << (S + 1.0) / (2.0 * z), x / z, y / z, (S - 1.0) / (2.0 * z);
  return X;
}

inline Eigen::Vector3d hyperboloid_to_halfspace(const Vec& X) {
  double z = 1.0 / (X[0] - X[3]);
  return {X[1] * z, X[2] * z, z};
}

// ---------------------------------------------------------------------------
// One-sided smooth bump functions for the cone/cylinder curve.

inline double bump_neg(double t) {  // > 0 for t < 0, flat zero for t >= 0
  return t < 0.0 ? std::exp(1.0 / t) : 0.0;
}
inline double bump_neg_prime(double t) {
  return t < 0.0 ? -std::exp(1.0 / t) / (t * t) : 0.0;
}
inline double bump_pos(double t) { return bump_neg(-t); }
inline double bump_pos_prime(double t) { return -bump_neg_prime(-t); }

// ---------------------------------------------------------------------------
// Corpus entries

enum class Outcome { Holds, Fails, NotApplicable };

struct ExpectedCheck {
  std::string predicate;      // "submersion" | "A" | "B" | "C" |
                              // "level-constant" | "theorem-1-3"
  Outcome outcome;
  std::vector<Vec> at_params; // empty: over the default sample plan
};

struct CorpusEntry {
  std::string id;
  SpaceForm space;
  TotallyGeodesic W;
  ImmersedPatch patch;
  std::vector<ExpectedCheck> expected;
  std::string notes;
  std::optional<Vec> busemann_xi;    // for horosphere entries
  std::optional<double> level_value; // expected constant level, when any
};

namespace detail {

inline Vec vparams(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline CorpusEntry make_ex_4_1() {
  SpaceForm M(3, 0.0);
  Vec o = Vec::Zero(3);
  Mat dir(3, 1);
  dir << 0, 0, 1;
  auto W = TotallyGeodesic::affine(M, Point{o}, dir);
  Box box{vparams({0.6, 0.0}), vparams({1.4, 6.2831853071795864})};
  ImmersedPatch patch(M, 2, box, [](const Vec& u) -> Vec {
    Vec p(3);
    p << u[0] * std::cos(u[1]), u[0] * std::sin(u[1]), 0.0;
    return p;
  });
  patch.set_analytic_jacobian([](const Vec& u) -> Mat {
    Mat J(3, 2);
    J << std::cos(u[1]), -u[0] * std::sin(u[1]),
         std::sin(u[1]), u[0] * std::cos(u[1]),
         0.0, 0.0;
    return J;
  });
  CorpusEntry e{"ex-4.1-annulus", M, W, patch, {}, "", {}, {}};
  e.notes = "planar annulus inside one fiber of the projection to the axis";
  e.expected.push_back({"submersion", Outcome::Fails, {}});
  e.expected.push_back({"A", Outcome::NotApplicable, {}});
  e.expected.push_back({"B", Outcome::Fails, {}});
  e.expected.push_back({"C", Outcome::Fails, {}});
  return e;
}

inline CorpusEntry make_ex_4_2() {
  SpaceForm M(3, 0.0);
  Vec o = Vec::Zero(3);
  Mat dir(3, 1);
  dir << 0, 0, 1;
  auto W = TotallyGeodesic::affine(M, Point{o}, dir);
  Box box{vparams({-0.45}), vparams({0.45})};
  auto beta = [](const Vec& u) -> Vec {
    double t = u[0];
    double nu = bump_neg(t), mu = bump_pos(t);
    Vec p(3);
    p << std::cos(t) - nu * std::cos(t),
         std::sin(t) - nu * std::sin(t),
         nu - mu;
    return p;
  };
  ImmersedPatch patch(M, 1, box, beta);
  patch.set_analytic_jacobian([](const Vec& u) -> Mat {
    double t = u[0];
    double nu = bump_neg(t), nup = bump_neg_prime(t);
    double mup = bump_pos_prime(t);
    Mat J(3, 1);
    J << -std::sin(t) * (1.0 - nu) - nup * std::cos(t),
         std::cos(t) * (1.0 - nu) - nup * std::sin(t),
         nup - mup;
    return J;
  });
  CorpusEntry e{"ex-4.2-cone-cylinder", M, W, patch, {}, "", {}, {}};
  e.notes = "curve crossing from a cone to a cylinder of axis W";
  e.expected.push_back({"B", Outcome::Holds, {}});
  e.expected.push_back(
      {"B", Outcome::Holds, {vparams({-0.3}), vparams({0.3})}});
  e.expected.push_back({"submersion", Outcome::Fails, {vparams({0.0})}});
  e.expected.push_back(
      {"submersion", Outcome::Holds, {vparams({-0.3}), vparams({0.3})}});
  return e;
}

inline CorpusEntry make_ex_4_3() {
  SpaceForm M(3, -1.0);
  Mat span(4, 2);
  span.col(0) = Vec::Unit(4, 0);  // timelike
  span.col(1) = Vec::Unit(4, 3);  // image of the vertical axis
  auto W = TotallyGeodesic::spanning(M, span);
  // theta in [0, 2pi), halfspace height z in (0, 0.8]: the strip of the
  // cylinder where no normal geodesic reaches the axis.
  Box box{vparams({0.0, 0.1}), vparams({6.2831853071795864, 0.8})};
  ImmersedPatch patch(M, 2, box, [](const Vec& u) -> Vec {
    return halfspace_to_hyperboloid(std::cos(u[0]), std::sin(u[0]), u[1]);
  });
  CorpusEntry e{"ex-4.3-hyperbolic-cylinder", M, W, patch, {}, "", {}, {}};
  e.notes = "unit Euclidean cylinder around a vertical axis of H^3, "
            "converted from the half-space model";
  e.expected.push_back({"submersion", Outcome::Holds, {}});
  e.expected.push_back({"A", Outcome::Holds, {}});
  e.expected.push_back({"B", Outcome::Fails, {}});
  e.expected.push_back({"C", Outcome::Holds, {}});
  return e;
}

inline CorpusEntry make_ex_4_4() {
  SpaceForm M(3, 1.0);
  Mat span(4, 2);
  span.col(0) = Vec::Unit(4, 0);
  span.col(1) = Vec::Unit(4, 1);
  auto W = TotallyGeodesic::spanning(M, span);  // great circle in S^2
  // cap of geodesic radius 0.4 in S^2 = {x4 = 0}, centered at distance 0.6
  // from W, clear of both W and the focal set
  double d0 = 0.6;
  Vec center(4);
  center << std::cos(d0), 0.0, std::sin(d0), 0.0;
  Vec E1(4), E2(4);
  E1 << -std::sin(d0), 0.0, std::cos(d0), 0.0;  // meridian direction
  E2 << 0.0, 1.0, 0.0, 0.0;
  Box box{vparams({-0.28, -0.28}), vparams({0.28, 0.28})};
  ImmersedPatch patch(M, 2, box, [center, E1, E2](const Vec& u) -> Vec {
    double r = std::hypot(u[0], u[1]);
    if (r < 1e-300) return center;
    Vec dir = (u[0] * E1 + u[1] * E2) / r;
    return std::cos(r) * center + std::sin(r) * dir;
  });
  CorpusEntry e{"ex-4.4-sphere-cap", M, W, patch, {}, "", {}, {}};
  e.notes = "open cap of the equatorial S^2 inside S^3";
  e.expected.push_back({"submersion", Outcome::Holds, {}});
  e.expected.push_back({"C", Outcome::Holds, {}});
  e.expected.push_back({"A", Outcome::Fails, {}});
  return e;
}

inline CorpusEntry make_ex_4_5() {
  SpaceForm M(4, 0.0);
  Vec o = Vec::Zero(4);
  Mat dirs(4, 2);
  dirs.setZero();
  dirs(2, 0) = 1.0;
  dirs(3, 1) = 1.0;
  auto W = TotallyGeodesic::affine(M, Point{o}, dirs);
  Box box{vparams({-1.5, -3.0}), vparams({1.5, 3.0})};
  ImmersedPatch patch(M, 2, box, [](const Vec& u) -> Vec {
    Vec p(4);
    p << u[0], u[1], std::exp(u[0]) * std::cos(u[1]),
        std::exp(u[0]) * std::sin(u[1]);
    return p;
  });
  patch.set_analytic_jacobian([](const Vec& u) -> Mat {
    double ex = std::exp(u[0]);
    Mat J(4, 2);
    J << 1, 0,
         0, 1,
         ex * std::cos(u[1]), -ex * std::sin(u[1]),
         ex * std::sin(u[1]), ex * std::cos(u[1]);
    return J;
  });
  // the parameter plane is punctured at the origin
  patch.set_exclusion(
      [](const Vec& u) { return u.norm() < 1e-3; }, 1e-3);
  CorpusEntry e{"ex-4.5-exp-graph", M, W, patch, {}, "", {}, {}};
  e.notes = "graph of the complex exponential over a punctured plane in R^4";
  e.expected.push_back({"submersion", Outcome::Holds, {}});
  e.expected.push_back({"B", Outcome::Holds, {}});
  e.expected.push_back({"C", Outcome::Holds, {}});
  e.expected.push_back({"A", Outcome::Holds, {}});
  return e;
}

inline CorpusEntry make_round_sphere() {
  SpaceForm M(3, 0.0);
  Vec p(3);
  p << 0.2, -0.1, 0.3;
  auto W = TotallyGeodesic::affine(M, Point{p}, Mat(3, 0));  // single point
  double r = 1.3;
  Box box{vparams({0.2, 0.0}), vparams({2.9415926535897932,
                                        6.2831853071795864})};
  ImmersedPatch patch(M, 2, box, [p, r](const Vec& u) -> Vec {
    Vec q(3);
    q << p[0] + r * std::sin(u[0]) * std::cos(u[1]),
         p[1] + r * std::sin(u[0]) * std::sin(u[1]),
         p[2] + r * std::cos(u[0]);
    return q;
  });
  CorpusEntry e{"classic-round-sphere", M, W, patch, {}, "", {}, {}};
  e.notes = "round sphere of radius 1.3 about a fixed point";
  e.level_value = r;
  e.expected.push_back({"submersion", Outcome::Holds, {}});
  e.expected.push_back({"B", Outcome::Holds, {}});
  e.expected.push_back({"A", Outcome::Holds, {}});
  e.expected.push_back({"level-constant", Outcome::Holds, {}});
  return e;
}

inline CorpusEntry make_horosphere_h3() {
  SpaceForm M(3, -1.0);
  Vec o = Vec::Unit(4, 0);
  Vec u3 = Vec::Unit(4, 3);
  Vec xi = o + u3;  // null, <o, xi> = -1
  // horosphere through o: x(v) = o + v + (|v|^2/2) xi with v in span{e1, e2}
  Box box{detail::vparams({-1.0, -1.0}), detail::vparams({1.0, 1.0})};
  ImmersedPatch patch(M, 2, box, [o, xi](const Vec& v) -> Vec {
    Vec w = Vec::Zero(4);
    w[1] = v[0];
    w[2] = v[1];
    return o + w + 0.5 * v.squaredNorm() * xi;
  });
  // a W is still required by the entry layout; use the axis toward xi
  Mat span(4, 2);
  span.col(0) = Vec::Unit(4, 0);
  span.col(1) = Vec::Unit(4, 3);
  auto W = TotallyGeodesic::spanning(M, span);
  CorpusEntry e{"horosphere-h3", M, W, patch, {}, "", {}, {}};
  e.notes = "horosphere of H^3 through the base point";
  e.busemann_xi = xi;
  e.expected.push_back({"theorem-1-3", Outcome::Holds, {}});
  return e;
}

}  // namespace detail

inline std::vector<std::string> all_ids() {
  return {"ex-4.1-annulus",       "ex-4.2-cone-cylinder",
          "ex-4.3-hyperbolic-cylinder", "ex-4.4-sphere-cap",
          "ex-4.5-exp-graph",     "classic-round-sphere",
          "horosphere-h3"};
}

inline CorpusEntry entry(const std::string& id) {
  if (id == "ex-4.1-annulus") return detail::make_ex_4_1();
  if (id == "ex-4.2-cone-cylinder") return detail::make_ex_4_2();
  if (id == "ex-4.3-hyperbolic-cylinder") return detail::make_ex_4_3();
  if (id == "ex-4.4-sphere-cap") return detail::make_ex_4_4();
  if (id == "ex-4.5-exp-graph") return detail::make_ex_4_5();
  if (id == "classic-round-sphere") return detail::make_round_sphere();
  if (id == "horosphere-h3") return detail::make_horosphere_h3();
  throw UnknownEntry("no corpus entry named '" + id + "'");
}

// Closed-form intersection of the exp-graph with the normal plane through
// (0, 0, alpha, beta): parameters (log sqrt(a^2+b^2), theta + 2 k pi).
inline std::vector<Vec> fiber_intersection_4_5(double alpha, double beta,
                                               int k_max = 3) {
  double r2 = alpha * alpha + beta * beta;
  if (r2 == 0.0)
    throw ExcludedBasePoint("base point (0,0) is excluded");
  if (alpha == 1.0 && beta == 0.0)
    throw ExcludedBasePoint("base point (1,0) is excluded");
  double x = 0.5 * std::log(r2);
  double theta = std::atan2(beta, alpha);
  std::vector<Vec> out;
  for (int k = -k_max; k <= k_max; ++k) {
    Vec u(2);
    u << x, theta + 2.0 * M_PI * k;
    out.push_back(u);
  }
  return out;
}

}  // namespace spaceform::corpus
