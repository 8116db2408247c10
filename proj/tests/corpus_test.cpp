#include "spaceform/corpus.hpp"

#include <gtest/gtest.h>

using namespace spaceform;

namespace {

Vec vp(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(ModelConversion, HalfspaceRoundTrip) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  std::uniform_real_distribution<double> up(0.05, 5.0);
  SpaceForm M(3, -1.0);
  for (int i = 0; i < 200; ++i) {
    double x = uni(rng), y = uni(rng), z = up(rng);
    Vec X = corpus::halfspace_to_hyperboloid(x, y, z);
    EXPECT_LT(model_residual(M, X), 1e-10);
    Eigen::Vector3d back = corpus::hyperboloid_to_halfspace(X);
    EXPECT_NEAR(back[0], x, 1e-10);
    EXPECT_NEAR(back[1], y, 1e-10);
    EXPECT_NEAR(back[2], z, 1e-10);
  }
}

TEST(ModelConversion, ConversionIsAnIsometry) {
  // hyperbolic distance in the half-space model between points on a common
  // vertical line is |log(z1/z0)|
  SpaceForm M(3, -1.0);
  Point a{corpus::halfspace_to_hyperboloid(0.3, -0.2, 0.5)};
  Point b{corpus::halfspace_to_hyperboloid(0.3, -0.2, 2.0)};
  EXPECT_NEAR(dist(M, a, b), std::log(2.0 / 0.5), 1e-10);
}

TEST(Corpus, AllEntriesLoadAndLandOnTheModel) {
  for (const auto& id : corpus::all_ids()) {
    corpus::CorpusEntry e = corpus::entry(id);
    EXPECT_EQ(e.id, id);
    SamplePlan plan;
    plan.grid.assign(e.patch.param_dim(), 3);
    for (const Vec& u : sample_parameters(e.patch, plan))
      EXPECT_LT(model_residual(e.space, e.patch.eval(u).x), 1e-8)
          << id << " at " << u.transpose();
  }
}

TEST(Corpus, UnknownIdThrows) {
  EXPECT_THROW(corpus::entry("no-such-entry"), UnknownEntry);
}

TEST(Corpus, BumpFunctionsAreOneSidedAndSmoothAtZero) {
  EXPECT_EQ(corpus::bump_neg(0.0), 0.0);
  EXPECT_EQ(corpus::bump_neg(0.2), 0.0);
  EXPECT_GT(corpus::bump_neg(-0.2), 0.0);
  EXPECT_EQ(corpus::bump_pos(-0.2), 0.0);
  EXPECT_GT(corpus::bump_pos(0.2), 0.0);
  // derivative vanishes to all orders at 0; check first order numerically
  double h = 1e-4;
  EXPECT_LT(std::abs(corpus::bump_neg(-h) / h), 1e-10);
  double fd =
      (corpus::bump_neg(-0.3 + h) - corpus::bump_neg(-0.3 - h)) / (2 * h);
  EXPECT_NEAR(fd, corpus::bump_neg_prime(-0.3), 1e-5);
}

TEST(Corpus, ProjectionIdentityOfTheHyperbolicCylinder) {
  // points (cos t, sin t, t) of the half-space cylinder project onto the
  // axis at (0, 0, sqrt(1 + t^2))
  auto e = corpus::entry("ex-4.3-hyperbolic-cylinder");
  for (double t : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    Point q{corpus::halfspace_to_hyperboloid(std::cos(t), std::sin(t), t)};
    Projection pr = project_W(e.space, q, e.W);
    Eigen::Vector3d foot = corpus::hyperboloid_to_halfspace(pr.foot.x);
    EXPECT_NEAR(foot[0], 0.0, 1e-7);
    EXPECT_NEAR(foot[1], 0.0, 1e-7);
    EXPECT_NEAR(foot[2], std::sqrt(1.0 + t * t), 1e-7);
  }
}

TEST(Corpus, ExpGraphProjectionImages) {
  auto e = corpus::entry("ex-4.5-exp-graph");
  for (Vec u : {vp({0.4, 0.7}), vp({-0.8, 1.9})}) {
    double ex = std::exp(u[0]);
    Mat D = dpi_W_restricted(e.patch, u, e.W);
    Mat TW = tangent_frame_of_W(
        e.space, project_W(e.space, e.patch.eval(u), e.W).foot, e.W);
    // ambient images of the two parameter directions
    Vec img_x = TW * D.col(0);
    Vec img_y = TW * D.col(1);
    Vec expect_x = vp({0, 0, ex * std::cos(u[1]), ex * std::sin(u[1])});
    Vec expect_y = vp({0, 0, -ex * std::sin(u[1]), ex * std::cos(u[1])});
    EXPECT_LT((img_x - expect_x).norm(), 1e-5);
    EXPECT_LT((img_y - expect_y).norm(), 1e-5);
  }
}

TEST(Corpus, ExpGraphFiberIntersectionFormula) {
  {
    auto pts = corpus::fiber_intersection_4_5(std::exp(1.0), 0.0, 2);
    ASSERT_EQ(pts.size(), 5u);
    for (const Vec& u : pts) EXPECT_NEAR(u[0], 1.0, 1e-12);
    EXPECT_NEAR(pts[2][1], 0.0, 1e-12);
    EXPECT_NEAR(pts[3][1], 2.0 * M_PI, 1e-12);
  }
  {
    auto pts = corpus::fiber_intersection_4_5(0.0, 1.0, 1);
    for (const Vec& u : pts) EXPECT_NEAR(u[0], 0.0, 1e-12);
    EXPECT_NEAR(pts[1][1], M_PI / 2.0, 1e-12);
  }
  EXPECT_THROW(corpus::fiber_intersection_4_5(0.0, 0.0), ExcludedBasePoint);
  EXPECT_THROW(corpus::fiber_intersection_4_5(1.0, 0.0), ExcludedBasePoint);
}

// The formula points are exactly the zeros of the foot-matching equations
// (e^x cos y, e^x sin y) = (alpha, beta): every listed point is a root, and
// a grid scan of the domain finds no root away from the list.
TEST(Corpus, ExpGraphFiberFormulaMatchesRootScan) {
  auto e = corpus::entry("ex-4.5-exp-graph");
  double alpha = 0.9, beta = -0.4;
  auto roots = corpus::fiber_intersection_4_5(alpha, beta, 3);
  auto g = [&](const Vec& u) -> double {
    double ex = std::exp(u[0]);
    return std::hypot(ex * std::cos(u[1]) - alpha, ex * std::sin(u[1]) - beta);
  };
  std::vector<Vec> inside;
  for (const Vec& u : roots) {
    if (!e.patch.domain().contains(u)) continue;
    inside.push_back(u);
    EXPECT_LT(g(u), 1e-12);
    // and the projection foot really is the prescribed point of W
    Projection pr = project_W(e.space, e.patch.eval(u), e.W);
    EXPECT_LT((pr.foot.x - vp({0, 0, alpha, beta})).norm(), 1e-10);
  }
  ASSERT_GE(inside.size(), 1u);
  for (double x = -1.5; x <= 1.5; x += 0.05) {
    for (double y = -3.0; y <= 3.0; y += 0.05) {
      Vec u = vp({x, y});
      if (g(u) > 0.05) continue;  // coarse cut
      // near-roots must be near a listed root
      double dmin = std::numeric_limits<double>::infinity();
      for (const Vec& r : inside) dmin = std::min(dmin, (u - r).norm());
      EXPECT_LT(dmin, 0.2) << "stray root near " << u.transpose();
    }
  }
}

TEST(Corpus, ConeCylinderCurveGeometry) {
  auto e = corpus::entry("ex-4.2-cone-cylinder");
  // for t >= 0 the curve lies on the unit cylinder around the axis; for
  // t < 0 it lies on the cone |z'| = dist growth toward the axis
  for (double t : {0.05, 0.2, 0.4}) {
    Point q = e.patch.eval(vp({t}));
    EXPECT_NEAR(std::hypot(q.x[0], q.x[1]), 1.0, 1e-12);
  }
  for (double t : {-0.4, -0.2}) {
    Point q = e.patch.eval(vp({t}));
    double radial = std::hypot(q.x[0], q.x[1]);
    EXPECT_NEAR(radial, 1.0 - corpus::bump_neg(t), 1e-12);
    EXPECT_NEAR(q.x[2], corpus::bump_neg(t), 1e-12);
  }
}

TEST(Corpus, SphereCapStaysClearOfWAndItsFocalSet) {
  auto e = corpus::entry("ex-4.4-sphere-cap");
  SamplePlan plan;
  plan.grid = {5, 5};
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (const Vec& u : sample_parameters(e.patch, plan)) {
    double d = project_W(e.space, e.patch.eval(u), e.W).distance;
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  EXPECT_GT(dmin, 0.05);
  EXPECT_LT(dmax, M_PI / 2.0 - 0.05);  // focal distance of a great circle
  EXPECT_GT(dmax - dmin, 0.1);         // the distance genuinely varies
}

TEST(Corpus, HorosphereEntrySatisfiesItsAlgebraicIdentities) {
  auto e = corpus::entry("horosphere-h3");
  ASSERT_TRUE(e.busemann_xi.has_value());
  const Vec& xi = *e.busemann_xi;
  const SpaceForm& M = e.space;
  EXPECT_NEAR(M.form(xi, xi), 0.0, 1e-12);
  SamplePlan plan;
  plan.grid = {4, 4};
  for (const Vec& u : sample_parameters(e.patch, plan)) {
    Point q = e.patch.eval(u);
    EXPECT_LT(model_residual(M, q.x), 1e-12);
    EXPECT_NEAR(M.form(q.x, xi), -1.0, 1e-12);
  }
}

}  // namespace
