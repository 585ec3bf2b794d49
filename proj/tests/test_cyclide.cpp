#include <gtest/gtest.h>

#include <cmath>

#include "gridshell/cyclide.hpp"

using namespace gridshell;
using V3 = Vec3<double>;

namespace {

CyclideParams<double> unit_patch() {
  return CyclideParams<double>::from_a0(2.144, -0.1 * M_PI, 0.1 * M_PI, 0.0, circle_angle_to_eta(0.15 * M_PI), 1.0);
}

CyclideParams<double> mm_patch() {
  auto p = unit_patch();
  p.scale = 10000.0;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

// Reference values from a 40-digit evaluation of the closed-form parametrization.
TEST(CyclidePoint, MatchesHighPrecisionOracle) {
  const auto cp = unit_patch();
  const V3 p0 = eval_point(cp, 0.0, 0.0);
  EXPECT_NEAR(p0.x(), 1.4842531307620344, 1e-14);
  EXPECT_NEAR(p0.y(), 0.0, 1e-15);
  EXPECT_NEAR(p0.z(), 0.0, 1e-15);
  const V3 p1 = eval_point(cp, 0.2, 0.3);
  EXPECT_NEAR(p1.x(), 0.77651067854370724, 1e-14);
  EXPECT_NEAR(p1.y(), 0.67043068092666078, 1e-14);
  EXPECT_NEAR(p1.z(), 0.72513090370886208, 1e-14);
}

TEST(CyclidePoint, ScaleIsLinear) {
  auto a = unit_patch();
  auto b = mm_patch();
  EXPECT_NEAR((eval_point(b, 0.1, 0.2) - 10000.0 * eval_point(a, 0.1, 0.2)).norm(), 0.0, 1e-9);
}

TEST(CyclideParams, CircleAngleConversion) {
  EXPECT_NEAR(circle_angle_to_eta(0.075 * M_PI), 0.23783033279737307, 1e-15);
  EXPECT_NEAR(circle_angle_to_eta(0.15 * M_PI), 0.48971537442745072, 1e-15);
  EXPECT_THROW(circle_angle_to_eta(M_PI / 2), InvalidArgument);
}

TEST(CyclideParams, Validation) {
  EXPECT_THROW(CyclideParams<double>::from_a0(0.9, -0.1, 0.1, 0, 0.1, 1), InvalidArgument);
  EXPECT_THROW(CyclideParams<double>::from_a0(2.0, 0.1, -0.1, 0, 0.1, 1), InvalidArgument);
  EXPECT_THROW(CyclideParams<double>::from_a0(2.0, -0.1, 0.1, 0, 0.1, -1), InvalidArgument);
  auto p = unit_patch();
  p.c0 += 1e-6;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(CyclideTangent, AnalyticMatchesOracle) {
  const V3 t = eval_xi_tangent(unit_patch(), 0.05, 0.2);
  EXPECT_NEAR(t.x(), -0.73600418394107424, 1e-13);
  EXPECT_NEAR(t.y(), 4.1545957946961981, 1e-13);
  EXPECT_NEAR(t.z(), -0.27550368472575565, 1e-13);
}

TEST(CyclideFrame, MatchesOracleAtInteriorPoint) {
  const auto s = eval_frame(unit_patch(), 0.05, 0.2);
  EXPECT_LE(rel(s.kappa1, -0.80748999174611331), 1e-5);
  EXPECT_LE(rel(s.kappa2, -1.0572115609800422), 1e-5);
  EXPECT_LE(rel(s.A1, 4.2282704095627055), 1e-12);
  EXPECT_LE(rel(s.A2, 3.2295201491677392), 1e-5);
}

TEST(CyclideFrame, MatchesOracleAtCenter) {
  const auto s = eval_frame(mm_patch(), 0.0, circle_angle_to_eta(0.075 * M_PI));
  EXPECT_LE(rel(s.kappa1, -7.9575446249076106e-5), 1e-5);
  EXPECT_LE(rel(s.kappa2, -1.0545707338676338e-4), 1e-5);
  EXPECT_LE(rel(s.A1, 40745.92096769801), 1e-12);
  EXPECT_LE(rel(s.A2, 30745.92096769801), 1e-5);
}

TEST(CyclideFrame, NormalIsUnitAndOrthogonal) {
  const auto cp = unit_patch();
  const auto s = eval_frame(cp, -0.2, 0.4);
  EXPECT_NEAR(s.n.norm(), 1.0, 1e-14);
  EXPECT_NEAR(s.n.dot(eval_xi_tangent(cp, -0.2, 0.4)), 0.0, 1e-12);
}

TEST(CyclideFrame, CurvatureLinesAreOrthogonal) {
  const auto cp = unit_patch();
  const double h = 1e-6;
  for (double xi : {-0.3, 0.0, 0.25})
    for (double eta : {0.0, 0.2, 0.45}) {
      const V3 r_xi = eval_xi_tangent(cp, xi, eta);
      const V3 r_eta = (eval_point(cp, xi, eta + h) - eval_point(cp, xi, eta - h)) / (2 * h);
      EXPECT_LE(std::abs(r_xi.dot(r_eta)) / (r_xi.norm() * r_eta.norm()), 1e-8);
    }
}

TEST(CyclideFrame, LIsothermicOnPatch) {
  const auto g = sample_grid(mm_patch(), 14, 16);
  ASSERT_EQ(g.samples.size(), 15u * 17u);
  double worst = 0;
  for (const auto& s : g.samples) worst = std::max(worst, s.isothermic_mismatch());
  EXPECT_LE(worst, 1e-4);
}

TEST(CyclideFrame, ThetaMatchesLogOfKappaA) {
  const auto s = eval_frame(unit_patch(), 0.1, 0.1);
  EXPECT_NEAR(std::exp(s.theta), std::abs(s.kappa1 * s.A1), 1e-12);
}

// Third fundamental form: |n_xi|^2 = |n_eta|^2 = e^{2 theta}, n_xi . n_eta = 0.
TEST(CyclideFrame, ThirdFundamentalFormConformal) {
  const auto cp = unit_patch();
  const double h = 1e-3;
  const auto n_at = [&](double x, double e) { return eval_frame(cp, x, e).n; };
  for (double xi : {-0.2, 0.1})
    for (double eta : {0.1, 0.3}) {
      const auto s = eval_frame(cp, xi, eta);
      const V3 n_xi = (n_at(xi + h, eta) - n_at(xi - h, eta)) / (2 * h);
      const V3 n_eta = (n_at(xi, eta + h) - n_at(xi, eta - h)) / (2 * h);
      const double e2 = std::exp(2 * s.theta);
      EXPECT_LE(std::abs(n_xi.squaredNorm() / e2 - 1), 1e-3);
      EXPECT_LE(std::abs(n_eta.squaredNorm() / e2 - 1), 1e-3);
      EXPECT_LE(std::abs(n_xi.dot(n_eta)) / e2, 1e-3);
    }
}

TEST(CurvatureLineFrame, SphereOracle) {
  // Sphere of radius 2 in isothermic curvature-line coordinates (Mercator).
  const double R = 2.0;
  const PointFunction<double> sphere = [R](double u, double v) {
    const double c = 1.0 / std::cosh(v);
    return V3(R * c * std::cos(u), R * c * std::sin(u), R * std::tanh(v));
  };
  const auto s = curvature_line_frame<double>(sphere, 0.3, 0.4, 1e-4);
  EXPECT_NEAR(std::abs(s.kappa1), 1.0 / R, 1e-6);
  EXPECT_NEAR(std::abs(s.kappa2), 1.0 / R, 1e-6);
  EXPECT_NEAR(s.A1, R / std::cosh(0.4), 1e-7);
  EXPECT_NEAR(s.A2, R / std::cosh(0.4), 1e-7);
  EXPECT_LE(s.isothermic_mismatch(), 1e-6);
  EXPECT_THROW(curvature_line_frame<double>(sphere, 0.0, 0.0, 0.0), InvalidArgument);
}

TEST(SampleGrid, LayoutIsXiMajor) {
  const auto g = sample_grid(unit_patch(), 3, 4);
  EXPECT_EQ(g.index(1, 0), 5);
  EXPECT_DOUBLE_EQ(g.at(2, 3).xi, g.xi[2]);
  EXPECT_DOUBLE_EQ(g.at(2, 3).eta, g.eta[3]);
  EXPECT_DOUBLE_EQ(g.xi.front(), -0.1 * M_PI);
  EXPECT_DOUBLE_EQ(g.eta.back(), circle_angle_to_eta(0.15 * M_PI));
  EXPECT_THROW(sample_grid(unit_patch(), 0, 4), InvalidArgument);
}
