#include <gtest/gtest.h>

#include <cmath>

#include "gridshell/section_optimizer.hpp"

using namespace gridshell;

namespace {

GridshellModel small_model() {
  const auto cp = CyclideParams<double>::from_a0(2.144, -0.1 * M_PI, 0.1 * M_PI, 0.0,
                                                 circle_angle_to_eta(0.15 * M_PI), 10000.0);
  const auto f = make_field(cyclide_source(cp), {cp.xi_min, cp.xi_max, cp.eta_min, cp.eta_max}, 6, 6, -0.0005, 0.0,
                            circle_angle_to_eta(0.075 * M_PI));
  return build_gridshell(f);
}

ObjectiveValue value_of(double F) { return {F, 0.0, 0.0}; }

}  // namespace

TEST(OptimizationConfig, Validation) {
  OptimizationConfig c;
  EXPECT_NO_THROW(c.validate());
  c.R_init = 10.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.simplex_perturbation = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(ForceDeviation, OnlyObjectiveMembers) {
  GridshellModel m;
  m.members.resize(3);
  for (int k = 0; k < 3; ++k) m.members[std::size_t(k)].id = k;
  m.members[0] = {0, 0, 0, LineDirection::Xi, 1.0, -10.0, 0, true};
  m.members[1] = {1, 0, 0, LineDirection::Xi, 1.0, -10.0, 0, true};
  m.members[2] = {2, 0, 0, LineDirection::Xi, 1.0, -10.0, 0, false};
  const auto v = force_deviation(m, {-7.0, -14.0, 1000.0});
  EXPECT_DOUBLE_EQ(v.F, 9.0 + 16.0);
  EXPECT_DOUBLE_EQ(v.max_dev, 4.0);
  EXPECT_DOUBLE_EQ(v.mean_dev, 3.5);
}

TEST(NelderMead, QuadraticInteriorMinimum) {
  const Eigen::VectorXd c = (Eigen::VectorXd(3) << 80.0, 150.0, 210.0).finished();
  const ObjectiveFunction f = [&](const Eigen::VectorXd& x) { return value_of(1.0 + (x - c).squaredNorm()); };
  OptimizationConfig cfg;
  cfg.f_tol = 1e-14;
  const auto r = nelder_mead(f, Eigen::VectorXd::Constant(3, 100.0), Eigen::VectorXd::Constant(3, 30.0),
                             Eigen::VectorXd::Constant(3, 300.0), cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LE((r.x - c).norm(), 1e-4);
  EXPECT_NEAR(r.best.F, 1.0, 1e-8);
}

TEST(NelderMead, RosenbrockInBox) {
  const ObjectiveFunction f = [](const Eigen::VectorXd& x) {
    const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
    return value_of(1.0 + a * a + 100.0 * b * b);
  };
  OptimizationConfig cfg;
  cfg.f_tol = 1e-15;
  cfg.max_iters = 20000;
  const auto r = nelder_mead(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2), cfg);
  EXPECT_NEAR(r.x(0), 1.0, 1e-3);
  EXPECT_NEAR(r.x(1), 1.0, 2e-3);
}

TEST(NelderMead, RespectsBoundsAndTraceIsMonotone) {
  const ObjectiveFunction f = [](const Eigen::VectorXd& x) { return value_of(1.0 + (x.array() - 500.0).square().sum()); };
  OptimizationConfig cfg;
  const auto r = nelder_mead(f, Eigen::VectorXd::Constant(2, 100.0), Eigen::VectorXd::Constant(2, 30.0),
                             Eigen::VectorXd::Constant(2, 300.0), cfg);
  EXPECT_LE(r.x.maxCoeff(), 300.0);
  EXPECT_NEAR(r.x(0), 300.0, 1e-2);
  EXPECT_NEAR(r.x(1), 300.0, 1e-2);
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_LE(r.trace[k].best.F, r.trace[k - 1].best.F);
  EXPECT_EQ(r.trace.back().best.F, r.best.F);
}

TEST(NelderMead, MaxItersRespected) {
  const ObjectiveFunction f = [](const Eigen::VectorXd& x) { return value_of(1.0 + x.squaredNorm()); };
  OptimizationConfig cfg;
  cfg.max_iters = 7;
  cfg.f_tol = 0.0;
  const auto r = nelder_mead(f, Eigen::VectorXd::Constant(2, 3.0), Eigen::VectorXd::Constant(2, -5.0),
                             Eigen::VectorXd::Constant(2, 5.0), cfg);
  EXPECT_EQ(r.iterations, 7);
  EXPECT_EQ(r.trace.size(), 8u);
  EXPECT_THROW(nelder_mead(f, Eigen::VectorXd(), Eigen::VectorXd(), Eigen::VectorXd(), cfg), InvalidArgument);
}

TEST(SizingProblem, ExpandRestrictRoundTrip) {
  SizingProblem p(small_model(), Material{}, 100.0);
  ASSERT_EQ(p.dimension(), 6);
  Eigen::VectorXd x(6);
  x << 40, 50, 60, 70, 80, 90;
  const auto radii = p.expand(x);
  EXPECT_EQ(p.restrict(radii), x);
  for (const auto& g : p.model().groups)
    if (!g.variable) EXPECT_EQ(radii[std::size_t(g.id)], 100.0);
  EXPECT_THROW(p.expand(Eigen::VectorXd(2)), InvalidArgument);
}

TEST(SizingProblem, MatchesOneShotObjective) {
  const auto m = small_model();
  SizingProblem p(m, Material{}, 100.0);
  std::vector<double> radii(m.groups.size(), 100.0);
  radii[3] = 140.0;
  const auto a = p.evaluate(radii);
  const auto b = objective(m, radii);
  EXPECT_NEAR(a.F, b.F, 1e-9 * b.F);
}

TEST(OptimizeSections, ImprovesUniformDesign) {
  SizingProblem p(small_model(), Material{}, 100.0);
  OptimizationConfig cfg;
  const auto start = p.evaluate(std::vector<double>(p.model().groups.size(), 100.0));
  const auto r = optimize_sections(p, cfg);
  EXPECT_LT(r.search.best.F, start.F);
  EXPECT_GE(r.search.trace.front().best.F, r.search.best.F);
  for (double R : r.radii) {
    EXPECT_GE(R, cfg.R_lower);
    EXPECT_LE(R, cfg.R_upper);
  }
}

TEST(StressRatioAdjust, ConsistentTargetsLeaveRadiiUnchanged) {
  GridshellModel m = small_model();
  const std::vector<double> radii(m.groups.size(), 120.0);
  SizingProblem probe(m, Material{}, 100.0);
  const auto axial = probe.analyze(radii).axial;
  for (auto& mb : m.members) mb.target_force = axial[std::size_t(mb.id)];
  SizingProblem p(m, Material{}, 100.0);
  const auto r = stress_ratio_adjust(p, radii);
  for (std::size_t g = 0; g < radii.size(); ++g) EXPECT_NEAR(r.radii[g], 120.0, 1e-9);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(StressRatioAdjust, FactorIsGeometricMeanOfRatio) {
  GridshellModel m = small_model();
  const std::vector<double> radii(m.groups.size(), 120.0);
  SizingProblem probe(m, Material{}, 100.0);
  const auto axial = probe.analyze(radii).axial;
  for (auto& mb : m.members) mb.target_force = 2.0 * axial[std::size_t(mb.id)];
  SizingProblem p(m, Material{}, 100.0);
  const auto down = stress_ratio_adjust(p, radii, AdjustRatio::RealizedOverTarget);
  const auto up = stress_ratio_adjust(p, radii, AdjustRatio::TargetOverRealized);
  for (const auto& g : m.groups) {
    const auto k = std::size_t(g.id);
    if (!g.variable) {
      EXPECT_EQ(down.group_factor[k], 1.0);
      EXPECT_EQ(down.radii[k], 120.0);
      continue;
    }
    EXPECT_NEAR(down.group_factor[k], 0.5, 1e-12);
    EXPECT_NEAR(up.group_factor[k], 2.0, 1e-12);
    EXPECT_NEAR(pipe_section(down.radii[k]).A, 0.5 * pipe_section(120.0).A, 1e-6);
  }
}

TEST(StressRatioAdjust, SignMismatchAndClamp) {
  GridshellModel m = small_model();
  const std::vector<double> radii(m.groups.size(), 120.0);
  SizingProblem probe(m, Material{}, 100.0);
  const auto axial = probe.analyze(radii).axial;
  int flipped = -1;
  for (auto& mb : m.members) {
    mb.target_force = 100.0 * axial[std::size_t(mb.id)];
    if (mb.in_objective && flipped < 0) {
      mb.target_force = -axial[std::size_t(mb.id)];
      flipped = mb.id;
    }
  }
  SizingProblem p(m, Material{}, 100.0);
  const auto r = stress_ratio_adjust(p, radii);
  ASSERT_EQ(r.warnings.size(), 1u);
  const int g = m.members[std::size_t(flipped)].group_id;
  EXPECT_NEAR(r.group_factor[std::size_t(g)], kRatioClampLow, 1e-12);
  EXPECT_THROW(stress_ratio_adjust(p, {1.0}), InvalidArgument);
}
