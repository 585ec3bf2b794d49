#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "gridshell/frame_fem.hpp"

using namespace gridshell;
using V3 = Eigen::Vector3d;

namespace {

const Material kSteel{};

// Straight beam from the origin along `axis`, n elements.
FrameModel straight_beam(double L, int n, const V3& axis = V3::UnitX(), const V3& normal = V3::UnitZ()) {
  FrameModel m;
  for (int k = 0; k <= n; ++k) {
    FrameNode nd;
    nd.position = (L * k / n) * axis;
    nd.normal = normal;
    m.nodes.push_back(nd);
  }
  for (int k = 0; k < n; ++k) m.elements.push_back({k, k + 1});
  return m;
}

std::vector<PipeSection> uniform(const FrameModel& m, double R) {
  return std::vector<PipeSection>(m.elements.size(), pipe_section(R));
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Small lattice dome with pinned edges, used for equilibrium checks.
FrameModel lattice(int n) {
  FrameModel m;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      FrameNode nd;
      const double x = 1000.0 * i, y = 1000.0 * j;
      nd.position = V3(x, y, 600.0 * std::sin(M_PI * i / n) * std::sin(M_PI * j / n));
      nd.normal = V3::UnitZ();
      if (i == 0 || j == 0 || i == n || j == n) nd.fixed = {true, true, true, false, false, false};
      nd.load.head<3>() = V3(0.3, -0.2, -5.0) * (1 + i + 2 * j);
      m.nodes.push_back(nd);
    }
  const auto id = [n](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j < n; ++j) m.elements.push_back({id(i, j), id(i, j + 1)});
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) m.elements.push_back({id(i, j), id(i + 1, j)});
  return m;
}

}  // namespace

TEST(PipeSection, ClosedForm) {
  const auto s = pipe_section(100.0);
  EXPECT_NEAR(s.A, M_PI * (100.0 * 100.0 - 90.0 * 90.0), 1e-9);
  EXPECT_NEAR(s.I, M_PI / 4.0 * (std::pow(100.0, 4) - std::pow(90.0, 4)), 1e-3);
  EXPECT_DOUBLE_EQ(s.J, 2.0 * s.I);
  EXPECT_NEAR(pipe_radius_from_area(s.A), 100.0, 1e-12);
  EXPECT_THROW(pipe_section(0.0), InvalidArgument);
  EXPECT_THROW(pipe_radius_from_area(-1.0), InvalidArgument);
}

TEST(LocalStiffness, SymmetricWithRigidModes) {
  const Matrix12d K = local_stiffness(2000.0, pipe_section(80.0), kSteel);
  EXPECT_LE((K - K.transpose()).cwiseAbs().maxCoeff(), 1e-9 * K.cwiseAbs().maxCoeff());
  const Eigen::SelfAdjointEigenSolver<Matrix12d> es(K);
  const auto ev = es.eigenvalues();
  for (int k = 0; k < 6; ++k) EXPECT_LE(std::abs(ev(k)), 1e-9 * ev(11));
  EXPECT_GT(ev(6), 1e-9 * ev(11));
}

TEST(ElementAxes, OrthonormalAndDegenerateReference) {
  const auto R = element_axes(V3(0, 0, 0), V3(1, 2, 3), V3(0, 0, 1));
  EXPECT_LE((R * R.transpose() - Eigen::Matrix3d::Identity()).norm(), 1e-14);
  EXPECT_NEAR(R.determinant(), 1.0, 1e-14);
  EXPECT_NEAR((R.row(0).transpose() - V3(1, 2, 3).normalized()).norm(), 0.0, 1e-15);
  const auto V = element_axes(V3(0, 0, 0), V3(0, 0, 5), V3(0, 0, 1));
  EXPECT_LE((V * V.transpose() - Eigen::Matrix3d::Identity()).norm(), 1e-14);
  EXPECT_THROW(element_axes(V3(1, 1, 1), V3(1, 1, 1), V3(0, 0, 1)), SingularError);
}

TEST(FrameAnalysis, SimplySupportedMidspanLoad) {
  const double L = 6000.0, P = 12000.0;
  FrameModel m = straight_beam(L, 8);
  m.nodes.front().fixed = {true, true, true, true, false, false};
  m.nodes.back().fixed = {false, true, true, false, false, false};
  m.nodes[4].load(2) = -P;
  const auto s = uniform(m, 90.0);
  const auto sol = assemble_solve(m, s, kSteel);
  const double exact = P * L * L * L / (48.0 * kSteel.E * s[0].I);
  EXPECT_LE(rel(-sol.u(6 * 4 + 2), exact), 1e-8);
  // End rotation P L^2 / (16 E I).
  EXPECT_LE(rel(std::abs(sol.u(4)), P * L * L / (16.0 * kSteel.E * s[0].I)), 1e-8);
}

TEST(FrameAnalysis, CantileverTipLoads) {
  const double L = 3000.0, P = 5000.0, M = 2e6, T = 3e6, N = 40000.0;
  const V3 axis = V3(1, 1, 0).normalized();
  FrameModel m = straight_beam(L, 5, axis, V3::UnitZ());
  m.nodes.front().fixed = {true, true, true, true, true, true};
  auto& tip = m.nodes.back().load;
  tip.head<3>() = V3(0, 0, -P) + N * axis;
  tip.tail<3>() = T * axis + M * V3::UnitZ();
  const auto s = uniform(m, 70.0);
  const auto sol = assemble_solve(m, s, kSteel);
  const double EI = kSteel.E * s[0].I;
  const V3 u = sol.u.segment<3>(6 * 5);
  const V3 rot = sol.u.segment<3>(6 * 5 + 3);
  EXPECT_LE(rel(-u.z(), P * L * L * L / (3.0 * EI)), 1e-8);
  EXPECT_LE(rel(u.dot(axis), N * L / (kSteel.E * s[0].A)), 1e-8);
  EXPECT_LE(rel(rot.dot(axis), T * L / (kSteel.G() * s[0].J)), 1e-8);
  EXPECT_LE(rel(rot.z(), M * L / EI), 1e-8);
  const V3 lateral = axis.cross(V3::UnitZ());
  EXPECT_LE(rel(std::abs(u.dot(lateral)), M * L * L / (2.0 * EI)), 1e-8);
  for (double n : sol.axial) EXPECT_LE(rel(n, N), 1e-8);
}

TEST(FrameAnalysis, GlobalEquilibrium) {
  const FrameModel m = lattice(5);
  const auto sol = assemble_solve(m, uniform(m, 60.0), kSteel);
  V3 force = V3::Zero(), moment = V3::Zero();
  double load_scale = 0.0, free_residual = 0.0;
  for (std::size_t n = 0; n < m.nodes.size(); ++n) {
    const auto& nd = m.nodes[n];
    const Vector6d r = sol.reactions.segment<6>(Eigen::Index(6 * n));
    for (int d = 0; d < 6; ++d)
      if (!nd.fixed[std::size_t(d)]) free_residual = std::max(free_residual, std::abs(r(d)));
    // Support reactions plus applied loads must balance.
    V3 support = V3::Zero();
    for (int d = 0; d < 3; ++d)
      if (nd.fixed[std::size_t(d)]) support(d) = r(d);
    const V3 total = support + nd.load.head<3>();
    force += total;
    moment += nd.position.cross(total);
    load_scale = std::max(load_scale, nd.load.norm());
  }
  EXPECT_LE(free_residual, 1e-8 * load_scale);
  EXPECT_LE(force.norm(), 1e-8 * load_scale);
  EXPECT_LE(moment.norm(), 1e-8 * load_scale * 5000.0);
}

TEST(FrameAnalysis, FreeFreeHasSixRigidModes) {
  FrameModel m = lattice(3);
  for (auto& nd : m.nodes) nd.fixed = {};
  FrameAnalysis a(m);
  const Eigen::MatrixXd K(a.global_stiffness(uniform(m, 50.0), kSteel));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  const auto ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  int zero = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (std::abs(ev(k)) <= 1e-10 * top) ++zero;
  EXPECT_EQ(zero, 6);
  EXPECT_THROW(a.solve(uniform(m, 50.0), kSteel), SingularError);
}

TEST(FrameAnalysis, InternalForcesIndependentOfModulus) {
  const FrameModel m = lattice(4);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(40.0, 120.0);
  std::vector<PipeSection> s;
  for (std::size_t k = 0; k < m.elements.size(); ++k) s.push_back(pipe_section(r(rng)));
  FrameAnalysis a(m);
  const auto one = a.solve(s, Material{205000.0, 0.3});
  const auto two = a.solve(s, Material{70000.0, 0.3});
  for (std::size_t k = 0; k < one.axial.size(); ++k) {
    const double scale = one.end_forces_local[k].cwiseAbs().maxCoeff();
    EXPECT_LE((one.end_forces_local[k] - two.end_forces_local[k]).cwiseAbs().maxCoeff(), 1e-9 * scale);
  }
  EXPECT_NEAR(one.u.norm() * 205000.0, two.u.norm() * 70000.0, 1e-9 * one.u.norm() * 205000.0);
}

TEST(FrameAnalysis, RepeatedSolvesReuseFactorization) {
  const FrameModel m = lattice(4);
  FrameAnalysis a(m);
  const auto first = a.solve(uniform(m, 60.0), kSteel);
  a.solve(uniform(m, 90.0), kSteel);
  const auto again = a.solve(uniform(m, 60.0), kSteel);
  EXPECT_EQ(first.u, again.u);
  const auto fresh = assemble_solve(m, uniform(m, 60.0), kSteel);
  EXPECT_EQ(first.u, fresh.u);
}

TEST(FrameAnalysis, RejectsBadInput) {
  const FrameModel m = lattice(2);
  FrameAnalysis a(m);
  EXPECT_THROW(a.solve({}, kSteel), InvalidArgument);
  EXPECT_THROW(a.solve(uniform(m, 60.0), Material{0.0, 0.3}), InvalidArgument);
}
