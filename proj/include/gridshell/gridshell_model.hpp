#pragma once

// Structured beam grid discretizing a membrane field.

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "gridshell/membrane.hpp"

namespace gridshell {

/// Direction a member runs in: along a xi-line (eta fixed) or an eta-line (xi fixed).
enum class LineDirection { Xi, Eta };

const char* to_string(LineDirection d);

struct Node {
  int id = 0;
  int i = 0;  ///< xi index
  int j = 0;  ///< eta index
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double tributary_area = 0;
  bool is_boundary = false;
  Eigen::Vector3d load = Eigen::Vector3d::Zero();
};

struct Member {
  int id = 0;
  int node_a = 0;
  int node_b = 0;
  LineDirection direction = LineDirection::Xi;
  double tributary_width = 0;
  double target_force = 0;
  int group_id = 0;
  bool in_objective = false;
};

/// All members on one grid polyline.
struct MemberGroup {
  int id = 0;
  LineDirection direction = LineDirection::Xi;
  int line_index = 0;  ///< fixed eta index for xi-lines, fixed xi index for eta-lines
  std::vector<int> member_ids;
  bool variable = false;
};

struct GridshellModel {
  int n_xi = 0;
  int n_eta = 0;
  double Z = 0;
  std::vector<Node> nodes;
  std::vector<Member> members;
  std::vector<MemberGroup> groups;

  int node_index(int i, int j) const { return i * (n_eta + 1) + j; }
  std::vector<int> variable_group_ids() const;
  int objective_member_count() const;
};

/// Number of grid lines next to each patch edge whose members are fixed and
/// left out of the objective.
inline constexpr int kBoundaryRings = 2;

/// Topology, node geometry, boundary flags and groups; no loads or targets.
GridshellModel build_grid(const MembraneField& field, int n_xi, int n_eta);

/// Which membrane force a member's target is built from.
/// Crossing: the force acting across the member's strip (xi-direction force on
/// eta-line members and vice versa). Along: the force acting along the member.
enum class TargetPairing { Crossing, Along };

/// Target axial force = paired membrane force x tributary width.
void assign_target_forces(GridshellModel& model, const MembraneField& field,
                          TargetPairing pairing = TargetPairing::Crossing);

/// Pressure loads Z x tributary area along the node normal.
void assign_nodal_loads(GridshellModel& model, const MembraneField& field);

/// build_grid + assign_target_forces + assign_nodal_loads on the field's grid.
GridshellModel build_gridshell(const MembraneField& field, TargetPairing pairing = TargetPairing::Crossing);

/// Corner plane alignment: corner 0 at the origin, corner 1 on +x, corner 2 at y > 0.
struct CornerGeometry {
  std::array<Eigen::Vector2d, 4> corners;  ///< (xi_min,eta_min), (xi_max,eta_min), (xi_min,eta_max), (xi_max,eta_max)
  std::array<double, 6> distances{};       ///< 01, 02, 03, 12, 13, 23
  double rise = 0;                         ///< max node distance from the corner plane
  double planarity = 0;                    ///< max corner distance from their best-fit plane
};

CornerGeometry corner_geometry(const GridshellModel& model);

}  // namespace gridshell
