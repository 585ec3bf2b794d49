#include "gridshell/gridshell_model.hpp"

#include <algorithm>
#include <cmath>

namespace gridshell {

const char* to_string(LineDirection d) { return d == LineDirection::Xi ? "xi" : "eta"; }

std::vector<int> GridshellModel::variable_group_ids() const {
  std::vector<int> ids;
  for (const MemberGroup& g : groups)
    if (g.variable) ids.push_back(g.id);
  return ids;
}

int GridshellModel::objective_member_count() const {
  return static_cast<int>(std::count_if(members.begin(), members.end(), [](const Member& m) { return m.in_objective; }));
}

namespace {

bool near_edge(int index, int last) { return index < kBoundaryRings || index > last - kBoundaryRings; }

}  // namespace

GridshellModel build_grid(const MembraneField& field, int n_xi, int n_eta) {
  if (n_xi < 1 || n_eta < 1) throw InvalidArgument("build_grid: counts must be at least 1");
  if (field.grid.n_xi != n_xi || field.grid.n_eta != n_eta)
    throw InvalidArgument("build_grid: field grid does not match the requested counts");

  GridshellModel m;
  m.n_xi = n_xi;
  m.n_eta = n_eta;
  m.Z = field.Z;
  for (int i = 0; i <= n_xi; ++i) {
    for (int j = 0; j <= n_eta; ++j) {
      const Sample& s = field.grid.at(i, j);
      Node nd;
      nd.id = m.node_index(i, j);
      nd.i = i;
      nd.j = j;
      nd.position = s.p;
      nd.normal = s.n;
      nd.is_boundary = i == 0 || j == 0 || i == n_xi || j == n_eta;
      m.nodes.push_back(nd);
    }
  }

  // Eta-line groups (xi index fixed) first, then xi-line groups.
  for (int i = 0; i <= n_xi; ++i)
    m.groups.push_back({static_cast<int>(m.groups.size()), LineDirection::Eta, i, {}, !near_edge(i, n_xi)});
  for (int j = 0; j <= n_eta; ++j)
    m.groups.push_back({static_cast<int>(m.groups.size()), LineDirection::Xi, j, {}, !near_edge(j, n_eta)});

  const auto add_member = [&](int ia, int ja, int ib, int jb, LineDirection dir, int group) {
    Member mb;
    mb.id = static_cast<int>(m.members.size());
    mb.node_a = m.node_index(ia, ja);
    mb.node_b = m.node_index(ib, jb);
    mb.direction = dir;
    mb.group_id = group;
    mb.in_objective = !near_edge(ia, n_xi) && !near_edge(ib, n_xi) && !near_edge(ja, n_eta) && !near_edge(jb, n_eta);
    m.groups[std::size_t(group)].member_ids.push_back(mb.id);
    m.members.push_back(mb);
  };
  for (int i = 0; i <= n_xi; ++i)
    for (int j = 0; j < n_eta; ++j) add_member(i, j, i, j + 1, LineDirection::Eta, i);
  for (int j = 0; j <= n_eta; ++j)
    for (int i = 0; i < n_xi; ++i) add_member(i, j, i + 1, j, LineDirection::Xi, n_xi + 1 + j);
  return m;
}

void assign_target_forces(GridshellModel& model, const MembraneField& field, TargetPairing pairing) {
  const bool crossing = pairing == TargetPairing::Crossing;
  const auto& xi = field.grid.xi;
  const auto& eta = field.grid.eta;
  const auto pos = [&](int i, int j) { return model.nodes[std::size_t(model.node_index(i, j))].position; };

  for (Member& mb : model.members) {
    const Node& a = model.nodes[std::size_t(mb.node_a)];
    const Node& b = model.nodes[std::size_t(mb.node_b)];
    const Eigen::Vector3d mid = 0.5 * (a.position + b.position);
    double sum = 0.0;
    int count = 0;
    double force_per_length = 0.0;
    if (mb.direction == LineDirection::Eta) {
      // Neighbouring eta-lines sit at xi indices i -/+ 1.
      const int i = a.i, j = a.j;
      for (int di : {-1, 1}) {
        const int k = i + di;
        if (k < 0 || k > model.n_xi) continue;
        sum += (0.5 * (pos(k, j) + pos(k, j + 1)) - mid).norm();
        ++count;
      }
      const MembraneForces t = field.forces_at(xi[std::size_t(i)], 0.5 * (eta[std::size_t(j)] + eta[std::size_t(j + 1)]));
      force_per_length = crossing ? t.T1 : t.T2;
    } else {
      const int i = a.i, j = a.j;
      for (int dj : {-1, 1}) {
        const int k = j + dj;
        if (k < 0 || k > model.n_eta) continue;
        sum += (0.5 * (pos(i, k) + pos(i + 1, k)) - mid).norm();
        ++count;
      }
      const MembraneForces t = field.forces_at(0.5 * (xi[std::size_t(i)] + xi[std::size_t(i + 1)]), eta[std::size_t(j)]);
      force_per_length = crossing ? t.T2 : t.T1;
    }
    // One-sided at patch edges: half the distance to the single neighbour.
    mb.tributary_width = count > 0 ? 0.5 * sum : 0.0;
    mb.target_force = force_per_length * mb.tributary_width;
  }
}

void assign_nodal_loads(GridshellModel& model, const MembraneField& field) {
  for (Node& nd : model.nodes) nd.tributary_area = 0.0;
  const auto tri = [](const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    return 0.5 * (b - a).cross(c - a).norm();
  };
  for (int i = 0; i < model.n_xi; ++i) {
    for (int j = 0; j < model.n_eta; ++j) {
      const int ids[4] = {model.node_index(i, j), model.node_index(i + 1, j), model.node_index(i + 1, j + 1),
                          model.node_index(i, j + 1)};
      const auto& p = [&](int k) -> const Eigen::Vector3d& { return model.nodes[std::size_t(ids[k])].position; };
      const double area = tri(p(0), p(1), p(2)) + tri(p(0), p(2), p(3));
      for (int id : ids) model.nodes[std::size_t(id)].tributary_area += 0.25 * area;
    }
  }
  model.Z = field.Z;
  for (Node& nd : model.nodes) nd.load = field.Z * nd.tributary_area * nd.normal;
}

GridshellModel build_gridshell(const MembraneField& field, TargetPairing pairing) {
  GridshellModel m = build_grid(field, field.grid.n_xi, field.grid.n_eta);
  assign_target_forces(m, field, pairing);
  assign_nodal_loads(m, field);
  return m;
}

CornerGeometry corner_geometry(const GridshellModel& model) {
  const int ids[4] = {model.node_index(0, 0), model.node_index(model.n_xi, 0), model.node_index(0, model.n_eta),
                      model.node_index(model.n_xi, model.n_eta)};
  std::array<Eigen::Vector3d, 4> c;
  for (int k = 0; k < 4; ++k) c[std::size_t(k)] = model.nodes[std::size_t(ids[k])].position;

  CornerGeometry out;
  int slot = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) out.distances[std::size_t(slot++)] = (c[std::size_t(a)] - c[std::size_t(b)]).norm();

  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : c) centroid += p / 4.0;
  Eigen::Matrix<double, 3, 4> centered;
  for (int k = 0; k < 4; ++k) centered.col(k) = c[std::size_t(k)] - centroid;
  const Eigen::JacobiSVD<Eigen::Matrix<double, 3, 4>> svd(centered, Eigen::ComputeFullU);
  const Eigen::Vector3d sv = svd.singularValues();
  if (!(sv(1) > 1e-9 * sv(0))) throw SingularError("corner geometry: corners are collinear");
  Eigen::Vector3d normal = svd.matrixU().col(2);

  Eigen::Vector3d x_axis = c[1] - c[0];
  x_axis -= x_axis.dot(normal) * normal;
  x_axis.normalize();
  Eigen::Vector3d y_axis = normal.cross(x_axis);
  if (y_axis.dot(c[2] - c[0]) < 0.0) {
    y_axis = -y_axis;
    normal = -normal;
  }
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector3d d = c[std::size_t(k)] - c[0];
    out.corners[std::size_t(k)] = Eigen::Vector2d(d.dot(x_axis), d.dot(y_axis));
    out.planarity = std::max(out.planarity, std::abs((c[std::size_t(k)] - centroid).dot(normal)));
  }
  double hi = 0.0, lo = 0.0;
  for (const Node& nd : model.nodes) {
    const double h = (nd.position - centroid).dot(normal);
    hi = std::max(hi, h);
    lo = std::min(lo, h);
  }
  out.rise = std::max(hi, -lo);
  return out;
}

}  // namespace gridshell
