#include "gridshell/frame_fem.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace gridshell {

PipeSection pipe_section(double R, double t_ratio) {
  if (!(R > 0.0)) throw InvalidArgument("pipe_section: radius must be positive");
  if (!(t_ratio > 0.0 && t_ratio <= 1.0)) throw InvalidArgument("pipe_section: thickness ratio must be in (0, 1]");
  const double inner = 1.0 - t_ratio;
  const double inner2 = inner * inner;
  PipeSection s;
  s.R = R;
  s.t_ratio = t_ratio;
  s.A = M_PI * R * R * (1.0 - inner2);
  s.I = M_PI / 4.0 * std::pow(R, 4) * (1.0 - inner2 * inner2);
  s.J = 2.0 * s.I;
  return s;
}

double pipe_radius_from_area(double area, double t_ratio) {
  if (!(area > 0.0)) throw InvalidArgument("pipe_radius_from_area: area must be positive");
  const double inner = 1.0 - t_ratio;
  return std::sqrt(area / (M_PI * (1.0 - inner * inner)));
}

FrameModel to_frame_model(const GridshellModel& model) {
  FrameModel fm;
  fm.nodes.reserve(model.nodes.size());
  for (const Node& nd : model.nodes) {
    FrameNode fn;
    fn.position = nd.position;
    fn.normal = nd.normal;
    if (nd.is_boundary) fn.fixed = {true, true, true, false, false, false};
    fn.load.head<3>() = nd.load;
    fm.nodes.push_back(fn);
  }
  for (const Member& mb : model.members) fm.elements.push_back({mb.node_a, mb.node_b});
  return fm;
}

Eigen::Matrix3d element_axes(const Eigen::Vector3d& pa, const Eigen::Vector3d& pb, const Eigen::Vector3d& reference) {
  const Eigen::Vector3d d = pb - pa;
  const double L = d.norm();
  if (!(L > 0.0)) throw SingularError("frame element has zero length");
  const Eigen::Vector3d ex = d / L;
  Eigen::Vector3d ez = reference - reference.dot(ex) * ex;
  const double ref_norm = reference.norm();
  if (!(ref_norm > 0.0) || ez.norm() < 1e-6 * ref_norm) {
    // Reference nearly parallel to the axis: use the least aligned global axis.
    Eigen::Index k = 0;
    ex.cwiseAbs().minCoeff(&k);
    const Eigen::Vector3d g = Eigen::Vector3d::Unit(k);
    ez = g - g.dot(ex) * ex;
  }
  ez.normalize();
  const Eigen::Vector3d ey = ez.cross(ex);
  Eigen::Matrix3d axes;
  axes.row(0) = ex;
  axes.row(1) = ey;
  axes.row(2) = ez;
  return axes;
}

Matrix12d local_stiffness(double L, const PipeSection& s, const Material& mat) {
  const double E = mat.E, EA = E * s.A / L, GJ = mat.G() * s.J / L;
  const double Iy = s.I, Iz = s.I;
  const double L2 = L * L, L3 = L2 * L;
  Matrix12d k = Matrix12d::Zero();
  k(0, 0) = k(6, 6) = EA;
  k(0, 6) = -EA;
  k(3, 3) = k(9, 9) = GJ;
  k(3, 9) = -GJ;
  // Bending in the local x-y plane (v, rz).
  k(1, 1) = k(7, 7) = 12 * E * Iz / L3;
  k(1, 7) = -12 * E * Iz / L3;
  k(1, 5) = k(1, 11) = 6 * E * Iz / L2;
  k(5, 7) = k(7, 11) = -6 * E * Iz / L2;
  k(5, 5) = k(11, 11) = 4 * E * Iz / L;
  k(5, 11) = 2 * E * Iz / L;
  // Bending in the local x-z plane (w, ry).
  k(2, 2) = k(8, 8) = 12 * E * Iy / L3;
  k(2, 8) = -12 * E * Iy / L3;
  k(2, 4) = k(2, 10) = -6 * E * Iy / L2;
  k(4, 8) = k(8, 10) = 6 * E * Iy / L2;
  k(4, 4) = k(10, 10) = 4 * E * Iy / L;
  k(4, 10) = 2 * E * Iy / L;
  return k.selfadjointView<Eigen::Upper>();
}

namespace {

Matrix12d block_rotation(const Eigen::Matrix3d& axes) {
  Matrix12d T = Matrix12d::Zero();
  for (int b = 0; b < 4; ++b) T.block<3, 3>(3 * b, 3 * b) = axes;
  return T;
}

Vector12d element_displacements(const Eigen::VectorXd& u, const FrameElement& e) {
  Vector12d ue;
  ue.head<6>() = u.segment<6>(6 * e.a);
  ue.tail<6>() = u.segment<6>(6 * e.b);
  return ue;
}

}  // namespace

FrameAnalysis::FrameAnalysis(FrameModel model) : model_(std::move(model)) {
  const int n_nodes = static_cast<int>(model_.nodes.size());
  for (const FrameElement& e : model_.elements) {
    if (e.a < 0 || e.b < 0 || e.a >= n_nodes || e.b >= n_nodes || e.a == e.b)
      throw InvalidArgument("frame model: element references invalid nodes");
    const FrameNode& na = model_.nodes[std::size_t(e.a)];
    const FrameNode& nb = model_.nodes[std::size_t(e.b)];
    axes_.push_back(element_axes(na.position, nb.position, 0.5 * (na.normal + nb.normal)));
    lengths_.push_back((nb.position - na.position).norm());
  }
  free_index_.assign(std::size_t(6 * n_nodes), -1);
  for (int n = 0; n < n_nodes; ++n)
    for (int d = 0; d < 6; ++d)
      if (!model_.nodes[std::size_t(n)].fixed[std::size_t(d)]) free_index_[std::size_t(6 * n + d)] = n_free_++;
  f_free_.setZero(n_free_);
  for (int n = 0; n < n_nodes; ++n)
    for (int d = 0; d < 6; ++d)
      if (const int fi = free_index_[std::size_t(6 * n + d)]; fi >= 0) f_free_(fi) = model_.nodes[std::size_t(n)].load(d);
}

Eigen::SparseMatrix<double> FrameAnalysis::global_stiffness(const std::vector<PipeSection>& sections,
                                                            const Material& mat) const {
  if (sections.size() != model_.elements.size()) throw InvalidArgument("frame: one section per element required");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(model_.elements.size() * 144);
  for (std::size_t k = 0; k < model_.elements.size(); ++k) {
    const Matrix12d T = block_rotation(axes_[k]);
    const Matrix12d kg = T.transpose() * local_stiffness(lengths_[k], sections[k], mat) * T;
    const int base[2] = {6 * model_.elements[k].a, 6 * model_.elements[k].b};
    for (int r = 0; r < 12; ++r)
      for (int c = 0; c < 12; ++c) trip.emplace_back(base[r / 6] + r % 6, base[c / 6] + c % 6, kg(r, c));
  }
  Eigen::SparseMatrix<double> K(dof_count(), dof_count());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

std::vector<Eigen::Triplet<double>> FrameAnalysis::free_triplets(const std::vector<PipeSection>& sections,
                                                                 const Material& mat) const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(model_.elements.size() * 144);
  for (std::size_t k = 0; k < model_.elements.size(); ++k) {
    const Matrix12d T = block_rotation(axes_[k]);
    const Matrix12d kg = T.transpose() * local_stiffness(lengths_[k], sections[k], mat) * T;
    const int base[2] = {6 * model_.elements[k].a, 6 * model_.elements[k].b};
    for (int r = 0; r < 12; ++r) {
      const int fr = free_index_[std::size_t(base[r / 6] + r % 6)];
      if (fr < 0) continue;
      for (int c = 0; c < 12; ++c) {
        const int fc = free_index_[std::size_t(base[c / 6] + c % 6)];
        if (fc >= 0) trip.emplace_back(fr, fc, kg(r, c));
      }
    }
  }
  return trip;
}

FrameSolution FrameAnalysis::solve(const std::vector<PipeSection>& sections, const Material& mat) {
  if (sections.size() != model_.elements.size()) throw InvalidArgument("frame: one section per element required");
  if (!(mat.E > 0.0)) throw InvalidArgument("frame: Young's modulus must be positive");
  const std::vector<Eigen::Triplet<double>> trip = free_triplets(sections, mat);
  Eigen::SparseMatrix<double> K(n_free_, n_free_);
  K.setFromTriplets(trip.begin(), trip.end());

  if (!analyzed_) {
    ldlt_.analyzePattern(K);
    analyzed_ = true;
  }
  ldlt_.factorize(K);
  const Eigen::VectorXd& D = ldlt_.vectorD();
  const double pivot_scale = D.size() > 0 ? D.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index k = 0; k < D.size(); ++k) {
    if (ldlt_.info() != Eigen::Success || !(std::abs(D(k)) > 1e-12 * pivot_scale)) {
      // Locate the DOF whose pivot vanished (in the fill-reducing order).
      const int free_dof = ldlt_.permutationPinv().indices()(k);
      int global = 0;
      for (std::size_t g = 0; g < free_index_.size(); ++g)
        if (free_index_[g] == free_dof) global = static_cast<int>(g);
      static constexpr const char* kNames[6] = {"ux", "uy", "uz", "rx", "ry", "rz"};
      throw SingularError(fmt::format("frame stiffness is singular: zero-energy mode at node {} dof {}", global / 6,
                                      kNames[global % 6]));
    }
  }
  const Eigen::VectorXd u_free = ldlt_.solve(f_free_);

  FrameSolution sol;
  sol.u.setZero(dof_count());
  for (std::size_t g = 0; g < free_index_.size(); ++g)
    if (free_index_[g] >= 0) sol.u(Eigen::Index(g)) = u_free(free_index_[g]);

  sol.reactions.setZero(dof_count());
  for (std::size_t n = 0; n < model_.nodes.size(); ++n) sol.reactions.segment<6>(Eigen::Index(6 * n)) = -model_.nodes[n].load;
  for (std::size_t k = 0; k < model_.elements.size(); ++k) {
    const FrameElement& e = model_.elements[k];
    const Matrix12d T = block_rotation(axes_[k]);
    const Vector12d f_local = local_stiffness(lengths_[k], sections[k], mat) * (T * element_displacements(sol.u, e));
    const Vector12d f_global = T.transpose() * f_local;
    sol.reactions.segment<6>(6 * e.a) += f_global.head<6>();
    sol.reactions.segment<6>(6 * e.b) += f_global.tail<6>();
    sol.end_forces_local.push_back(f_local);
    sol.axial.push_back(f_local(6));
    const Eigen::Matrix3d& R = axes_[k];
    sol.shear_a.push_back(R.transpose() * Eigen::Vector3d(0.0, f_local(1), f_local(2)));
    sol.shear_b.push_back(R.transpose() * Eigen::Vector3d(0.0, f_local(7), f_local(8)));
  }
  return sol;
}

FrameSolution assemble_solve(const FrameModel& model, const std::vector<PipeSection>& sections, const Material& mat) {
  FrameAnalysis analysis(model);
  return analysis.solve(sections, mat);
}

std::vector<PipeSection> member_sections(const GridshellModel& model, const std::vector<double>& group_radii) {
  if (group_radii.size() != model.groups.size()) throw InvalidArgument("one radius per member group required");
  std::vector<PipeSection> cache;
  cache.reserve(group_radii.size());
  for (double R : group_radii) cache.push_back(pipe_section(R));
  std::vector<PipeSection> out;
  out.reserve(model.members.size());
  for (const Member& mb : model.members) out.push_back(cache[std::size_t(mb.group_id)]);
  return out;
}

ShearLoadRatio shear_load_ratio(const FrameSolution& sol, const GridshellModel& model) {
  const std::size_t n = model.nodes.size();
  ShearLoadRatio out;
  out.Q.assign(n, 0.0);
  out.Q_magnitude.assign(n, 0.0);
  out.load.assign(n, 0.0);
  out.ratio.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<Eigen::Vector3d> shear_sum(n, Eigen::Vector3d::Zero());
  for (std::size_t k = 0; k < model.members.size(); ++k) {
    const Member& mb = model.members[k];
    const auto a = std::size_t(mb.node_a), b = std::size_t(mb.node_b);
    shear_sum[a] += sol.shear_a[k];
    shear_sum[b] += sol.shear_b[k];
    out.Q_magnitude[a] += std::abs(sol.shear_a[k].dot(model.nodes[a].normal));
    out.Q_magnitude[b] += std::abs(sol.shear_b[k].dot(model.nodes[b].normal));
  }
  double sum = 0.0, sum_mag = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Node& nd = model.nodes[i];
    out.Q[i] = shear_sum[i].dot(nd.normal);
    out.load[i] = nd.load.norm();
    if (nd.is_boundary) continue;
    if (!(out.load[i] > 0.0)) {
      ++out.skipped;
      continue;
    }
    out.ratio[i] = std::abs(out.Q[i]) / out.load[i];
    sum += out.ratio[i];
    sum_mag += out.Q_magnitude[i] / out.load[i];
    ++count;
  }
  out.mean = count > 0 ? sum / count : 0.0;
  out.mean_magnitude_variant = count > 0 ? sum_mag / count : 0.0;
  return out;
}

}  // namespace gridshell
