#pragma once

// Linear elastic space frame with 12-DOF Euler-Bernoulli elements.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <optional>
#include <vector>

#include "gridshell/gridshell_model.hpp"

namespace gridshell {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector12d = Eigen::Matrix<double, 12, 1>;
using Matrix12d = Eigen::Matrix<double, 12, 12>;

struct Material {
  double E = 205000.0;  ///< N/mm^2
  double nu = 0.3;
  double G() const { return E / (2.0 * (1.0 + nu)); }
};

inline constexpr double kPipeThicknessRatio = 0.1;

struct PipeSection {
  double R = 0;
  double t_ratio = kPipeThicknessRatio;
  double A = 0;
  double I = 0;
  double J = 0;
};

PipeSection pipe_section(double R, double t_ratio = kPipeThicknessRatio);
double pipe_radius_from_area(double area, double t_ratio = kPipeThicknessRatio);

struct FrameNode {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  /// Reference direction for the local z axis of attached elements.
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  std::array<bool, 6> fixed{};
  Vector6d load = Vector6d::Zero();
};

struct FrameElement {
  int a = 0;
  int b = 0;
};

struct FrameModel {
  std::vector<FrameNode> nodes;
  std::vector<FrameElement> elements;
};

/// Gridshell as a frame: boundary nodes pinned, pressure loads applied.
FrameModel to_frame_model(const GridshellModel& model);

struct FrameSolution {
  Eigen::VectorXd u;          ///< 6 DOFs per node
  Eigen::VectorXd reactions;  ///< K u - f, nonzero only at fixed DOFs up to round-off
  std::vector<Vector12d> end_forces_local;
  std::vector<double> axial;  ///< tension positive
  std::vector<Eigen::Vector3d> shear_a;  ///< global shear force at end a
  std::vector<Eigen::Vector3d> shear_b;
};

/// Element axes: rows are local x (a to b), y, z in global coordinates.
Eigen::Matrix3d element_axes(const Eigen::Vector3d& pa, const Eigen::Vector3d& pb, const Eigen::Vector3d& reference);

Matrix12d local_stiffness(double L, const PipeSection& s, const Material& mat);

/// Assembly and factorization for one frame topology; the sparsity pattern is
/// analyzed once and reused by every solve. Not safe to share between threads.
class FrameAnalysis {
 public:
  explicit FrameAnalysis(FrameModel model);

  const FrameModel& model() const { return model_; }
  int dof_count() const { return 6 * static_cast<int>(model_.nodes.size()); }

  /// Unconstrained global stiffness.
  Eigen::SparseMatrix<double> global_stiffness(const std::vector<PipeSection>& sections, const Material& mat) const;

  FrameSolution solve(const std::vector<PipeSection>& sections, const Material& mat);

 private:
  std::vector<Eigen::Triplet<double>> free_triplets(const std::vector<PipeSection>& sections,
                                                    const Material& mat) const;

  FrameModel model_;
  std::vector<Eigen::Matrix3d> axes_;
  std::vector<double> lengths_;
  std::vector<int> free_index_;  // -1 for fixed DOFs
  int n_free_ = 0;
  Eigen::VectorXd f_free_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
};

FrameSolution assemble_solve(const FrameModel& model, const std::vector<PipeSection>& sections, const Material& mat);

/// Per-member sections from per-group radii.
std::vector<PipeSection> member_sections(const GridshellModel& model, const std::vector<double>& group_radii);

struct ShearLoadRatio {
  std::vector<double> Q;            ///< signed sum of end shears projected on the node normal
  std::vector<double> Q_magnitude;  ///< sum of |end shear . normal|, diagnostic variant
  std::vector<double> load;         ///< |nodal load|
  std::vector<double> ratio;        ///< |Q| / |load|; NaN where skipped
  double mean = 0;                  ///< over non-boundary nodes with nonzero load
  double mean_magnitude_variant = 0;
  int skipped = 0;
};

ShearLoadRatio shear_load_ratio(const FrameSolution& sol, const GridshellModel& model);

}  // namespace gridshell
