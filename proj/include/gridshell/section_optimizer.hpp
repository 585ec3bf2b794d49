#pragma once

// Group-radius sizing: bound-constrained Nelder-Mead on the squared axial force
// deviation, and the one-shot stress-ratio adjustment.

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "gridshell/frame_fem.hpp"
#include "gridshell/gridshell_model.hpp"

namespace gridshell {

struct OptimizationConfig {
  double R_init = 100.0;
  double R_lower = 30.0;
  double R_upper = 300.0;
  int max_iters = 5000;
  double f_tol = 1e-6;
  double simplex_perturbation = 0.05;

  void validate() const;
};

struct ObjectiveValue {
  double F = 0;         ///< sum of squared deviations over objective members
  double max_dev = 0;   ///< max |N - N*|
  double mean_dev = 0;  ///< mean |N - N*|
};

/// Deviation of realized from target axial forces over in_objective members.
ObjectiveValue force_deviation(const GridshellModel& model, const std::vector<double>& axial);

/// FEM-backed objective for one gridshell; fixed groups keep `fixed_radius`.
class SizingProblem {
 public:
  SizingProblem(const GridshellModel& model, Material material, double fixed_radius);

  const GridshellModel& model() const { return model_; }
  const std::vector<int>& variable_groups() const { return variable_; }
  int dimension() const { return static_cast<int>(variable_.size()); }

  /// Radii of all groups from the variable-group radii.
  std::vector<double> expand(const Eigen::VectorXd& variable_radii) const;
  Eigen::VectorXd restrict(const std::vector<double>& group_radii) const;

  FrameSolution analyze(const std::vector<double>& group_radii);
  ObjectiveValue evaluate(const std::vector<double>& group_radii);
  ObjectiveValue evaluate_variables(const Eigen::VectorXd& variable_radii) { return evaluate(expand(variable_radii)); }

 private:
  GridshellModel model_;
  Material material_;
  double fixed_radius_;
  std::vector<int> variable_;
  FrameAnalysis analysis_;
};

/// objective(model, radii): single analysis with per-group radii.
ObjectiveValue objective(const GridshellModel& model, const std::vector<double>& group_radii,
                         const Material& material = {});

struct TraceEntry {
  int iteration = 0;
  ObjectiveValue best;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  ObjectiveValue best;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;  ///< best-so-far after each iteration, iteration 0 = initial simplex
};

using ObjectiveFunction = std::function<ObjectiveValue(const Eigen::VectorXd&)>;

/// Nelder-Mead with box bounds by clipping; minimizes ObjectiveValue::F.
NelderMeadResult nelder_mead(const ObjectiveFunction& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const OptimizationConfig& cfg);

struct SizingResult {
  std::vector<double> radii;  ///< all groups
  NelderMeadResult search;
};

SizingResult optimize_sections(SizingProblem& problem, const OptimizationConfig& cfg);

inline constexpr double kRatioClampLow = 0.25;
inline constexpr double kRatioClampHigh = 4.0;

struct AdjustResult {
  std::vector<double> radii;            ///< all groups
  std::vector<double> group_factor;     ///< area multiplier per group (1 for fixed groups)
  std::vector<double> axial_before;     ///< N^1 with the unadjusted radii
  std::vector<std::string> warnings;
};

/// Orientation of the per-member area ratio.
enum class AdjustRatio { RealizedOverTarget, TargetOverRealized };

/// Area of each variable group scaled by the geometric mean of the clamped
/// member ratios (N^1/N* by default) over its objective members; one analysis,
/// no re-optimization.
AdjustResult stress_ratio_adjust(SizingProblem& transformed, const std::vector<double>& radii_hat,
                                 AdjustRatio ratio = AdjustRatio::RealizedOverTarget);

}  // namespace gridshell
