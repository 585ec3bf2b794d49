#pragma once

// Config-driven workflow: surface, transformation, grid, sizing, adjustment.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gridshell/frame_fem.hpp"
#include "gridshell/gridshell_model.hpp"
#include "gridshell/laguerre.hpp"
#include "gridshell/membrane.hpp"
#include "gridshell/section_optimizer.hpp"

namespace gridshell {

struct GeneratorRecord {
  std::string kind;   ///< pe_rotation | offset | scaling | euclidean
  std::string plane;  ///< x2x3 | x3x1 | x1x2 for pe_rotation
  double value = 0;   ///< tau, offset distance or scaling factor
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();  ///< euclidean rotation axis
  double angle = 0;                                 ///< euclidean rotation angle (rad)
  Eigen::Vector3d shift = Eigen::Vector3d::Zero();
};

struct PipelineConfig {
  CyclideParams<double> surface;
  double center_xi = 0;
  double center_eta = 0;
  double fd_step = kDefaultFdStep;
  int n_xi = 14;
  int n_eta = 16;
  double Z = -0.0005;
  std::vector<GeneratorRecord> transformation;  ///< in application order
  Material material;
  OptimizationConfig optimization;
  TargetPairing pairing = TargetPairing::Crossing;
  AdjustRatio adjust_ratio = AdjustRatio::RealizedOverTarget;
  std::string output_dir = "out";
  nlohmann::json source;  ///< config document as read

  static PipelineConfig from_json(const nlohmann::json& doc);
  static PipelineConfig load(const std::filesystem::path& path);
};

/// Composition of the generator list; identity when empty.
LaguerreMap<double> build_map(const std::vector<GeneratorRecord>& records);

enum class Stage { Surface = 0, Transform, Target, Optimize, Adjust, Report };

const char* to_string(Stage s);

/// One sizing state: radii with its deviation and shear figures.
struct DesignEvaluation {
  std::vector<double> radii;
  std::vector<double> axial;
  ObjectiveValue deviation;
  ShearLoadRatio shear;
};

struct PipelineResult {
  PipelineConfig config;
  LaguerreMap<double> map;
  bool transformed = false;
  Stage completed = Stage::Surface;

  MembraneField field_before;
  MembraneField field_after;
  LabelSelfTest label_test;

  GridshellModel model_before;
  GridshellModel model_after;
  CornerGeometry geometry_before;
  CornerGeometry geometry_after;

  DesignEvaluation initial_before;
  DesignEvaluation optimal_before;
  NelderMeadResult search_before;

  DesignEvaluation initial_after;
  DesignEvaluation optimal_after;
  NelderMeadResult search_after;
  DesignEvaluation before_adjustment;
  DesignEvaluation after_adjustment;
  AdjustResult adjustment;
};

/// Runs every stage up to and including `until`; errors carry the stage name.
PipelineResult run_pipeline(const PipelineConfig& config, Stage until = Stage::Report);

struct CheckOutcome {
  std::string name;
  double value = 0;
  double tolerance = 0;
  bool passed = false;
};

/// Quick invariant suite on the configured geometry (fixed RNG seed).
std::vector<CheckOutcome> seed_check(const PipelineConfig& config);

}  // namespace gridshell
