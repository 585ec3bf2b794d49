#pragma once

// Plain-text exports: CSV tables, OBJ geometry, JSON documents.

#include <filesystem>
#include <map>
#include <ostream>
#include <string>

#include "json.hpp"

#include "gridshell/pipeline.hpp"

namespace gridshell {

/// Semantic versions of the library modules, recorded in run manifests.
const std::map<std::string, std::string>& module_versions();

void write_field_csv(std::ostream& os, const MembraneField& field);
void write_surface_obj(std::ostream& os, const Grid& grid);
void write_wireframe_obj(std::ostream& os, const GridshellModel& model);
nlohmann::json model_json(const GridshellModel& model);

void write_member_csv(std::ostream& os, const GridshellModel& model, const DesignEvaluation& design);
void write_node_csv(std::ostream& os, const GridshellModel& model, const DesignEvaluation& design);
void write_trace_csv(std::ostream& os, const NelderMeadResult& search);
nlohmann::json design_json(const GridshellModel& model, const DesignEvaluation& design);

nlohmann::json geometry_json(const CornerGeometry& g);

/// Deviation/shear table with one row per design state, as Markdown.
std::string report_tables(const PipelineResult& result);

/// FNV-1a of the canonical config dump, hex.
std::string config_hash(const nlohmann::json& config);
nlohmann::json manifest_json(const PipelineResult& result, const std::string& command);

/// Writes every artifact available for the completed stages into `dir`.
void write_outputs(const PipelineResult& result, const std::filesystem::path& dir, const std::string& command);

}  // namespace gridshell
