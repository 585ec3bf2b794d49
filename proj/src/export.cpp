#include "gridshell/export.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cstdint>
#include <fstream>

namespace gridshell {

using nlohmann::json;

namespace {

// Round-trip precision for every number written to CSV/JSON text.
std::string num(double v) { return fmt::format("{:.17g}", v); }

json vec_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(fmt::format("cannot write '{}'", p.string()));
  return os;
}

void write_json(const std::filesystem::path& p, const json& doc) {
  auto os = open_out(p);
  os << doc.dump(2) << '\n';
}

}  // namespace

const std::map<std::string, std::string>& module_versions() {
  static const std::map<std::string, std::string> v = {
      {"laguerre_core", "1.0.0"},    {"cyclide_surface", "1.0.0"},   {"membrane_statics", "1.0.0"},
      {"gridshell_builder", "1.0.0"}, {"frame_fem", "1.0.0"},        {"section_optimizer", "1.0.0"},
      {"cli_reporting", "1.0.0"}};
  return v;
}

void write_field_csv(std::ostream& os, const MembraneField& field) {
  os << "xi,eta,x,y,z,nx,ny,nz,kappa1,kappa2,A1,A2,T1,T2\n";
  for (std::size_t k = 0; k < field.grid.samples.size(); ++k) {
    const Sample& s = field.grid.samples[k];
    os << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", num(s.xi), num(s.eta), num(s.p.x()),
                      num(s.p.y()), num(s.p.z()), num(s.n.x()), num(s.n.y()), num(s.n.z()), num(s.kappa1),
                      num(s.kappa2), num(s.A1), num(s.A2), num(field.T1[k]), num(field.T2[k]));
  }
}

void write_surface_obj(std::ostream& os, const Grid& grid) {
  os << "# sampled surface, mm\n";
  for (const Sample& s : grid.samples) os << fmt::format("v {} {} {}\n", num(s.p.x()), num(s.p.y()), num(s.p.z()));
  for (int i = 0; i < grid.n_xi; ++i)
    for (int j = 0; j < grid.n_eta; ++j)
      os << fmt::format("f {} {} {} {}\n", grid.index(i, j) + 1, grid.index(i + 1, j) + 1,
                        grid.index(i + 1, j + 1) + 1, grid.index(i, j + 1) + 1);
}

void write_wireframe_obj(std::ostream& os, const GridshellModel& model) {
  os << "# gridshell members, mm\n";
  for (const Node& nd : model.nodes)
    os << fmt::format("v {} {} {}\n", num(nd.position.x()), num(nd.position.y()), num(nd.position.z()));
  for (const Member& mb : model.members) os << fmt::format("l {} {}\n", mb.node_a + 1, mb.node_b + 1);
}

json model_json(const GridshellModel& model) {
  json nodes = json::array(), members = json::array(), groups = json::array();
  for (const Node& nd : model.nodes)
    nodes.push_back({{"id", nd.id},
                     {"i", nd.i},
                     {"j", nd.j},
                     {"position", vec_json(nd.position)},
                     {"normal", vec_json(nd.normal)},
                     {"tributary_area", nd.tributary_area},
                     {"support", nd.is_boundary ? "pin" : "free"},
                     {"load", vec_json(nd.load)}});
  for (const Member& mb : model.members)
    members.push_back({{"id", mb.id},
                       {"nodes", {mb.node_a, mb.node_b}},
                       {"direction", to_string(mb.direction)},
                       {"tributary_width", mb.tributary_width},
                       {"target_force", mb.target_force},
                       {"group", mb.group_id},
                       {"in_objective", mb.in_objective}});
  for (const MemberGroup& g : model.groups)
    groups.push_back({{"id", g.id},
                      {"direction", to_string(g.direction)},
                      {"line_index", g.line_index},
                      {"variable", g.variable},
                      {"members", g.member_ids}});
  return {{"grid", {{"n_xi", model.n_xi}, {"n_eta", model.n_eta}}},
          {"Z", model.Z},
          {"objective_members", model.objective_member_count()},
          {"nodes", nodes},
          {"members", members},
          {"groups", groups}};
}

void write_member_csv(std::ostream& os, const GridshellModel& model, const DesignEvaluation& design) {
  os << "id,N,N_target,group,R\n";
  for (const Member& mb : model.members)
    os << fmt::format("{},{},{},{},{}\n", mb.id, num(design.axial[std::size_t(mb.id)]), num(mb.target_force),
                      mb.group_id, num(design.radii[std::size_t(mb.group_id)]));
}

void write_node_csv(std::ostream& os, const GridshellModel& model, const DesignEvaluation& design) {
  os << "id,Q_abs,load_abs,ratio\n";
  for (const Node& nd : model.nodes) {
    const auto k = std::size_t(nd.id);
    const double ratio = design.shear.ratio[k];
    os << fmt::format("{},{},{},{}\n", nd.id, num(std::abs(design.shear.Q[k])), num(design.shear.load[k]),
                      std::isnan(ratio) ? std::string() : num(ratio));
  }
}

void write_trace_csv(std::ostream& os, const NelderMeadResult& search) {
  os << "iteration,F,max_dev,mean_dev\n";
  for (const TraceEntry& t : search.trace)
    os << fmt::format("{},{},{},{}\n", t.iteration, num(t.best.F), num(t.best.max_dev), num(t.best.mean_dev));
}

json design_json(const GridshellModel& model, const DesignEvaluation& design) {
  json groups = json::array();
  for (const MemberGroup& g : model.groups)
    groups.push_back({{"id", g.id}, {"variable", g.variable}, {"R", design.radii[std::size_t(g.id)]}});
  json members = json::array();
  for (const Member& mb : model.members)
    members.push_back({{"id", mb.id}, {"N", design.axial[std::size_t(mb.id)]}, {"N_target", mb.target_force}});
  return {{"F", design.deviation.F},
          {"max_abs_deviation", design.deviation.max_dev},
          {"mean_abs_deviation", design.deviation.mean_dev},
          {"mean_shear_load_ratio", design.shear.mean},
          {"mean_shear_load_ratio_magnitude_variant", design.shear.mean_magnitude_variant},
          {"groups", groups},
          {"members", members}};
}

json geometry_json(const CornerGeometry& g) {
  json corners = json::array();
  for (const auto& c : g.corners) corners.push_back({c.x(), c.y()});
  return {{"corners", corners},
          {"corner_distances", g.distances},
          {"rise", g.rise},
          {"corner_planarity", g.planarity}};
}

std::string report_tables(const PipelineResult& r) {
  std::string out;
  const auto row = [](const char* name, const DesignEvaluation& d) {
    return fmt::format("| {} | {:.1f} | {:.1f} | {:.3f} |\n", name, d.deviation.max_dev, d.deviation.mean_dev,
                       d.shear.mean);
  };
  const char* header = "| Design | Max abs(N-N*) (N) | Mean abs(N-N*) (N) | Mean shear/load |\n|---|---|---|---|\n";
  out += "## Before transformation\n\n";
  out += header;
  out += row("Initial", r.initial_before);
  out += row("Optimal", r.optimal_before);
  if (r.transformed && r.completed >= Stage::Adjust) {
    out += "\n## After transformation\n\n";
    out += header;
    out += row("Initial", r.initial_after);
    out += row("Optimal", r.optimal_after);
    out += row("Before adjustment", r.before_adjustment);
    out += row("After adjustment", r.after_adjustment);
  }
  const auto geometry = [&](const char* title, const CornerGeometry& g) {
    out += fmt::format("\n## Corner geometry ({})\n\n| Corner | x (mm) | y (mm) |\n|---|---|---|\n", title);
    for (std::size_t k = 0; k < 4; ++k)
      out += fmt::format("| {} | {:.1f} | {:.1f} |\n", k, g.corners[k].x(), g.corners[k].y());
    out += fmt::format("\nRise: {:.1f} mm\n", g.rise);
  };
  geometry("before transformation", r.geometry_before);
  if (r.transformed) geometry("after transformation", r.geometry_after);
  out += fmt::format("\nI0 before transformation: {:.1f} N\n", r.field_before.I0);
  if (r.transformed) out += fmt::format("I0 after transformation: {:.1f} N\n", r.field_after.I0);
  return out;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

json manifest_json(const PipelineResult& r, const std::string& command) {
  return {{"command", command},
          {"completed_stage", to_string(r.completed)},
          {"config_hash", config_hash(r.config.source)},
          {"config", r.config.source},
          {"module_versions", module_versions()},
          {"tolerances",
           {{"pseudo_orthogonality", kPseudoOrthogonalityTol},
            {"frame_isothermic", kFrameIsothermicTol},
            {"fd_step", r.config.fd_step},
            {"optimizer_f_tol", r.config.optimization.f_tol},
            {"adjust_ratio_clamp", {kRatioClampLow, kRatioClampHigh}}}},
          {"I0_before", r.field_before.I0},
          {"I0_after", r.transformed ? json(r.field_after.I0) : json(nullptr)},
          {"label_self_test", {{"implemented", r.label_test.implemented}, {"swapped", r.label_test.swapped}}}};
}

void write_outputs(const PipelineResult& r, const std::filesystem::path& dir, const std::string& command) {
  std::filesystem::create_directories(dir);
  const auto file = [&](const std::string& name) { return open_out(dir / name); };
  {
    auto os = file("field_before.csv");
    write_field_csv(os, r.field_before);
  }
  {
    auto os = file("surface_before.obj");
    write_surface_obj(os, r.field_before.grid);
  }
  if (r.transformed && r.completed >= Stage::Transform) {
    auto os = file("field_after.csv");
    write_field_csv(os, r.field_after);
    auto obj = file("surface_after.obj");
    write_surface_obj(obj, r.field_after.grid);
  }
  if (r.completed >= Stage::Target) {
    write_json(dir / "model_before.json", model_json(r.model_before));
    auto os = file("wireframe_before.obj");
    write_wireframe_obj(os, r.model_before);
    if (r.transformed) {
      write_json(dir / "model_after.json", model_json(r.model_after));
      auto os2 = file("wireframe_after.obj");
      write_wireframe_obj(os2, r.model_after);
    }
  }
  const auto design_files = [&](const std::string& tag, const GridshellModel& model, const DesignEvaluation& d) {
    auto m = file("members_" + tag + ".csv");
    write_member_csv(m, model, d);
    auto n = file("nodes_" + tag + ".csv");
    write_node_csv(n, model, d);
    write_json(dir / ("result_" + tag + ".json"), design_json(model, d));
  };
  if (r.completed >= Stage::Optimize) {
    auto t = file("trace_before.csv");
    write_trace_csv(t, r.search_before);
    design_files("initial_before", r.model_before, r.initial_before);
    design_files("optimal_before", r.model_before, r.optimal_before);
    if (r.transformed) {
      auto t2 = file("trace_after.csv");
      write_trace_csv(t2, r.search_after);
      design_files("initial_after", r.model_after, r.initial_after);
      design_files("optimal_after", r.model_after, r.optimal_after);
    }
  }
  if (r.completed >= Stage::Adjust && r.transformed) {
    design_files("before_adjustment", r.model_after, r.before_adjustment);
    design_files("after_adjustment", r.model_after, r.after_adjustment);
    json warn = r.adjustment.warnings;
    write_json(dir / "adjust_warnings.json", warn);
  }
  if (r.completed >= Stage::Report) {
    auto os = file("report.md");
    os << report_tables(r);
    json geo = {{"before", geometry_json(r.geometry_before)}};
    if (r.transformed) geo["after"] = geometry_json(r.geometry_after);
    write_json(dir / "geometry.json", geo);
  }
  write_json(dir / "manifest.json", manifest_json(r, command));
}

}  // namespace gridshell
