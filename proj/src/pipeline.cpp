#include "gridshell/pipeline.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <random>

namespace gridshell {

namespace {

using nlohmann::json;

double angle(const json& v, double unit) { return v.get<double>() * unit; }

PePlane parse_plane(const std::string& s) {
  if (s == "x2x3") return PePlane::X2X3;
  if (s == "x3x1") return PePlane::X3X1;
  if (s == "x1x2") return PePlane::X1X2;
  throw InvalidArgument(fmt::format("unknown pe-rotation plane '{}'", s));
}

GeneratorRecord parse_generator(const json& g) {
  GeneratorRecord r;
  r.kind = g.at("kind").get<std::string>();
  if (r.kind == "pe_rotation") {
    r.plane = g.at("plane").get<std::string>();
    parse_plane(r.plane);
    r.value = g.at("tau").get<double>();
  } else if (r.kind == "offset") {
    r.value = g.at("d").get<double>();
  } else if (r.kind == "scaling") {
    r.value = g.at("factor").get<double>();
  } else if (r.kind == "euclidean") {
    if (g.contains("axis")) {
      const auto a = g.at("axis").get<std::vector<double>>();
      if (a.size() != 3) throw InvalidArgument("euclidean generator: axis needs 3 components");
      r.axis = Eigen::Vector3d(a[0], a[1], a[2]);
    }
    r.angle = g.value("angle", 0.0);
    if (g.contains("shift")) {
      const auto s = g.at("shift").get<std::vector<double>>();
      if (s.size() != 3) throw InvalidArgument("euclidean generator: shift needs 3 components");
      r.shift = Eigen::Vector3d(s[0], s[1], s[2]);
    }
  } else {
    throw InvalidArgument(fmt::format("unknown generator kind '{}'", r.kind));
  }
  return r;
}

std::pair<double, double> range_of(const json& v, double unit) {
  if (!v.is_array() || v.size() != 2) throw InvalidArgument("parameter ranges must be [lo, hi]");
  return {angle(v[0], unit), angle(v[1], unit)};
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& doc) {
  PipelineConfig c;
  c.source = doc;
  try {
    const json& s = doc.at("surface");
    const double unit = s.value("angle_unit", std::string("rad")) == "pi" ? M_PI : 1.0;
    const bool circle = s.value("eta_is_circle_angle", false);
    const auto to_eta = [&](double v) { return circle ? circle_angle_to_eta(v) : v; };
    const auto [xlo, xhi] = range_of(s.at("xi_range"), unit);
    const auto [elo, ehi] = range_of(s.at("eta_range"), unit);
    c.surface = CyclideParams<double>::from_a0(s.at("a0").get<double>(), xlo, xhi, to_eta(elo), to_eta(ehi),
                                               s.value("scale", 1.0));
    const json& center = s.at("center");
    if (!center.is_array() || center.size() != 2) throw InvalidArgument("surface.center must be [xi, eta]");
    c.center_xi = angle(center[0], unit);
    c.center_eta = to_eta(angle(center[1], unit));
    c.fd_step = s.value("fd_step", kDefaultFdStep);

    const json& grid = doc.at("grid");
    c.n_xi = grid.at("n_xi").get<int>();
    c.n_eta = grid.at("n_eta").get<int>();
    if (c.n_xi < 2 || c.n_eta < 2) throw InvalidArgument("grid counts must be at least 2");
    c.Z = doc.at("load").at("Z").get<double>();

    if (doc.contains("transformation"))
      for (const json& g : doc.at("transformation")) c.transformation.push_back(parse_generator(g));
    if (doc.contains("material")) {
      c.material.E = doc["material"].value("E", c.material.E);
      c.material.nu = doc["material"].value("nu", c.material.nu);
    }
    if (doc.contains("optimization")) {
      const json& o = doc["optimization"];
      OptimizationConfig& oc = c.optimization;
      oc.R_init = o.value("R_init", oc.R_init);
      oc.R_lower = o.value("R_lower", oc.R_lower);
      oc.R_upper = o.value("R_upper", oc.R_upper);
      oc.max_iters = o.value("max_iters", oc.max_iters);
      oc.f_tol = o.value("f_tol", oc.f_tol);
      oc.simplex_perturbation = o.value("simplex_perturbation", oc.simplex_perturbation);
    }
    c.optimization.validate();
    if (doc.contains("targets")) {
      const std::string pairing = doc["targets"].value("pairing", std::string("crossing"));
      if (pairing == "crossing") c.pairing = TargetPairing::Crossing;
      else if (pairing == "along") c.pairing = TargetPairing::Along;
      else throw InvalidArgument(fmt::format("config: unknown target pairing '{}'", pairing));
    }
    if (doc.contains("adjustment")) {
      const std::string ratio = doc["adjustment"].value("ratio", std::string("realized_over_target"));
      if (ratio == "realized_over_target") c.adjust_ratio = AdjustRatio::RealizedOverTarget;
      else if (ratio == "target_over_realized") c.adjust_ratio = AdjustRatio::TargetOverRealized;
      else throw InvalidArgument(fmt::format("config: unknown adjustment ratio '{}'", ratio));
    }
    if (doc.contains("outputs")) c.output_dir = doc["outputs"].value("directory", c.output_dir);
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("config: {}", e.what()));
  }
  if (!(c.center_xi >= c.surface.xi_min && c.center_xi <= c.surface.xi_max && c.center_eta >= c.surface.eta_min &&
        c.center_eta <= c.surface.eta_max))
    throw InvalidArgument("config: center lies outside the patch");
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open config '{}'", path.string()));
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("config '{}': {}", path.string(), e.what()));
  }
  return from_json(doc);
}

LaguerreMap<double> build_map(const std::vector<GeneratorRecord>& records) {
  std::vector<LaguerreMap<double>> maps;
  for (const GeneratorRecord& r : records) {
    if (r.kind == "pe_rotation") {
      maps.push_back(make_pe_rotation(parse_plane(r.plane), r.value));
    } else if (r.kind == "offset") {
      maps.push_back(make_offset(r.value));
    } else if (r.kind == "scaling") {
      maps.push_back(make_scaling(r.value));
    } else if (r.kind == "euclidean") {
      const Eigen::Matrix3d rot = Eigen::AngleAxisd(r.angle, r.axis.normalized()).toRotationMatrix();
      maps.push_back(make_euclidean<double>(rot, r.shift));
    } else {
      throw InvalidArgument(fmt::format("unknown generator kind '{}'", r.kind));
    }
  }
  if (maps.empty()) return {};
  return compose(std::span<const LaguerreMap<double>>(maps));
}

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Surface: return "surface";
    case Stage::Transform: return "transform";
    case Stage::Target: return "target";
    case Stage::Optimize: return "optimize";
    case Stage::Adjust: return "adjust";
    case Stage::Report: return "report";
  }
  return "unknown";
}

namespace {

template <typename Fn>
void run_stage(Stage stage, Fn&& fn) {
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(to_string(stage), e.what());
  }
}

DesignEvaluation evaluate_design(SizingProblem& problem, std::vector<double> radii) {
  DesignEvaluation d;
  const FrameSolution sol = problem.analyze(radii);
  d.radii = std::move(radii);
  d.axial = sol.axial;
  d.deviation = force_deviation(problem.model(), sol.axial);
  d.shear = shear_load_ratio(sol, problem.model());
  return d;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, Stage until) {
  PipelineResult r;
  r.config = config;
  const auto reached = [&](Stage s) { return static_cast<int>(until) >= static_cast<int>(s); };

  run_stage(Stage::Surface, [&] {
    const ParameterBox box{config.surface.xi_min, config.surface.xi_max, config.surface.eta_min,
                           config.surface.eta_max};
    r.field_before = make_field(cyclide_source(config.surface, config.fd_step), box, config.n_xi, config.n_eta,
                                config.Z, config.center_xi, config.center_eta);
    r.label_test = force_label_self_test(r.field_before);
    if (!r.label_test.passed())
      throw FrameInconsistency(fmt::format("force-label self-test failed: implemented {:.3e} vs swapped {:.3e}",
                                           r.label_test.implemented, r.label_test.swapped));
  });
  r.completed = Stage::Surface;
  if (!reached(Stage::Transform)) return r;

  run_stage(Stage::Transform, [&] {
    r.transformed = !config.transformation.empty();
    if (r.transformed) {
      r.map = build_map(config.transformation);
      r.field_after = transform_field(r.field_before, r.map);
    }
  });
  r.completed = Stage::Transform;
  if (!reached(Stage::Target)) return r;

  run_stage(Stage::Target, [&] {
    r.model_before = build_gridshell(r.field_before, config.pairing);
    r.geometry_before = corner_geometry(r.model_before);
    if (r.transformed) {
      r.model_after = build_gridshell(r.field_after, config.pairing);
      r.geometry_after = corner_geometry(r.model_after);
    }
  });
  r.completed = Stage::Target;
  if (!reached(Stage::Optimize)) return r;

  const OptimizationConfig& oc = config.optimization;
  std::optional<SizingProblem> before;
  std::optional<SizingProblem> after;
  run_stage(Stage::Optimize, [&] {
    before.emplace(r.model_before, config.material, oc.R_init);
    r.initial_before = evaluate_design(*before, std::vector<double>(r.model_before.groups.size(), oc.R_init));
    const SizingResult opt = optimize_sections(*before, oc);
    r.search_before = opt.search;
    r.optimal_before = evaluate_design(*before, opt.radii);
    if (r.transformed) {
      after.emplace(r.model_after, config.material, oc.R_init);
      r.initial_after = evaluate_design(*after, std::vector<double>(r.model_after.groups.size(), oc.R_init));
      const SizingResult re = optimize_sections(*after, oc);
      r.search_after = re.search;
      r.optimal_after = evaluate_design(*after, re.radii);
    }
  });
  r.completed = Stage::Optimize;
  if (!reached(Stage::Adjust)) return r;

  run_stage(Stage::Adjust, [&] {
    if (!r.transformed) return;
    r.before_adjustment = evaluate_design(*after, r.optimal_before.radii);
    r.adjustment = stress_ratio_adjust(*after, r.optimal_before.radii, config.adjust_ratio);
    r.after_adjustment = evaluate_design(*after, r.adjustment.radii);
  });
  r.completed = Stage::Adjust;
  if (!reached(Stage::Report)) return r;
  r.completed = Stage::Report;
  return r;
}

std::vector<CheckOutcome> seed_check(const PipelineConfig& config) {
  std::vector<CheckOutcome> out;
  const auto add = [&](std::string name, double value, double tol) {
    out.push_back({std::move(name), value, tol, value <= tol});
  };

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> coord(-10.0, 10.0), tau(-0.5, 0.5);
  const PePlane planes[3] = {PePlane::X2X3, PePlane::X3X1, PePlane::X1X2};
  double pe_err = 0.0, orth_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const LaguerreMap<double> m = compose<double>({make_pe_rotation(planes[trial % 3], tau(rng)),
                                                   make_pe_rotation(planes[(trial + 1) % 3], tau(rng)),
                                                   make_pe_rotation(planes[(trial + 2) % 3], tau(rng))});
    const Vec4<double> x(coord(rng), coord(rng), coord(rng), coord(rng));
    const Vec4<double> y(coord(rng), coord(rng), coord(rng), coord(rng));
    const double before = pe_dot(x, y);
    const double after = pe_dot(m.D() * x, m.D() * y);
    pe_err = std::max(pe_err, std::abs(after - before) / std::max(1.0, std::abs(before)));
    orth_err = std::max(orth_err, m.pseudo_orthogonality_error());
  }
  add("pe-inner product invariance", pe_err, 1e-10);
  add("pseudo-orthogonality of compositions", orth_err, kPseudoOrthogonalityTol);

  const ParameterBox box{config.surface.xi_min, config.surface.xi_max, config.surface.eta_min, config.surface.eta_max};
  const MembraneField field = make_field(cyclide_source(config.surface, config.fd_step), box, config.n_xi,
                                         config.n_eta, config.Z, config.center_xi, config.center_eta);
  double iso = 0.0;
  for (const Sample& s : field.grid.samples) iso = std::max(iso, s.isothermic_mismatch());
  add("L-isothermic mismatch", iso, 1e-4);
  add("normal equilibrium residual", equilibrium_residuals(field).normal, 1e-12);
  const LabelSelfTest labels = force_label_self_test(field);
  add("force-label self-test margin", labels.implemented / labels.swapped, 1.0);

  const LaguerreMap<double> map = build_map(config.transformation);
  const LaguerreMap<double> inv = map.inverse();
  double roundtrip = 0.0;
  for (const Sample& s : field.grid.samples) {
    const ContactElement<double> ce{s.p, s.n, 1.0};
    const ContactElement<double> back = transform_contact_element(inv, transform_contact_element(map, ce));
    roundtrip = std::max(roundtrip, (back.p - ce.p).norm() / (1.0 + ce.p.norm()) + (back.n - ce.n).norm());
  }
  add("contact element round trip", roundtrip, 1e-9);

  const GridshellModel model = build_gridshell(field);
  FrameAnalysis analysis(to_frame_model(model));
  const FrameSolution sol =
      analysis.solve(member_sections(model, std::vector<double>(model.groups.size(), config.optimization.R_init)),
                     config.material);
  double free_residual = 0.0, load_norm = 0.0;
  for (std::size_t n = 0; n < model.nodes.size(); ++n) {
    load_norm = std::max(load_norm, model.nodes[n].load.norm());
    if (!model.nodes[n].is_boundary)
      free_residual = std::max(free_residual, sol.reactions.segment<3>(Eigen::Index(6 * n)).norm());
  }
  add("frame equilibrium residual", load_norm > 0 ? free_residual / load_norm : free_residual, 1e-8);
  return out;
}

}  // namespace gridshell
