#include "gridshell/membrane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gridshell {

namespace {

struct Linear {
  double constant;
  double slope;  // d/dI0
};

// Closed-form forces as affine functions of I0, for the formula's own index
// order (first = the direction the formula labels 1).
void force_coefficients(double k_first, double A_first, double k_second, double A_second, double Z, Linear& t_first,
                        Linear& t_second) {
  if (k_first == 0.0 || k_second == 0.0) throw SingularError("membrane forces: zero principal curvature (flat point)");
  if (A_first == 0.0) throw SingularError("membrane forces: zero parametric speed");
  const double rel = (A_first - A_second) / A_first;
  t_first = {-Z / (2.0 * k_second), -1.0 / (k_second * A_second * A_second)};
  t_second = {-Z / (2.0 * k_first) * (1.0 - rel * rel), 1.0 / (k_first * A_first * A_first)};
}

// The closed form presumes k1 A1 = k2 A2 exactly; the eta speed is closed by
// that relation so normal equilibrium holds to round-off on numerical frames.
void directional_coefficients(const Sample& s, double Z, ForceLabels labels, Linear& along_xi, Linear& along_eta) {
  if (s.kappa2 == 0.0) throw SingularError("membrane forces: zero principal curvature (flat point)");
  const double A2 = s.kappa1 * s.A1 / s.kappa2;
  if (labels == ForceLabels::XiFirst) {
    force_coefficients(s.kappa1, s.A1, s.kappa2, A2, Z, along_xi, along_eta);
  } else {
    force_coefficients(s.kappa2, A2, s.kappa1, s.A1, Z, along_eta, along_xi);
  }
}

std::vector<double> ln_abs(const Grid& g, double Sample::*member) {
  std::vector<double> out(g.samples.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::log(std::abs(g.samples[k].*member));
  return out;
}

struct GridDiff {
  const Grid& g;
  double dxi;
  double deta;
  explicit GridDiff(const Grid& grid)
      : g(grid), dxi(grid.xi[1] - grid.xi[0]), deta(grid.eta[1] - grid.eta[0]) {}
  double at(const std::vector<double>& f, int i, int j) const { return f[std::size_t(g.index(i, j))]; }
  double d_xi(const std::vector<double>& f, int i, int j) const {
    return (at(f, i + 1, j) - at(f, i - 1, j)) / (2.0 * dxi);
  }
  double d_eta(const std::vector<double>& f, int i, int j) const {
    return (at(f, i, j + 1) - at(f, i, j - 1)) / (2.0 * deta);
  }
  double d_xieta(const std::vector<double>& f, int i, int j) const {
    return (at(f, i + 1, j + 1) - at(f, i + 1, j - 1) - at(f, i - 1, j + 1) + at(f, i - 1, j - 1)) / (4.0 * dxi * deta);
  }
};

void require_interior(const Grid& g) {
  if (g.n_xi < 2 || g.n_eta < 2) throw InvalidArgument("residuals need at least one interior sample");
}

double tangential_residual(const Grid& g, const std::vector<double>& T1, const std::vector<double>& T2, bool xi_dir) {
  const GridDiff D(g);
  const std::vector<double> lnA = ln_abs(g, xi_dir ? &Sample::A2 : &Sample::A1);
  double worst = 0.0;
  double scale = 0.0;
  for (int i = 1; i < g.n_xi; ++i) {
    for (int j = 1; j < g.n_eta; ++j) {
      const double T_own = D.at(xi_dir ? T1 : T2, i, j);
      const double T_other = D.at(xi_dir ? T2 : T1, i, j);
      const double dT = xi_dir ? D.d_xi(T1, i, j) : D.d_eta(T2, i, j);
      const double dlnA = xi_dir ? D.d_xi(lnA, i, j) : D.d_eta(lnA, i, j);
      worst = std::max(worst, std::abs(dT + dlnA * (T_own - T_other)));
      scale = std::max(scale, std::abs(dT) + std::abs(dlnA * (T_own - T_other)));
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace

MembraneForces membrane_forces(const Sample& s, double Z, double I0, ForceLabels labels) {
  Linear xi{}, eta{};
  directional_coefficients(s, Z, labels, xi, eta);
  return {xi.constant + xi.slope * I0, eta.constant + eta.slope * I0};
}

double solve_I0(const Sample& center, double Z, ForceLabels labels) {
  Linear xi{}, eta{};
  directional_coefficients(center, Z, labels, xi, eta);
  // T1 A2 - T2 A1 = c + m I0
  const double A1 = center.A1;
  const double A2 = center.A2;
  const double c = xi.constant * A2 - eta.constant * A1;
  const double m = xi.slope * A2 - eta.slope * A1;
  const double m_scale = std::abs(xi.slope * A2) + std::abs(eta.slope * A1);
  if (!(std::abs(m) > 1e-12 * m_scale)) throw ConditionDegenerate("solve_I0: center condition does not involve I0");
  return -c / m;
}

FrameSource cyclide_source(const CyclideParams<double>& params, double h) {
  params.validate();
  return [params, h](double xi, double eta) { return eval_frame(params, xi, eta, h); };
}

MembraneForces MembraneField::forces_at(double xi, double eta) const {
  return membrane_forces(source(xi, eta), Z, I0, labels);
}

namespace {

void fill_forces(MembraneField& f) {
  f.T1.resize(f.grid.samples.size());
  f.T2.resize(f.grid.samples.size());
  for (std::size_t k = 0; k < f.grid.samples.size(); ++k) {
    const MembraneForces t = membrane_forces(f.grid.samples[k], f.Z, f.I0, f.labels);
    f.T1[k] = t.T1;
    f.T2[k] = t.T2;
  }
}

}  // namespace

MembraneField make_field(FrameSource source, const ParameterBox& box, int n_xi, int n_eta, double Z,
                         double center_xi, double center_eta, ForceLabels labels) {
  MembraneField f;
  f.grid = sample_grid_with<double>(source, box.xi_min, box.xi_max, box.eta_min, box.eta_max, n_xi, n_eta);
  f.Z = Z;
  f.center_xi = center_xi;
  f.center_eta = center_eta;
  f.labels = labels;
  f.source = std::move(source);
  f.I0 = solve_I0(f.source(center_xi, center_eta), Z, labels);
  fill_forces(f);
  return f;
}

EquilibriumResiduals equilibrium_residuals(const MembraneField& field) {
  const Grid& g = field.grid;
  require_interior(g);
  EquilibriumResiduals r;
  r.tangential_xi = tangential_residual(g, field.T1, field.T2, true);
  r.tangential_eta = tangential_residual(g, field.T1, field.T2, false);
  double worst = 0.0;
  double scale = std::abs(field.Z);
  for (std::size_t k = 0; k < g.samples.size(); ++k) {
    const Sample& s = g.samples[k];
    const double a = s.kappa1 * field.T1[k];
    const double b = s.kappa2 * field.T2[k];
    worst = std::max(worst, std::abs(a + b + field.Z));
    scale = std::max({scale, std::abs(a), std::abs(b)});
  }
  r.normal = scale > 0.0 ? worst / scale : worst;
  return r;
}

CompatibilityResidual compatibility_residual(const MembraneField& field) {
  const Grid& g = field.grid;
  require_interior(g);
  const GridDiff D(g);
  const std::vector<double> lk1 = ln_abs(g, &Sample::kappa1);
  const std::vector<double> lk2 = ln_abs(g, &Sample::kappa2);
  const std::vector<double> lA1 = ln_abs(g, &Sample::A1);
  const std::vector<double> lA2 = ln_abs(g, &Sample::A2);

  double worst_w = 0.0, scale_w = 0.0, worst_c = 0.0, scale_c = 0.0;
  for (int i = 1; i < g.n_xi; ++i) {
    for (int j = 1; j < g.n_eta; ++j) {
      const Sample& s = g.at(i, j);
      const double ratio_mixed = D.d_xieta(lA1, i, j) + D.d_xieta(lk1, i, j) - D.d_xieta(lA2, i, j) -
                                 D.d_xieta(lk2, i, j);
      const double k1_xi = D.d_xi(lk1, i, j);
      const double k2_eta = D.d_eta(lk2, i, j);
      const double terms[] = {D.d_xieta(lk1, i, j) + D.d_xieta(lk2, i, j), D.d_eta(lA1, i, j) * k1_xi,
                              D.d_xi(lA2, i, j) * k2_eta, -k1_xi * k2_eta};
      double upsilon = 0.0, term_scale = std::abs(ratio_mixed);
      for (double t : terms) {
        upsilon += t;
        term_scale += std::abs(t);
      }
      const double mu = s.kappa1 * (ratio_mixed + upsilon);
      const double nu = -s.kappa2 * (ratio_mixed - upsilon);
      const double T1 = D.at(field.T1, i, j);
      const double T2 = D.at(field.T2, i, j);
      worst_w = std::max(worst_w, std::abs(mu * T1 + nu * T2));
      scale_w = std::max(scale_w, (std::abs(s.kappa1 * T1) + std::abs(s.kappa2 * T2)) * term_scale);
      worst_c = std::max(worst_c, std::abs(mu) + std::abs(nu));
      scale_c = std::max(scale_c, (std::abs(s.kappa1) + std::abs(s.kappa2)) * term_scale);
    }
  }
  return {scale_w > 0.0 ? worst_w / scale_w : worst_w, scale_c > 0.0 ? worst_c / scale_c : worst_c};
}

Sample transform_sample(const LaguerreMap<double>& map, const Sample& s) {
  if (map.is_identity()) return s;
  const ContactElement<double> ce{s.p, s.n, 1.0};
  const ContactElement<double> image = transform_contact_element(map, ce);
  const TransformedCurvatures<double> k = transform_curvatures(map, ce, s.kappa1, s.kappa2);
  const double signed_e_theta = std::copysign(std::exp(s.theta), s.kappa1);
  Sample out = s;
  out.p = image.p;
  out.n = image.n;
  out.kappa1 = k.kappa1;
  out.kappa2 = k.kappa2;
  out.A1 = signed_e_theta / (k.scale * k.kappa1);
  out.A2 = signed_e_theta / (k.scale * k.kappa2);
  out.theta = s.theta - std::log(k.scale);
  if (!(out.A1 > 0.0) || !(out.A2 > 0.0))
    throw FrameInconsistency("transform_sample: image parametric speed is not positive (curvature changed sign)");
  return out;
}

MembraneField transform_field(const MembraneField& field, const LaguerreMap<double>& map) {
  if (map.is_identity()) return field;
  MembraneField out;
  out.grid = field.grid;
  for (Sample& s : out.grid.samples) s = transform_sample(map, s);
  out.Z = field.Z;
  out.center_xi = field.center_xi;
  out.center_eta = field.center_eta;
  out.labels = field.labels;
  out.source = [src = field.source, map](double xi, double eta) { return transform_sample(map, src(xi, eta)); };
  out.I0 = solve_I0(out.source(out.center_xi, out.center_eta), out.Z, out.labels);
  fill_forces(out);
  return out;
}

LabelSelfTest force_label_self_test(const MembraneField& field) {
  const auto worst_for = [&](ForceLabels labels) {
    MembraneField f = field;
    f.labels = labels;
    f.I0 = solve_I0(f.source(f.center_xi, f.center_eta), f.Z, labels);
    fill_forces(f);
    const EquilibriumResiduals r = equilibrium_residuals(f);
    return std::max(r.tangential_xi, r.tangential_eta);
  };
  const ForceLabels other = field.labels == ForceLabels::XiFirst ? ForceLabels::EtaFirst : ForceLabels::XiFirst;
  return {worst_for(field.labels), worst_for(other)};
}

}  // namespace gridshell
