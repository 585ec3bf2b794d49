#include "gridshell/section_optimizer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gridshell {

void OptimizationConfig::validate() const {
  if (!(R_lower > 0.0) || !(R_lower <= R_init) || !(R_init <= R_upper))
    throw InvalidArgument("optimization: need 0 < R_lower <= R_init <= R_upper");
  if (max_iters < 0) throw InvalidArgument("optimization: max_iters must be nonnegative");
  if (!(f_tol >= 0.0)) throw InvalidArgument("optimization: f_tol must be nonnegative");
  if (!(simplex_perturbation > 0.0)) throw InvalidArgument("optimization: simplex_perturbation must be positive");
}

ObjectiveValue force_deviation(const GridshellModel& model, const std::vector<double>& axial) {
  ObjectiveValue v;
  int count = 0;
  double sum_abs = 0.0;
  for (const Member& mb : model.members) {
    if (!mb.in_objective) continue;
    const double d = axial[std::size_t(mb.id)] - mb.target_force;
    v.F += d * d;
    v.max_dev = std::max(v.max_dev, std::abs(d));
    sum_abs += std::abs(d);
    ++count;
  }
  v.mean_dev = count > 0 ? sum_abs / count : 0.0;
  return v;
}

SizingProblem::SizingProblem(const GridshellModel& model, Material material, double fixed_radius)
    : model_(model),
      material_(material),
      fixed_radius_(fixed_radius),
      variable_(model.variable_group_ids()),
      analysis_(to_frame_model(model)) {
  if (!(fixed_radius > 0.0)) throw InvalidArgument("sizing: fixed radius must be positive");
}

std::vector<double> SizingProblem::expand(const Eigen::VectorXd& variable_radii) const {
  if (variable_radii.size() != dimension()) throw InvalidArgument("sizing: wrong number of variable radii");
  std::vector<double> radii(model_.groups.size(), fixed_radius_);
  for (int k = 0; k < dimension(); ++k) radii[std::size_t(variable_[std::size_t(k)])] = variable_radii(k);
  return radii;
}

Eigen::VectorXd SizingProblem::restrict(const std::vector<double>& group_radii) const {
  Eigen::VectorXd x(dimension());
  for (int k = 0; k < dimension(); ++k) x(k) = group_radii.at(std::size_t(variable_[std::size_t(k)]));
  return x;
}

FrameSolution SizingProblem::analyze(const std::vector<double>& group_radii) {
  return analysis_.solve(member_sections(model_, group_radii), material_);
}

ObjectiveValue SizingProblem::evaluate(const std::vector<double>& group_radii) {
  return force_deviation(model_, analyze(group_radii).axial);
}

ObjectiveValue objective(const GridshellModel& model, const std::vector<double>& group_radii,
                         const Material& material) {
  const FrameSolution sol = assemble_solve(to_frame_model(model), member_sections(model, group_radii), material);
  return force_deviation(model, sol.axial);
}

NelderMeadResult nelder_mead(const ObjectiveFunction& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const OptimizationConfig& cfg) {
  const Eigen::Index n = x0.size();
  if (n < 1) throw InvalidArgument("nelder_mead: at least one variable required");
  if (lower.size() != n || upper.size() != n) throw InvalidArgument("nelder_mead: bound sizes mismatch");
  if ((lower.array() > upper.array()).any()) throw InvalidArgument("nelder_mead: lower bound exceeds upper bound");

  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  NelderMeadResult res;
  const auto clip = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.cwiseMax(lower).cwiseMin(upper); };
  const auto eval = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    return f(x);
  };

  std::vector<Eigen::VectorXd> pts;
  std::vector<ObjectiveValue> vals;
  pts.push_back(clip(x0));
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd v = pts.front();
    v(k) += cfg.simplex_perturbation * (upper(k) - lower(k));
    pts.push_back(clip(v));
  }
  for (const auto& p : pts) vals.push_back(eval(p));

  std::vector<int> order(std::size_t(n + 1));
  const auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[std::size_t(a)].F < vals[std::size_t(b)].F; });
  };
  sort_simplex();
  res.trace.push_back({0, vals[std::size_t(order.front())]});

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const double f_best = vals[std::size_t(order.front())].F;
    const double f_worst = vals[std::size_t(order.back())].F;
    if (f_worst - f_best <= cfg.f_tol * std::abs(f_best)) {
      res.converged = true;
      break;
    }
    const auto best = std::size_t(order.front());
    const auto worst = std::size_t(order.back());
    const auto second_worst = std::size_t(order[std::size_t(n - 1)]);

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) centroid += pts[std::size_t(order[std::size_t(k)])];
    centroid /= double(n);

    const Eigen::VectorXd xr = clip(centroid + kReflect * (centroid - pts[worst]));
    const ObjectiveValue fr = eval(xr);
    bool shrink = false;
    if (fr.F < vals[best].F) {
      const Eigen::VectorXd xe = clip(centroid + kExpand * (xr - centroid));
      const ObjectiveValue fe = eval(xe);
      if (fe.F < fr.F) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr.F < vals[second_worst].F) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else if (fr.F < vals[worst].F) {
      const Eigen::VectorXd xc = clip(centroid + kContract * (xr - centroid));
      const ObjectiveValue fc = eval(xc);
      if (fc.F <= fr.F) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        shrink = true;
      }
    } else {
      const Eigen::VectorXd xc = clip(centroid + kContract * (pts[worst] - centroid));
      const ObjectiveValue fc = eval(xc);
      if (fc.F < vals[worst].F) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k == best) continue;
        pts[k] = clip(pts[best] + kShrink * (pts[k] - pts[best]));
        vals[k] = eval(pts[k]);
      }
    }
    sort_simplex();
    res.iterations = iter;
    res.trace.push_back({iter, vals[std::size_t(order.front())]});
  }
  res.x = pts[std::size_t(order.front())];
  res.best = vals[std::size_t(order.front())];
  return res;
}

SizingResult optimize_sections(SizingProblem& problem, const OptimizationConfig& cfg) {
  cfg.validate();
  const int n = problem.dimension();
  if (n < 1) throw InvalidArgument("optimize_sections: no variable groups");
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(n, cfg.R_init);
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, cfg.R_lower);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(n, cfg.R_upper);
  SizingResult out;
  out.search = nelder_mead([&](const Eigen::VectorXd& x) { return problem.evaluate_variables(x); }, x0, lo, hi, cfg);
  out.radii = problem.expand(out.search.x);
  return out;
}

AdjustResult stress_ratio_adjust(SizingProblem& transformed, const std::vector<double>& radii_hat, AdjustRatio ratio) {
  const GridshellModel& model = transformed.model();
  if (radii_hat.size() != model.groups.size()) throw InvalidArgument("stress_ratio_adjust: one radius per group required");
  AdjustResult out;
  out.axial_before = transformed.analyze(radii_hat).axial;
  out.radii = radii_hat;
  out.group_factor.assign(model.groups.size(), 1.0);
  for (const MemberGroup& g : model.groups) {
    if (!g.variable) continue;
    double log_sum = 0.0;
    int count = 0;
    for (int id : g.member_ids) {
      const Member& mb = model.members[std::size_t(id)];
      if (!mb.in_objective) continue;
      const double n1 = out.axial_before[std::size_t(id)];
      const double target = mb.target_force;
      if (target == 0.0) {
        out.warnings.push_back(fmt::format("member {}: zero target force, excluded", id));
        continue;
      }
      if (n1 * target < 0.0) {
        out.warnings.push_back(fmt::format("member {}: N={:.6g} and N*={:.6g} differ in sign, excluded", id, n1, target));
        continue;
      }
      const double rho = ratio == AdjustRatio::RealizedOverTarget ? n1 / target : target / n1;
      log_sum += std::log(std::clamp(rho, kRatioClampLow, kRatioClampHigh));
      ++count;
    }
    if (count == 0) continue;
    const double factor = std::exp(log_sum / count);
    const PipeSection s = pipe_section(radii_hat[std::size_t(g.id)]);
    out.group_factor[std::size_t(g.id)] = factor;
    out.radii[std::size_t(g.id)] = pipe_radius_from_area(s.A * factor, s.t_ratio);
  }
  return out;
}

}  // namespace gridshell
