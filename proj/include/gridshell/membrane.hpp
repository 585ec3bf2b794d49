#pragma once

// Membrane forces of an L-isothermic patch under uniform normal pressure.

#include <functional>
#include <vector>

#include "gridshell/cyclide.hpp"
#include "gridshell/laguerre.hpp"

namespace gridshell {

using Sample = SurfaceSample<double>;
using Grid = SampleGrid<double>;
/// Curvature-line frame at arbitrary parameters (xi, eta).
using FrameSource = std::function<Sample(double, double)>;

/// Which parameter direction the first force formula is attached to.
enum class ForceLabels { XiFirst, EtaFirst };

struct MembraneForces {
  double T1 = 0;  ///< force per unit length acting along the xi-lines (N/mm)
  double T2 = 0;  ///< force per unit length acting along the eta-lines (N/mm)
};

MembraneForces membrane_forces(const Sample& s, double Z, double I0, ForceLabels labels = ForceLabels::XiFirst);

/// I0 fixing T1 A2 = T2 A1 at the given sample.
double solve_I0(const Sample& center, double Z, ForceLabels labels = ForceLabels::XiFirst);

FrameSource cyclide_source(const CyclideParams<double>& params, double h = kDefaultFdStep);

struct MembraneField {
  Grid grid;
  double Z = 0;
  double I0 = 0;
  double center_xi = 0;
  double center_eta = 0;
  ForceLabels labels = ForceLabels::XiFirst;
  std::vector<double> T1;
  std::vector<double> T2;
  FrameSource source;

  Sample frame_at(double xi, double eta) const { return source(xi, eta); }
  MembraneForces forces_at(double xi, double eta) const;
};

struct ParameterBox {
  double xi_min = 0;
  double xi_max = 0;
  double eta_min = 0;
  double eta_max = 0;
};

/// Samples `source` on the grid, fixes I0 at the center and fills T1, T2.
MembraneField make_field(FrameSource source, const ParameterBox& box, int n_xi, int n_eta, double Z,
                         double center_xi, double center_eta, ForceLabels labels = ForceLabels::XiFirst);

struct EquilibriumResiduals {
  double tangential_xi = 0;   ///< T1_xi + (ln A2)_xi (T1 - T2), relative
  double tangential_eta = 0;  ///< T2_eta + (ln A1)_eta (T2 - T1), relative
  double normal = 0;          ///< k1 T1 + k2 T2 + Z, relative to max(|Z|, |k T|)
};

/// Grid-difference residuals over interior samples.
EquilibriumResiduals equilibrium_residuals(const MembraneField& field);

struct CompatibilityResidual {
  double weighted = 0;      ///< max |mu T1 + nu T2| over the matching scale
  double coefficients = 0;  ///< max (|mu| + |nu|) over the matching scale, independent of T
};

CompatibilityResidual compatibility_residual(const MembraneField& field);

/// Frame of the image surface; A~ = e^theta / (|n~| k~), theta~ = theta - ln|n~|.
Sample transform_sample(const LaguerreMap<double>& map, const Sample& s);

/// Transports geometry and re-solves I0 on the image center.
MembraneField transform_field(const MembraneField& field, const LaguerreMap<double>& map);

struct LabelSelfTest {
  double implemented = 0;  ///< worst tangential residual with the implemented labels
  double swapped = 0;      ///< same with the labels swapped
  bool passed() const { return implemented < swapped; }
};

/// Evaluates both label assignments on the field's geometry.
LabelSelfTest force_label_self_test(const MembraneField& field);

}  // namespace gridshell
