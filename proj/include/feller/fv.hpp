#pragma once

#include "feller/warping.hpp"

namespace feller {

/// Log-domain coefficients of one cell [a, b] of the radial operator
/// (w u')' with w = g^{m-1}.
///
/// The conductance is the harmonic one, 1 / int_a^b 1/w. The cell volume
/// int_a^b w is split between the two end nodes with the harmonic hat
/// functions as weights, so a cell across which w changes by many orders of
/// magnitude still sends its volume to the node where that volume sits.
struct FvCell {
  double log_kappa = 0.0;
  double log_mass_left = 0.0;   // volume credited to the node at a
  double log_mass_right = 0.0;  // volume credited to the node at b
};

/// log w is replaced by its piecewise-linear interpolant on an adaptive
/// subdivision of [a, b]; all integrals of the interpolant are closed form.
/// Throws SingularCoefficient if w cannot be evaluated on [a, b].
[[nodiscard]] FvCell fv_cell(const ModelManifold& M, double a, double b);

/// The first cell [0, b] at the pole, where 1/w is not integrable: midpoint
/// conductance and midpoint volume split.
[[nodiscard]] FvCell fv_pole_cell(const ModelManifold& M, double b);

}  // namespace feller
