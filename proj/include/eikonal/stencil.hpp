#pragma once

namespace eikonal {

/// Inputs of one local upwind update: the smallest horizontal and vertical
/// neighbor arrival times (+inf when absent), the local speed and the grid
/// spacing.
struct StencilInputs {
  double tH;
  double tV;
  double v;
  double h;
};

}  // namespace eikonal
