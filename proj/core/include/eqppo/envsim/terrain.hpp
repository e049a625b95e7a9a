#pragma once

#include <random>
#include <vector>

namespace eqppo::envsim {

inline constexpr double kMinBoxHeight = 1e-4;

struct TerrainBounds {
  double side_low = 0.3;
  double side_high = 0.5;
  double extent_x = 24.0;  // covered area; the grid tiles periodically beyond it
  double extent_y = 6.0;
  double start_margin = 2.0;  // grid starts this far behind the spawn point
};

/// Dense grid of square boxes with a single side length.
struct TerrainField {
  double side = 0.4;
  double h_max = kMinBoxHeight;
  int nx = 1;
  int ny = 1;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<double> heights{kMinBoxHeight};

  double cell(int ix, int iy) const;
  double height_at(double x, double y) const;
  /// Standard deviation of the 3x3 block of boxes around (x, y).
  double local_std(double x, double y) const;
};

/// One side length ~ U(side_low, side_high) per call, then each box height
/// ~ U(1e-4, h_max). Heights are drawn as 1e-4 + u (h_max - 1e-4) with one
/// u per box, so equal seeds give terrains that scale with h_max.
TerrainField generate_terrain(std::mt19937_64& rng, double h_max, const TerrainBounds& bounds = {});

}  // namespace eqppo::envsim
