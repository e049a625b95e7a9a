#include "eqppo/envsim/terrain.hpp"

#include <algorithm>
#include <cmath>

#include "eqppo/common/errors.hpp"

namespace eqppo::envsim {

double TerrainField::cell(int ix, int iy) const {
  ix = ((ix % nx) + nx) % nx;
  iy = ((iy % ny) + ny) % ny;
  return heights[static_cast<std::size_t>(iy) * nx + ix];
}

double TerrainField::height_at(double x, double y) const {
  int ix = static_cast<int>(std::floor((x - origin_x) / side));
  int iy = static_cast<int>(std::floor((y - origin_y) / side));
  return cell(ix, iy);
}

double TerrainField::local_std(double x, double y) const {
  int cx = static_cast<int>(std::floor((x - origin_x) / side));
  int cy = static_cast<int>(std::floor((y - origin_y) / side));
  double s = 0.0, s2 = 0.0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      double h = cell(cx + dx, cy + dy);
      s += h;
      s2 += h * h;
    }
  double mean = s / 9.0;
  return std::sqrt(std::max(0.0, s2 / 9.0 - mean * mean));
}

TerrainField generate_terrain(std::mt19937_64& rng, double h_max, const TerrainBounds& b) {
  if (!(h_max >= kMinBoxHeight)) throw ConfigError("H_max must be at least 1e-4");
  if (!(b.side_low > 0 && b.side_high >= b.side_low)) throw ConfigError("invalid terrain side-length bounds");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TerrainField t;
  t.h_max = h_max;
  t.side = b.side_low + unit(rng) * (b.side_high - b.side_low);
  t.nx = std::max(1, static_cast<int>(std::ceil(b.extent_x / t.side)));
  t.ny = std::max(1, static_cast<int>(std::ceil(b.extent_y / t.side)));
  t.origin_x = -b.start_margin;
  t.origin_y = -0.5 * t.ny * t.side;
  t.heights.resize(static_cast<std::size_t>(t.nx) * t.ny);
  for (double& h : t.heights) h = kMinBoxHeight + unit(rng) * (h_max - kMinBoxHeight);
  return t;
}

}  // namespace eqppo::envsim
