#include "canopy/map/offsets.hpp"

#include <cmath>
#include <stdexcept>

namespace canopy::map {

std::vector<Index3> precompute_offsets(double radius, double resolution, bool planar) {
  if (!(radius >= 0.0) || !(resolution > 0.0)) {
    throw std::invalid_argument("offsets: need radius >= 0 and resolution > 0");
  }
  const int n = static_cast<int>(std::ceil(radius / resolution));
  const int nz = planar ? 0 : n;
  std::vector<Index3> out;
  out.emplace_back(0, 0, 0);
  for (int x = -n; x <= n; ++x) {
    for (int y = -n; y <= n; ++y) {
      for (int z = -nz; z <= nz; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        const double d = std::sqrt(static_cast<double>(x * x + y * y + z * z)) * resolution;
        if (d < radius) out.emplace_back(x, y, z);
      }
    }
  }
  return out;
}

int offset_reach(const std::vector<Index3>& offsets) {
  int r = 0;
  for (const auto& o : offsets) r = std::max(r, o.cwiseAbs().maxCoeff());
  return r;
}

}  // namespace canopy::map
