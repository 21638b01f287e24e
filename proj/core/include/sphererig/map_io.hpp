#pragma once

#include <iosfwd>
#include <string>

#include "sphererig/sphere_map.hpp"

namespace sphererig {

// Text format:
//   #spheremap v1 n_theta=<int> n_phi=<int>
//   theta phi u1 u2 u3          (one line per node, grid order)
// with shortest-exact 17 significant digit decimals, so reading back what
// was written reproduces every value bit for bit.
void write_map(std::ostream& os, const SphereMap& u);
SphereMap read_map(std::istream& is);

void write_map_file(const std::string& path, const SphereMap& u);
SphereMap read_map_file(const std::string& path);

// 17 significant digits, '.' separator, independent of the global locale.
std::string format_double(double v);

}  // namespace sphererig
