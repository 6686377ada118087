#pragma once

#include <string_view>

#include "nqweb/quasigroup.hpp"

namespace nqweb {

/// Built-in instance gallery, parametric in the arity:
///   "eq18"    - f_i(x) = i*x with A = a = 0 (pairwise distinct slopes;
///               the level sets form a pencil of hyperplanes), n >= 3
///   "spheres" - f_i(x) = x^2 with A = a = -1 (level sets are hyperspheres
///               through the unit points), n >= 2
///   "circles" - the n = 2 hypersphere instance
RationalQuasigroup example_instance(std::string_view name, int n);

/// Unit points e_1..e_n; base points of the "spheres"/"circles" pencil.
std::vector<std::vector<double>> unit_points(int n);

}  // namespace nqweb
