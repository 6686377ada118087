#include "nqweb/gallery.hpp"

#include <string>

#include "nqweb/web.hpp"

namespace nqweb {

RationalQuasigroup example_instance(std::string_view name, int n) {
  if (name == "eq18") {
    if (n < 3) throw Error("eq18 needs arity >= 3");
    std::vector<Polynomial> funcs;
    for (int i = 1; i <= n; ++i) funcs.push_back(Polynomial::linear(i));
    return RationalQuasigroup(n, std::move(funcs));
  }
  if (name == "spheres" || name == "circles") {
    if (name == "circles") n = 2;
    if (n < 2) throw Error("spheres need arity >= 2");
    const auto [A, a] = sphere_constants(n);
    std::vector<Polynomial> funcs(static_cast<std::size_t>(n), Polynomial::monomial(2));
    return RationalQuasigroup(n, std::move(funcs), A, a);
  }
  throw Error("unknown example '" + std::string(name) +
              "' (available: eq18, spheres, circles)");
}

std::vector<std::vector<double>> unit_points(int n) {
  std::vector<std::vector<double>> points;
  for (int i = 0; i < n; ++i) {
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    points.push_back(std::move(e));
  }
  return points;
}

}  // namespace nqweb
