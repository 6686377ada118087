#include "nqweb/web.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace nqweb {

namespace {

using json = nlohmann::json;

constexpr int kBracketCells = 64;
constexpr double kBisectTol = 1e-12;

// shortest round-trip decimal
void shortest(double v, std::string& buf) {
  buf.resize(32);
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  buf.resize(static_cast<std::size_t>(ptr - buf.data()));
}

}  // namespace

std::vector<double> normal_vector_at_level(const RationalQuasigroup& q,
                                           std::span<const double> p, double alpha) {
  std::vector<double> normal(p.size());
  for (int i = 1; i <= q.arity(); ++i) {
    const auto jet = q.func(i).eval_jet(p[static_cast<std::size_t>(i - 1)]);
    normal[static_cast<std::size_t>(i - 1)] = jet[1] - alpha;
  }
  return normal;
}

std::vector<double> normal_vector(const RationalQuasigroup& q, std::span<const double> p) {
  return normal_vector_at_level(q, p, q.eval(p));
}

NormalPairReport equal_normal_pairs(const RationalQuasigroup& q, const NormalPairConfig& config) {
  if (const auto degenerate = q.degenerate_indices(); !degenerate.empty())
    throw NotAQuasigroupError("normal-pair check needs a solvable instance");

  NormalPairReport report;
  const Box box = config.box.value_or(q.default_box());
  const int n = q.arity();

  // Sampled deviations, one point stream shared across pairs.
  std::vector<std::vector<double>> normals;
  SplitMix64 rng(mix_seed(config.seed, 0x97c0));
  for (int s = 0; s < config.samples; ++s) {
    const auto p = sample_regular_point(q, box, rng);
    normals.push_back(normal_vector(q, std::span<const double>(p)));
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      NormalPairDeviation cp{i, j, 0};
      for (const auto& normal : normals)
        cp.max_deviation =
            std::max(cp.max_deviation,
                     std::abs(normal[static_cast<std::size_t>(i - 1)] -
                              normal[static_cast<std::size_t>(j - 1)]));
      report.sampled.push_back(cp);

      // Identical equality of N_i and N_j means f_i'(s) - f_j'(t) = 0 with
      // s, t independent: both derivatives constant and equal.
      const auto fi = q.func(i).linear_slope();
      const auto fj = q.func(j).linear_slope();
      if (fi && fj && fi->first == fj->first) report.pairs.push_back({i, j});
    }
  }
  return report;
}

std::pair<Rational, Rational> sphere_constants(int n) {
  if (n < 2) throw Error("sphere constants need arity >= 2");
  // Pass-through of all unit points on every level: 1 + A = alpha (1 + a)
  // for all alpha, so both sides vanish identically.
  return {Rational(-1), Rational(-1)};
}

namespace {

// Polynomial hypersurface membership: sum f_i + A - alpha (sum x_i + a).
double hypersurface_value(const RationalQuasigroup& q, std::span<const double> p,
                          double alpha) {
  double g = to_double(q.numerator_constant());
  double s = to_double(q.denominator_constant());
  for (int i = 1; i <= q.arity(); ++i) {
    const double x = p[static_cast<std::size_t>(i - 1)];
    g += q.func(i).eval(x);
    s += x;
  }
  return g - alpha * s;
}

// Real roots of psi(t) = f_n(t) - alpha t - rhs over [lo, hi], ascending.
std::vector<double> solve_last_coordinate(const Polynomial& fn, double alpha, double rhs,
                                          double lo, double hi) {
  const int degree = fn.degree();
  std::vector<double> roots;
  if (degree <= 1) {
    const double slope = to_double(fn.coeff(1)) - alpha;
    if (slope == 0) return roots;
    roots.push_back((rhs - to_double(fn.coeff(0))) / slope);
    return roots;
  }
  if (degree == 2) {
    const double a2 = to_double(fn.coeff(2));
    const double a1 = to_double(fn.coeff(1)) - alpha;
    const double a0 = to_double(fn.coeff(0)) - rhs;
    const double disc = a1 * a1 - 4 * a2 * a0;
    if (disc < 0) return roots;
    const double sq = std::sqrt(disc);
    // Citardauq form for the smaller-magnitude root.
    const double r1 = (-a1 - std::copysign(sq, a1)) / (2 * a2);
    const double r2 = (a1 == 0 && sq == 0) ? r1 : a0 / (a2 * r1);
    roots.push_back(r1);
    if (std::abs(r2 - r1) > 1e-12) roots.push_back(r2);
    std::sort(roots.begin(), roots.end());
    return roots;
  }

  // Degree >= 3: sign-change bracketing on a fixed grid, bisection, then
  // two Newton steps.
  auto psi = [&fn, alpha, rhs](double t) { return fn.eval(t) - alpha * t - rhs; };
  auto dpsi = [&fn, alpha](double t) {
    const auto jet = fn.eval_jet(t);
    return jet[1] - alpha;
  };
  double prev_t = lo, prev_v = psi(lo);
  for (int cell = 1; cell <= kBracketCells; ++cell) {
    const double t = lo + (hi - lo) * cell / kBracketCells;
    const double v = psi(t);
    if (prev_v == 0) roots.push_back(prev_t);
    if ((prev_v < 0 && v > 0) || (prev_v > 0 && v < 0)) {
      double a = prev_t, b = t, fa = prev_v;
      while (b - a > kBisectTol) {
        const double mid = 0.5 * (a + b);
        const double fm = psi(mid);
        if ((fa < 0) == (fm < 0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      double root = 0.5 * (a + b);
      for (int newton = 0; newton < 2; ++newton) {
        const double d = dpsi(root);
        if (d != 0) root -= psi(root) / d;
      }
      roots.push_back(root);
    }
    prev_t = t;
    prev_v = v;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

WebSlice level_set_sample(const RationalQuasigroup& q, double alpha,
                          const LevelSampleConfig& config) {
  if (const auto degenerate = q.degenerate_indices(); !degenerate.empty())
    throw NotAQuasigroupError("level sampling needs a solvable instance");
  const int n = q.arity();
  const Box box = config.box.value_or(q.default_box());
  if (box.dim() != n) throw Error("box dimension mismatch");

  WebSlice slice;
  slice.alpha = alpha;

  for (const auto& candidate : config.candidates) {
    if (static_cast<int>(candidate.size()) != n) throw Error("candidate dimension mismatch");
    if (std::abs(hypersurface_value(q, candidate, alpha)) <= config.level_tol) {
      slice.points.push_back(candidate);
      slice.normals.push_back(normal_vector_at_level(q, candidate, alpha));
    }
  }

  const double a = to_double(q.denominator_constant());
  const double A = to_double(q.numerator_constant());
  SplitMix64 rng(mix_seed(config.seed, std::bit_cast<std::uint64_t>(alpha)));
  const int max_draws = std::max(64, config.count) * 64;
  int draws = 0;
  std::vector<double> p(static_cast<std::size_t>(n));
  while (static_cast<int>(slice.points.size()) < config.count && draws < max_draws) {
    ++draws;
    double prefix_sum = 0, prefix_f = 0;
    for (int i = 1; i < n; ++i) {
      const auto& range = box.ranges[static_cast<std::size_t>(i - 1)];
      const double x = rng.uniform(range.first, range.second);
      p[static_cast<std::size_t>(i - 1)] = x;
      prefix_sum += x;
      prefix_f += q.func(i).eval(x);
    }
    // f_n(t) - alpha t = alpha (prefix_sum + a) - prefix_f - A
    const double rhs = alpha * (prefix_sum + a) - prefix_f - A;
    const auto& last_range = box.ranges[static_cast<std::size_t>(n - 1)];
    for (double root : solve_last_coordinate(q.func(n), alpha, rhs, last_range.first,
                                             last_range.second)) {
      if (static_cast<int>(slice.points.size()) >= config.count) break;
      p[static_cast<std::size_t>(n - 1)] = root;
      if (std::abs(prefix_sum + root + a) < kSingularEps) continue;  // stay regular
      double value;
      try {
        value = q.eval(std::span<const double>(p));
      } catch (const SingularPointError&) {
        continue;
      }
      if (std::abs(value - alpha) > config.level_tol) continue;
      slice.points.push_back(p);
      slice.normals.push_back(normal_vector_at_level(q, p, alpha));
    }
  }
  if (slice.points.empty())
    throw NoRootsFoundError("no level-set points found for alpha = " +
                            std::to_string(alpha));
  return slice;
}

namespace {

void write_csv(const RationalQuasigroup& q, const std::vector<WebSlice>& slices,
               std::ostream& out) {
  const int n = q.arity();
  for (int i = 1; i <= n; ++i) out << "x" << i << ",";
  out << "alpha";
  for (int i = 1; i <= n; ++i) out << ",N" << i;
  out << "\n";
  std::string buf;
  for (const WebSlice& slice : slices) {
    for (std::size_t k = 0; k < slice.points.size(); ++k) {
      for (double x : slice.points[k]) {
        shortest(x, buf);
        out << buf << ",";
      }
      shortest(slice.alpha, buf);
      out << buf;
      for (double v : slice.normals[k]) {
        shortest(v, buf);
        out << "," << buf;
      }
      out << "\n";
    }
  }
}

json slices_to_json(const RationalQuasigroup& q, const std::vector<WebSlice>& slices) {
  json families = json::array();
  for (int i = 1; i <= q.arity(); ++i)
    families.push_back({{"axis", i}, {"kind", "coordinate-hyperplanes"}});
  json out = {{"n", q.arity()},
              {"hyperplane_families", families},
              {"slices", json::array()}};
  for (const WebSlice& slice : slices) {
    out["slices"].push_back({{"alpha", slice.alpha},
                             {"points", slice.points},
                             {"normals", slice.normals}});
  }
  return out;
}

}  // namespace

WebExportSummary export_web(const RationalQuasigroup& q, std::span<const double> levels,
                            std::string_view format, const std::filesystem::path& dest,
                            const LevelSampleConfig& config) {
  if (format != "csv" && format != "json")
    throw Error("unknown export format '" + std::string(format) + "'");

  std::vector<WebSlice> slices;
  WebExportSummary summary;
  summary.hyperplane_families = q.arity();
  for (double alpha : levels) {
    try {
      slices.push_back(level_set_sample(q, alpha, config));
      summary.points_per_level.push_back(static_cast<int>(slices.back().points.size()));
      ++summary.levels_written;
    } catch (const NoRootsFoundError&) {
      summary.failed_levels.push_back(alpha);
    }
  }
  if (!levels.empty() && summary.levels_written == 0)
    throw NoRootsFoundError("no level produced any points");

  std::ofstream out(dest);
  if (!out) throw Error("cannot open '" + dest.string() + "' for writing");
  if (format == "csv") {
    write_csv(q, slices, out);
  } else {
    out << slices_to_json(q, slices).dump(2) << "\n";
  }
  out.flush();
  if (!out) throw Error("write to '" + dest.string() + "' failed");
  return summary;
}

}  // namespace nqweb
