#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nqweb/quasigroup.hpp"
#include "nqweb/reducibility.hpp"

namespace nqweb {

/// |F - alpha| (polynomial form at base points) allowed for exported points.
inline constexpr double kLevelTol = 1e-9;

/// Points of one level hypersurface F = alpha with their normal vectors
/// N_i = f_i'(x_i) - alpha.
struct WebSlice {
  double alpha = 0;
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> normals;
};

/// Normal vector at p with alpha = F(p).
std::vector<double> normal_vector(const RationalQuasigroup& q, std::span<const double> p);

/// Normal vector for a prescribed level; also valid at base points of the
/// pencil, where F itself is 0/0.
std::vector<double> normal_vector_at_level(const RationalQuasigroup& q,
                                           std::span<const double> p, double alpha);

struct NormalPairConfig {
  int samples = 64;
  std::uint64_t seed = 0;
  std::optional<Box> box;
};

struct NormalPairDeviation {
  int i = 0, j = 0;
  double max_deviation = 0;  // max |N_i - N_j| over the samples
};

struct NormalPairReport {
  std::vector<std::pair<int, int>> pairs;  // identically equal normal coordinates
  std::vector<NormalPairDeviation> sampled;  // per-pair sampled deviations
};

/// Pairs (i, j) whose normal coordinates agree identically across the whole
/// hypersurface family. Decided exactly: f_i'(s) - f_j'(t) vanishes as a
/// two-variable polynomial iff both derivatives are the same constant.
/// Pointwise coincidences at sampled points are reported as deviations but
/// never as pairs.
NormalPairReport equal_normal_pairs(const RationalQuasigroup& q,
                                    const NormalPairConfig& config);

struct LevelSampleConfig {
  int count = 64;
  std::uint64_t seed = 0;
  std::optional<Box> box;
  double level_tol = kLevelTol;
  /// Candidate points tested against the polynomial hypersurface equation
  /// sum f_i(x_i) + A - alpha (sum x_i + a) = 0 and kept when they satisfy
  /// it; this admits base points of the pencil that every level contains.
  std::vector<std::vector<double>> candidates;
};

/// Draws x_1..x_{n-1}, solves the hypersurface equation for x_n (closed
/// forms through degree 2, bracketed bisection plus Newton polish above),
/// and keeps regular roots. Throws NoRootsFoundError when the retry cap
/// passes without a single point.
WebSlice level_set_sample(const RationalQuasigroup& q, double alpha,
                          const LevelSampleConfig& config);

/// Constants making every level hypersurface of the squared-coordinate
/// family pass through the unit points (1,0,...,0) ... (0,...,0,1):
/// 1 + A = alpha (1 + a) for all alpha forces A = a = -1.
std::pair<Rational, Rational> sphere_constants(int n);

struct WebExportSummary {
  int levels_written = 0;
  std::vector<int> points_per_level;
  std::vector<double> failed_levels;
  int hyperplane_families = 0;
};

/// Writes one slice per level ("csv": header x1..xn,alpha,N1..Nn; "json":
/// slices plus the n coordinate-hyperplane families). A level with no
/// reachable points is skipped with a warning entry; only all levels
/// failing is an error.
WebExportSummary export_web(const RationalQuasigroup& q, std::span<const double> levels,
                            std::string_view format, const std::filesystem::path& dest,
                            const LevelSampleConfig& config);

}  // namespace nqweb
