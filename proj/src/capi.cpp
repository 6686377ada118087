// extern "C" surface over the nqweb core: opaque handles, status codes,
// thread-local error text. Exceptions stop here.

#include "nqweb.h"

#include <algorithm>
#include <cstring>
#include <new>
#include <span>
#include <string>

#include "json.hpp"
#include "nqweb/errors.hpp"
#include "nqweb/expr.hpp"
#include "nqweb/gallery.hpp"
#include "nqweb/quasigroup.hpp"
#include "nqweb/reducibility.hpp"
#include "nqweb/serialize.hpp"
#include "nqweb/verification.hpp"
#include "nqweb/web.hpp"

struct nqw_quasigroup {
  nqweb::RationalQuasigroup value;
};

struct nqw_map {
  nqweb::GenericMap value;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Fn>
nqw_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const nqweb::ParseError& e) {
    g_last_error = e.what();
    return NQW_PARSE_ERROR;
  } catch (const nqweb::InvalidStructureError& e) {
    g_last_error = e.what();
    return NQW_INVALID_STRUCTURE;
  } catch (const nqweb::NotAQuasigroupError& e) {
    g_last_error = e.what();
    return NQW_NOT_A_QUASIGROUP;
  } catch (const nqweb::NoRootsFoundError& e) {
    g_last_error = e.what();
    return NQW_NO_ROOTS_FOUND;
  } catch (const nqweb::SingularPointError& e) {
    g_last_error = e.what();
    return NQW_SINGULAR_POINT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NQW_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NQW_ERROR;
  }
}

nqw_status require(bool ok, const char* message) {
  if (ok) return NQW_OK;
  g_last_error = message;
  return NQW_INVALID_ARGUMENT;
}

nqweb::SamplerConfig to_sampler(const nqw_check_params* params, int n) {
  nqweb::SamplerConfig config;
  if (params == nullptr) return config;
  if (params->samples > 0) config.samples = params->samples;
  if (params->tol > 0) config.tol = params->tol;
  config.seed = params->seed;
  if (params->box_lo != nullptr && params->box_hi != nullptr) {
    nqweb::Box box;
    for (int i = 0; i < n; ++i) box.ranges.emplace_back(params->box_lo[i], params->box_hi[i]);
    config.box = box;
  }
  return config;
}

nqw_status format_report(const nqweb::ResidualReport& report, const char* format,
                         char** out_report, int* out_all_hold) {
  std::string text;
  if (format == nullptr || std::strcmp(format, "json") == 0) {
    text = nqweb::residual_report_to_json(report);
  } else if (std::strcmp(format, "csv") == 0) {
    text = nqweb::residual_report_to_csv(report);
  } else {
    g_last_error = std::string("unknown report format '") + format + "'";
    return NQW_INVALID_ARGUMENT;
  }
  if (out_report) *out_report = dup_string(text);
  if (out_all_hold) *out_all_hold = report.all_hold ? 1 : 0;
  return NQW_OK;
}

}  // namespace

extern "C" {

const char* nqw_last_error(void) { return g_last_error.c_str(); }

const char* nqw_version(void) { return "0.1.0"; }

void nqw_string_free(char* s) { delete[] s; }

nqw_status nqw_quasigroup_from_json(const char* spec_json, nqw_quasigroup** out) {
  if (auto st = require(spec_json && out, "spec_json and out must be non-null"); st) return st;
  return guarded([&] {
    *out = new nqw_quasigroup{nqweb::quasigroup_from_json(spec_json)};
    return NQW_OK;
  });
}

nqw_status nqw_quasigroup_example(const char* name, int n, nqw_quasigroup** out) {
  if (auto st = require(name && out, "name and out must be non-null"); st) return st;
  return guarded([&] {
    *out = new nqw_quasigroup{nqweb::example_instance(name, n)};
    return NQW_OK;
  });
}

void nqw_quasigroup_free(nqw_quasigroup* q) { delete q; }

nqw_status nqw_quasigroup_arity(const nqw_quasigroup* q, int* out) {
  if (auto st = require(q && out, "q and out must be non-null"); st) return st;
  *out = q->value.arity();
  return NQW_OK;
}

nqw_status nqw_quasigroup_to_json(const nqw_quasigroup* q, char** out_json) {
  if (auto st = require(q && out_json, "q and out_json must be non-null"); st) return st;
  return guarded([&] {
    *out_json = dup_string(nqweb::quasigroup_to_json(q->value));
    return NQW_OK;
  });
}

nqw_status nqw_quasigroup_eval(const nqw_quasigroup* q, const double* point, int n,
                               double* out) {
  if (auto st = require(q && point && out, "q, point, out must be non-null"); st) return st;
  if (auto st = require(n == q->value.arity(), "point dimension must equal the arity"); st)
    return st;
  return guarded([&] {
    *out = q->value.eval(std::span<const double>(point, static_cast<std::size_t>(n)));
    return NQW_OK;
  });
}

nqw_status nqw_quasigroup_isotopy_normalize(const nqw_quasigroup* q, nqw_quasigroup** out) {
  if (auto st = require(q && out, "q and out must be non-null"); st) return st;
  return guarded([&] {
    *out = new nqw_quasigroup{q->value.isotopy_normalize()};
    return NQW_OK;
  });
}

nqw_status nqw_quasigroup_classify(const nqw_quasigroup* q, char** out_json) {
  if (auto st = require(q && out_json, "q and out_json must be non-null"); st) return st;
  return guarded([&] {
    *out_json = dup_string(nqweb::classification_to_json(nqweb::classify(q->value)));
    return NQW_OK;
  });
}

nqw_status nqw_map_parse(const char* expression, int arity, nqw_map** out) {
  if (auto st = require(expression && out, "expression and out must be non-null"); st)
    return st;
  if (auto st = require(arity >= 0, "arity must be non-negative"); st) return st;
  return guarded([&] {
    *out = new nqw_map{nqweb::GenericMap::parse(expression, arity)};
    return NQW_OK;
  });
}

void nqw_map_free(nqw_map* m) { delete m; }

nqw_status nqw_map_arity(const nqw_map* m, int* out) {
  if (auto st = require(m && out, "m and out must be non-null"); st) return st;
  *out = m->value.arity();
  return NQW_OK;
}

nqw_status nqw_map_eval(const nqw_map* m, const double* point, int n, double* out) {
  if (auto st = require(m && point && out, "m, point, out must be non-null"); st) return st;
  if (auto st = require(n == m->value.arity(), "point dimension must equal the arity"); st)
    return st;
  return guarded([&] {
    *out = m->value.eval(std::span<const double>(point, static_cast<std::size_t>(n)));
    return NQW_OK;
  });
}

nqw_status nqw_map_jet(const nqw_map* m, const double* point, int n, int i, int j,
                       double out_jet[4]) {
  if (auto st = require(m && point && out_jet, "m, point, out_jet must be non-null"); st)
    return st;
  if (auto st = require(n == m->value.arity(), "point dimension must equal the arity"); st)
    return st;
  if (auto st = require(i >= 1 && i <= n && j >= 1 && j <= n, "directions must be in 1..n");
      st)
    return st;
  return guarded([&] {
    const nqweb::Jet2 jet =
        m->value.jet_eval(std::span<const double>(point, static_cast<std::size_t>(n)), i, j);
    out_jet[0] = jet.v;
    out_jet[1] = jet.di;
    out_jet[2] = jet.dj;
    out_jet[3] = jet.dij;
    return NQW_OK;
  });
}

nqw_status nqw_check_structure(const nqw_quasigroup* q, const char* structure,
                               const nqw_check_params* params, const char* format,
                               char** out_report, int* out_all_hold) {
  if (auto st = require(q && structure, "q and structure must be non-null"); st) return st;
  return guarded([&] {
    const auto s = nqweb::ReducibilityStructure::parse(structure);
    const auto report = nqweb::check_structure(q->value, s, to_sampler(params, q->value.arity()));
    return format_report(report, format, out_report, out_all_hold);
  });
}

nqw_status nqw_map_check_structure(const nqw_map* m, const char* structure,
                                   const nqw_check_params* params, const char* format,
                                   char** out_report, int* out_all_hold) {
  if (auto st = require(m && structure, "m and structure must be non-null"); st) return st;
  return guarded([&] {
    const auto s = nqweb::ReducibilityStructure::parse(structure);
    const auto report = nqweb::check_structure(m->value, s, to_sampler(params, m->value.arity()));
    return format_report(report, format, out_report, out_all_hold);
  });
}

nqw_status nqw_verify(const nqw_verify_params* params, char** out_report,
                      int* out_all_pass) {
  return guarded([&] {
    nqweb::VerifyConfig config;
    if (params != nullptr) {
      if (params->trials > 0) config.cross.trials = params->trials;
      else if (params->trials == 0) config.cross.trials = 0;
      if (params->samples > 0) config.cross.samples = params->samples;
      if (params->tol > 0) {
        config.cross.tol = params->tol;
        config.factorization.tol = params->tol;
      }
      config.cross.seed = params->seed;
      config.derivative.seed = params->seed;
      config.factorization.seed = params->seed;
      if (params->derivative_cases > 0)
        config.derivative.cases = params->derivative_cases;
    }
    const nqweb::VerifyReport report = nqweb::verify(config);
    if (out_report) *out_report = dup_string(nqweb::verify_report_to_json(report));
    if (out_all_pass) *out_all_pass = report.all_pass ? 1 : 0;
    return NQW_OK;
  });
}

nqw_status nqw_web_export(const nqw_quasigroup* q, const double* levels, int n_levels,
                          const char* format, const char* path,
                          const nqw_web_params* params, char** out_summary) {
  if (auto st = require(q && path, "q and path must be non-null"); st) return st;
  if (auto st = require(n_levels == 0 || levels != nullptr,
                        "levels must be non-null when n_levels > 0");
      st)
    return st;
  return guarded([&] {
    nqweb::LevelSampleConfig config;
    const int n = q->value.arity();
    if (params != nullptr) {
      if (params->points_per_level > 0) config.count = params->points_per_level;
      config.seed = params->seed;
      if (params->level_tol > 0) config.level_tol = params->level_tol;
      if (params->box_lo != nullptr && params->box_hi != nullptr) {
        nqweb::Box box;
        for (int i = 0; i < n; ++i)
          box.ranges.emplace_back(params->box_lo[i], params->box_hi[i]);
        config.box = box;
      }
      for (int c = 0; c < params->n_candidates; ++c)
        config.candidates.emplace_back(params->candidates + static_cast<std::ptrdiff_t>(c) * n,
                                       params->candidates + static_cast<std::ptrdiff_t>(c + 1) * n);
    }
    const auto summary = nqweb::export_web(
        q->value, std::span<const double>(levels, static_cast<std::size_t>(n_levels)),
        format ? format : "csv", path, config);
    nlohmann::json j = {{"levels_written", summary.levels_written},
                        {"points_per_level", summary.points_per_level},
                        {"failed_levels", summary.failed_levels},
                        {"hyperplane_families", summary.hyperplane_families},
                        {"path", path}};
    if (out_summary) *out_summary = dup_string(j.dump());
    return NQW_OK;
  });
}

nqw_status nqw_normal_vector(const nqw_quasigroup* q, const double* point, int n,
                             double* out_normal) {
  if (auto st = require(q && point && out_normal, "q, point, out_normal must be non-null");
      st)
    return st;
  if (auto st = require(n == q->value.arity(), "point dimension must equal the arity"); st)
    return st;
  return guarded([&] {
    const auto normal = nqweb::normal_vector(
        q->value, std::span<const double>(point, static_cast<std::size_t>(n)));
    std::copy(normal.begin(), normal.end(), out_normal);
    return NQW_OK;
  });
}

nqw_status nqw_equal_normal_pairs(const nqw_quasigroup* q, int samples, uint64_t seed,
                               char** out_json) {
  if (auto st = require(q && out_json, "q and out_json must be non-null"); st) return st;
  return guarded([&] {
    nqweb::NormalPairConfig config;
    if (samples > 0) config.samples = samples;
    config.seed = seed;
    const auto report = nqweb::equal_normal_pairs(q->value, config);
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [i, j] : report.pairs) pairs.push_back({i, j});
    nlohmann::json j = {{"pairs", pairs}};
    *out_json = dup_string(j.dump());
    return NQW_OK;
  });
}

}  // extern "C"
