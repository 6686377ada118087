// nqweb command-line front end. All functionality goes through the C API in
// nqweb.h; this file only handles flags, files, and exit codes.
//
// Exit codes: 0 success (classification produced, all conditions hold, all
// verification passed); 1 malformed input or I/O failure; 2 the instance is
// not a quasigroup; 3 a condition or verification check failed.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nqweb.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitNotAQuasigroup = 2;
constexpr int kExitCheckFailed = 3;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { nqw_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct QuasigroupHandle {
  nqw_quasigroup* ptr = nullptr;
  ~QuasigroupHandle() { nqw_quasigroup_free(ptr); }
};

struct MapHandle {
  nqw_map* ptr = nullptr;
  ~MapHandle() { nqw_map_free(ptr); }
};

int fail(const std::string& message, int code = kExitBadInput) {
  std::cerr << "nqweb: " << message << "\n";
  return code;
}

int fail_status(nqw_status status) {
  const int code = status == NQW_NOT_A_QUASIGROUP ? kExitNotAQuasigroup : kExitBadInput;
  return fail(nqw_last_error(), code);
}

struct SpecOptions {
  std::string spec_path;
  std::string example;
  int n = 0;
};

void add_spec_options(CLI::App* cmd, SpecOptions& opts) {
  cmd->add_option("--spec", opts.spec_path, "Path to a spec JSON file");
  cmd->add_option("--example", opts.example,
                  "Built-in instance: eq18 | spheres | circles");
  cmd->add_option("--n", opts.n, "Arity for --example instances");
}

std::optional<std::string> read_file(const std::string& path, std::string& error) {
  std::ifstream in(path);
  if (!in) {
    error = "cannot read '" + path + "'";
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Loads a rational-family instance; map specs are rejected here.
int load_quasigroup(const SpecOptions& opts, QuasigroupHandle& out) {
  if (!opts.example.empty()) {
    if (!opts.spec_path.empty()) return fail("--spec and --example are exclusive");
    const int n = opts.n > 0 ? opts.n : (opts.example == "circles" ? 2 : 3);
    if (nqw_quasigroup_example(opts.example.c_str(), n, &out.ptr) != NQW_OK)
      return fail(nqw_last_error());
    return kExitOk;
  }
  if (opts.spec_path.empty()) return fail("need --spec PATH or --example NAME");
  std::string error;
  const auto text = read_file(opts.spec_path, error);
  if (!text) return fail(error);
  if (nqw_quasigroup_from_json(text->c_str(), &out.ptr) != NQW_OK)
    return fail(nqw_last_error());
  return kExitOk;
}

// Loads either a rational-family instance or a generic-map spec.
int load_target(const SpecOptions& opts, QuasigroupHandle& q, MapHandle& m) {
  if (opts.example.empty() && !opts.spec_path.empty()) {
    std::string error;
    const auto text = read_file(opts.spec_path, error);
    if (!text) return fail(error);
    const auto parsed = nlohmann::json::parse(*text, nullptr, false);
    if (parsed.is_object() && parsed.contains("map")) {
      if (!parsed["map"].is_string()) return fail("spec.map: expected a string");
      const int n = parsed.value("n", 0);
      if (nqw_map_parse(parsed["map"].get<std::string>().c_str(), n, &m.ptr) != NQW_OK)
        return fail(nqw_last_error());
      return kExitOk;
    }
    if (nqw_quasigroup_from_json(text->c_str(), &q.ptr) != NQW_OK)
      return fail(nqw_last_error());
    return kExitOk;
  }
  return load_quasigroup(opts, q);
}

bool parse_box(const std::string& text, int n, std::vector<double>& lo,
               std::vector<double>& hi) {
  lo.clear();
  hi.clear();
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) return false;
    try {
      lo.push_back(std::stod(part.substr(0, colon)));
      hi.push_back(std::stod(part.substr(colon + 1)));
    } catch (const std::exception&) {
      return false;
    }
    if (lo.back() >= hi.back()) return false;
  }
  if (lo.size() == 1) {  // one range applies to every coordinate
    lo.assign(static_cast<std::size_t>(n), lo.front());
    hi.assign(static_cast<std::size_t>(n), hi.front());
  }
  return static_cast<int>(lo.size()) == n;
}

int write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return kExitOk;
  }
  std::ofstream out(out_path);
  if (!out) return fail("cannot open '" + out_path + "' for writing");
  out << text << "\n";
  if (!out) return fail("write to '" + out_path + "' failed");
  return kExitOk;
}

int cmd_classify(const SpecOptions& spec, const std::string& out_path) {
  QuasigroupHandle q;
  if (const int rc = load_quasigroup(spec, q); rc != kExitOk) return rc;
  OwnedString result;
  if (const auto st = nqw_quasigroup_classify(q.ptr, &result.ptr); st != NQW_OK)
    return fail_status(st);
  const int rc = write_output(result.str(), out_path);
  if (rc != kExitOk) return rc;
  const auto parsed = nlohmann::json::parse(result.str());
  return parsed["verdict"] == "NotAQuasigroup" ? kExitNotAQuasigroup : kExitOk;
}

int cmd_check(const SpecOptions& spec, const std::string& structure, int samples,
              double tol, std::uint64_t seed, const std::string& box_text,
              const std::string& format, const std::string& out_path) {
  QuasigroupHandle q;
  MapHandle m;
  if (const int rc = load_target(spec, q, m); rc != kExitOk) return rc;
  if (structure.empty()) return fail("need --structure, e.g. \"[[1,2],3,4]\"");

  int arity = 0;
  if (q.ptr) nqw_quasigroup_arity(q.ptr, &arity);
  else nqw_map_arity(m.ptr, &arity);

  std::vector<double> lo, hi;
  if (!parse_box(box_text, arity, lo, hi))
    return fail("bad --box '" + box_text + "' (want \"lo:hi\" or one pair per coordinate)");

  nqw_check_params params{};
  params.samples = samples;
  params.tol = tol;
  params.seed = seed;
  params.box_lo = lo.data();
  params.box_hi = hi.data();

  OwnedString report;
  int all_hold = 0;
  const auto st =
      q.ptr ? nqw_check_structure(q.ptr, structure.c_str(), &params, format.c_str(),
                                  &report.ptr, &all_hold)
            : nqw_map_check_structure(m.ptr, structure.c_str(), &params, format.c_str(),
                                      &report.ptr, &all_hold);
  if (st != NQW_OK) return fail_status(st);
  if (const int rc = write_output(report.str(), out_path); rc != kExitOk) return rc;
  return all_hold ? kExitOk : kExitCheckFailed;
}

int cmd_verify(int trials, int samples, double tol, std::uint64_t seed, int cases,
               const std::string& out_path) {
  nqw_verify_params params{};
  params.trials = trials;
  params.samples = samples;
  params.tol = tol;
  params.seed = seed;
  params.derivative_cases = cases;
  OwnedString report;
  int all_pass = 0;
  if (const auto st = nqw_verify(&params, &report.ptr, &all_pass); st != NQW_OK)
    return fail_status(st);
  if (const int rc = write_output(report.str(), out_path); rc != kExitOk) return rc;
  if (trials == 0) std::cerr << "nqweb: warning: 0 trials requested; vacuous pass\n";
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_web_export(const SpecOptions& spec, const std::string& levels_text,
                   bool allow_empty, int points, std::uint64_t seed,
                   const std::string& box_text, const std::string& format,
                   const std::string& out_path) {
  QuasigroupHandle q;
  if (const int rc = load_quasigroup(spec, q); rc != kExitOk) return rc;
  if (out_path.empty()) return fail("need --out PATH for the exported slices");

  std::vector<double> levels;
  if (!levels_text.empty()) {
    std::stringstream ss(levels_text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      try {
        levels.push_back(std::stod(part));
      } catch (const std::exception&) {
        return fail("bad --levels entry '" + part + "'");
      }
    }
  }
  if (levels.empty() && !allow_empty)
    return fail("no levels given; pass --levels \"a1,a2,...\" or --allow-empty");

  int arity = 0;
  nqw_quasigroup_arity(q.ptr, &arity);

  nqw_web_params params{};
  params.points_per_level = points;
  params.seed = seed;
  std::vector<double> lo, hi;
  if (!box_text.empty()) {
    if (!parse_box(box_text, arity, lo, hi))
      return fail("bad --box '" + box_text + "'");
    params.box_lo = lo.data();
    params.box_hi = hi.data();
  }

  // The hypersphere gallery's unit points sit on every level; offer them as
  // slice candidates so exported pencils carry their base points.
  std::vector<double> candidates;
  if (spec.example == "circles" || spec.example == "spheres") {
    candidates.assign(static_cast<std::size_t>(arity) * static_cast<std::size_t>(arity), 0.0);
    for (int i = 0; i < arity; ++i)
      candidates[static_cast<std::size_t>(i) * static_cast<std::size_t>(arity) +
                 static_cast<std::size_t>(i)] = 1.0;
    params.candidates = candidates.data();
    params.n_candidates = arity;
  }

  OwnedString summary;
  const auto st = nqw_web_export(q.ptr, levels.data(), static_cast<int>(levels.size()),
                                 format.c_str(), out_path.c_str(), &params, &summary.ptr);
  if (st == NQW_NO_ROOTS_FOUND) return fail(nqw_last_error(), kExitCheckFailed);
  if (st != NQW_OK) return fail_status(st);
  std::cout << summary.str() << "\n";
  const auto parsed = nlohmann::json::parse(summary.str());
  if (!parsed["failed_levels"].empty())
    std::cerr << "nqweb: warning: " << parsed["failed_levels"].size()
              << " level(s) produced no points\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local n-quasigroup reducibility analysis and (n+1)-web export"};
  app.require_subcommand(1);

  SpecOptions spec;
  std::string structure, box_text = "3:7", format = "json", out_path, levels_text;
  int samples = 64, trials = 200, cases = 1000, points = 64;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  bool allow_empty = false;

  auto* classify = app.add_subcommand("classify", "Exact reducibility classification");
  add_spec_options(classify, spec);
  classify->add_option("--out", out_path, "Write the JSON verdict here instead of stdout");

  auto* check = app.add_subcommand("check", "Sample the condition system of a structure");
  add_spec_options(check, spec);
  check->add_option("--structure", structure, "Block structure, e.g. \"[[1,2],3,4]\"");
  check->add_option("--samples", samples, "Sample points per condition (default 64)");
  check->add_option("--tol", tol, "Normalized-residual tolerance (default 1e-8)");
  check->add_option("--seed", seed, "Sampling seed (default 0)");
  check->add_option("--box", box_text,
                    "Sampling box \"lo:hi\" or \"lo:hi,...\" per coordinate (default 3:7)");
  check->add_option("--format", format, "Report format: json | csv (default json)");
  check->add_option("--out", out_path, "Write the report here instead of stdout");

  auto* verify = app.add_subcommand(
      "verify", "Cross-validate the classifier against sampling plus derivative oracles");
  verify->add_option("--trials", trials, "Random instances (default 200)");
  verify->add_option("--samples", samples, "Sample points per condition (default 64)");
  verify->add_option("--tol", tol, "Normalized-residual tolerance (default 1e-8)");
  verify->add_option("--seed", seed, "Generator seed (default 0)");
  verify->add_option("--cases", cases, "Derivative-oracle cases (default 1000)");
  verify->add_option("--out", out_path, "Write the report here instead of stdout");

  auto* web = app.add_subcommand("web-export", "Export level hypersurfaces and normals");
  add_spec_options(web, spec);
  web->add_option("--levels", levels_text, "Comma-separated level values");
  web->add_flag("--allow-empty", allow_empty, "Accept an empty level list");
  web->add_option("--points", points, "Points per level (default 64)");
  web->add_option("--seed", seed, "Sampling seed (default 0)");
  web->add_option("--box", box_text, "Sampling box (default: the instance's natural box)");
  web->add_option("--format", format, "Output format: csv | json (default csv)");
  web->add_option("--out", out_path, "Destination file (required)");

  CLI11_PARSE(app, argc, argv);

  if (classify->parsed()) return cmd_classify(spec, out_path);
  if (check->parsed())
    return cmd_check(spec, structure, samples, tol, seed, box_text, format, out_path);
  if (verify->parsed()) return cmd_verify(trials, samples, tol, seed, cases, out_path);
  if (web->parsed()) {
    const std::string web_format = web->count("--format") ? format : "csv";
    const std::string web_box = web->count("--box") ? box_text : "";
    return cmd_web_export(spec, levels_text, allow_empty, points, seed, web_box,
                          web_format, out_path);
  }
  return kExitBadInput;
}
