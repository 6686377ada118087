/* nqweb - local n-quasigroup reducibility analysis and (n+1)-web geometry.
 *
 * C interface to the nqweb core. All functions return an nqw_status; every
 * out-parameter is written only on NQW_OK. Strings returned through char**
 * are heap-allocated and must be released with nqw_string_free(). Handles
 * are opaque and must be released with their matching *_free(). Handles are
 * immutable after creation and safe to share across threads.
 */

#ifndef NQWEB_H
#define NQWEB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NQW_API __declspec(dllexport)
#else
#define NQW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nqw_status {
  NQW_OK = 0,
  NQW_ERROR = 1,             /* unclassified failure; see nqw_last_error() */
  NQW_PARSE_ERROR = 2,       /* malformed spec, structure, or expression */
  NQW_NOT_A_QUASIGROUP = 3,  /* equation not solvable: degenerate instance */
  NQW_SINGULAR_POINT = 4,    /* evaluation at the singular locus */
  NQW_INVALID_STRUCTURE = 5, /* block tree violates the size/coverage rules */
  NQW_NO_ROOTS_FOUND = 6,    /* level-set sampling retry cap hit */
  NQW_INVALID_ARGUMENT = 7,
  NQW_IO_ERROR = 8
} nqw_status;

/* Thread-local message for the most recent failure in this thread. */
NQW_API const char* nqw_last_error(void);

NQW_API const char* nqw_version(void);

NQW_API void nqw_string_free(char* s);

/* ---- rational-family instances ------------------------------------------ */

typedef struct nqw_quasigroup nqw_quasigroup;

/* Spec JSON: {"n": int, "A": "rat", "a": "rat",
 *             "f": [{"poly": ["c0", "c1", ...]}, ...]}
 * with rationals as decimal integers or "p/q" strings. */
NQW_API nqw_status nqw_quasigroup_from_json(const char* spec_json, nqw_quasigroup** out);

/* Built-in gallery: "eq18" (n >= 3), "spheres" (n >= 2), "circles" (n = 2). */
NQW_API nqw_status nqw_quasigroup_example(const char* name, int n, nqw_quasigroup** out);

NQW_API void nqw_quasigroup_free(nqw_quasigroup* q);

NQW_API nqw_status nqw_quasigroup_arity(const nqw_quasigroup* q, int* out);

NQW_API nqw_status nqw_quasigroup_to_json(const nqw_quasigroup* q, char** out_json);

/* F(p) for a point with n coordinates. NQW_SINGULAR_POINT within 1e-6 of
 * the singular hyperplane. */
NQW_API nqw_status nqw_quasigroup_eval(const nqw_quasigroup* q, const double* point,
                                       int n, double* out);

/* Equivalent instance with A = a = 0. */
NQW_API nqw_status nqw_quasigroup_isotopy_normalize(const nqw_quasigroup* q,
                                                    nqw_quasigroup** out);

/* Exact classification:
 * {"verdict": "Irreducible|Reducible|CompletelyReducible|NotAQuasigroup",
 *  "blocks": [{"indices": [...], "slope": "p/q", "intercepts": [...]}, ...]}.
 * Degenerate instances classify as NotAQuasigroup and still return NQW_OK;
 * the status tells malformed input apart from a degenerate verdict. */
NQW_API nqw_status nqw_quasigroup_classify(const nqw_quasigroup* q, char** out_json);

/* ---- generic maps -------------------------------------------------------- */

typedef struct nqw_map nqw_map;

/* Prefix notation, e.g. "(/ (+ (pow x1 2) x2) (+ x1 x2))". arity of 0 means
 * "use the highest variable index". */
NQW_API nqw_status nqw_map_parse(const char* expression, int arity, nqw_map** out);

NQW_API void nqw_map_free(nqw_map* m);

NQW_API nqw_status nqw_map_arity(const nqw_map* m, int* out);

NQW_API nqw_status nqw_map_eval(const nqw_map* m, const double* point, int n, double* out);

/* Second-order jet along directions (i, j): value, F_i, F_j, F_ij. */
NQW_API nqw_status nqw_map_jet(const nqw_map* m, const double* point, int n, int i, int j,
                               double out_jet[4]);

/* ---- reducibility checking ----------------------------------------------- */

typedef struct nqw_check_params {
  int samples;       /* <= 0: default 64 */
  double tol;        /* <= 0: default 1e-8 */
  uint64_t seed;
  const double* box_lo; /* arrays of length n, or NULL for the default box */
  const double* box_hi;
} nqw_check_params;

/* Samples the condition system of a block structure such as "[[1,2],3,4]".
 * format is "json" or "csv" (one row per condition triple). *out_all_hold
 * is 1 iff every condition held at the tolerance. */
NQW_API nqw_status nqw_check_structure(const nqw_quasigroup* q, const char* structure,
                                       const nqw_check_params* params, const char* format,
                                       char** out_report, int* out_all_hold);

NQW_API nqw_status nqw_map_check_structure(const nqw_map* m, const char* structure,
                                           const nqw_check_params* params,
                                           const char* format, char** out_report,
                                           int* out_all_hold);

/* ---- self-verification ---------------------------------------------------- */

typedef struct nqw_verify_params {
  int trials;          /* <= 0: default 200 */
  int samples;         /* <= 0: default 64 */
  double tol;          /* <= 0: default 1e-8 */
  uint64_t seed;
  int derivative_cases; /* <= 0: default 1000 */
} nqw_verify_params;

/* Cross-validates the exact classifier against sampled condition checks on
 * random instances and runs the derivative-oracle suite (closed forms vs
 * jets vs finite differences). *out_all_pass is 1 iff everything agreed.
 * The report is byte-identical for identical parameters. */
NQW_API nqw_status nqw_verify(const nqw_verify_params* params, char** out_report,
                              int* out_all_pass);

/* ---- web geometry ---------------------------------------------------------- */

typedef struct nqw_web_params {
  int points_per_level; /* <= 0: default 64 */
  uint64_t seed;
  const double* box_lo; /* arrays of length n, or NULL for the default box */
  const double* box_hi;
  double level_tol;     /* <= 0: default 1e-9 */
  /* Optional candidate points (row-major, n_candidates x n) admitted to a
   * slice whenever they satisfy the polynomial hypersurface equation; used
   * for pencil base points that every level contains. */
  const double* candidates;
  int n_candidates;
} nqw_web_params;

/* Writes level-set slices for the given alphas to `path` in "csv"
 * (header x1..xn,alpha,N1..Nn) or "json" format. Levels with no reachable
 * points are skipped; only all levels failing is an error. The summary
 * reports points per level and skipped levels as JSON. */
NQW_API nqw_status nqw_web_export(const nqw_quasigroup* q, const double* levels,
                                  int n_levels, const char* format, const char* path,
                                  const nqw_web_params* params, char** out_summary);

/* Normal vector (f_1'(x_1) - alpha, ..., f_n'(x_n) - alpha) with
 * alpha = F(point), written to out_normal[0..n-1]. */
NQW_API nqw_status nqw_normal_vector(const nqw_quasigroup* q, const double* point, int n,
                                     double* out_normal);

/* Index pairs whose normal coordinates agree identically over the whole
 * hypersurface family, as JSON {"pairs": [[i, j], ...]}. */
NQW_API nqw_status nqw_equal_normal_pairs(const nqw_quasigroup* q, int samples,
                                       uint64_t seed, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* NQWEB_H */
