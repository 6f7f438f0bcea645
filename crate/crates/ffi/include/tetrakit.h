#ifndef TETRAKIT_H
#define TETRAKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum TkStatus {
  TK_STATUS_OK = 0,
  TK_STATUS_NULL_POINTER = 1,
  TK_STATUS_BAD_SHAPE = 2,
  TK_STATUS_NON_FINITE = 3,
  TK_STATUS_NOT_A_CONTRACTION = 4,
  TK_STATUS_NOT_COMMUTING = 5,
  TK_STATUS_RESIDUAL_TOO_LARGE = 6,
  // The fundamental operators fail the commutativity conditions, so no
  // dilation model is built.
  TK_STATUS_CONDITIONS_FAILED = 7,
  TK_STATUS_DEPTH_TOO_SHALLOW = 8,
  TK_STATUS_INVALID_ARGUMENT = 9,
  TK_STATUS_JSON = 10,
  TK_STATUS_INTERNAL_INCONSISTENCY = 11,
  TK_STATUS_NUMERICAL = 12,
  TK_STATUS_PANIC = 13,
} TkStatus;

typedef enum TkVerdict {
  TK_VERDICT_CERTIFIED = 0,
  TK_VERDICT_REFUTED = 1,
  TK_VERDICT_PASSED_BATTERY = 2,
} TkVerdict;

typedef enum TkKind {
  TK_KIND_NONE = 0,
  TK_KIND_TETRABLOCK_UNITARY = 1,
  TK_KIND_TETRABLOCK_ISOMETRY = 2,
  TK_KIND_TETRABLOCK_CONTRACTION = 3,
} TkKind;

// Fundamental operators of a triple.
typedef struct TkFundamental TkFundamental;

// Truncated isometric dilation.
typedef struct TkModel TkModel;

// Commuting triple `(A, B, P)`.
typedef struct TkTriple TkTriple;

// Battery settings; pass null for the defaults (degree 4, 64 polynomials,
// 10000 sup samples, seed 0, tolerance 1e-9).
typedef struct TkBatteryConfig {
  size_t max_deg;
  size_t n_polys;
  size_t sup_samples;
  uint64_t seed;
  double tol;
} TkBatteryConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, static storage.
const char *tk_version(void);

// Message of the last failed call on this thread; valid until the next
// failing call on the same thread.
const char *tk_last_error(void);

// Frees a string returned by a `*_to_json` call.
//
// # Safety
// `s` must come from this library or be null.
void tk_string_free(char *s);

// Tetrablock membership of `x = (re0, im0, re1, im1, re2, im2)` by the
// closed-form criteria.
//
// # Safety
// `x` must point to 6 doubles; outputs must be valid or null.
enum TkStatus tk_point_in_tetrablock(const double *x, double tol, bool *in_open, bool *in_closed);

// Distinguished-boundary test for `x` laid out as in `tk_point_in_tetrablock`.
//
// # Safety
// `x` must point to 6 doubles; `on_boundary` must be valid.
enum TkStatus tk_point_on_distinguished_boundary(const double *x, double tol, bool *on_boundary);

// Builds a triple from three `n × n` row-major matrices. Fails with
// `TK_STATUS_NOT_COMMUTING` unless they commute.
//
// # Safety
// Real parts must point to `n * n` doubles; imaginary parts likewise or
// null; `out` must be valid.
enum TkStatus tk_triple_new(size_t n,
                            const double *a_re,
                            const double *a_im,
                            const double *b_re,
                            const double *b_im,
                            const double *p_re,
                            const double *p_im,
                            struct TkTriple **out);

// Parses `{"A": .., "B": .., "P": ..}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid.
enum TkStatus tk_triple_from_json(const char *json, struct TkTriple **out);

// # Safety
// `t` must come from this library or be null.
void tk_triple_free(struct TkTriple *t);

// # Safety
// `t` must be a live handle or null (returns 0).
size_t tk_triple_dim(const struct TkTriple *t);

// Sampled spectral-set battery.
//
// # Safety
// `t` must be live; `cfg` valid or null; `verdict` valid.
enum TkStatus tk_triple_check(const struct TkTriple *t,
                              const struct TkBatteryConfig *cfg,
                              enum TkVerdict *verdict);

// Classification: unitary, isometry, contraction (battery not refuted) or
// none.
//
// # Safety
// `t` must be live; `cfg` valid or null; `kind` valid.
enum TkStatus tk_triple_classify(const struct TkTriple *t,
                                 const struct TkBatteryConfig *cfg,
                                 enum TkKind *kind);

// Solves the fundamental equations for `t`.
//
// # Safety
// `t` must be live; `out` valid.
enum TkStatus tk_fundamental_new(const struct TkTriple *t, struct TkFundamental **out);

// # Safety
// `f` must come from this library or be null.
void tk_fundamental_free(struct TkFundamental *f);

// Rank of the defect operator `D_P`.
//
// # Safety
// `f` must be live or null (returns 0).
size_t tk_fundamental_rank(const struct TkFundamental *f);

// `max_z w(F1 + z F2)` over the unit-circle sweep.
//
// # Safety
// `f` must be live or null (returns NaN).
double tk_fundamental_w_sweep(const struct TkFundamental *f);

// Copies `F1` (`which == 1`) or `F2` (`which == 2`) as an `n × n` operator
// on `H` (zero off the defect space) into `re`, `im`.
//
// # Safety
// `f` must be live; `re` and `im` must hold `n * n` doubles.
enum TkStatus tk_fundamental_operator(const struct TkFundamental *f,
                                      int which,
                                      double *re,
                                      double *im);

// Builds the depth-`depth` dilation model of `t`. Fails with
// `TK_STATUS_CONDITIONS_FAILED` when the fundamental operators do not
// satisfy the commutativity conditions.
//
// # Safety
// `t` must be live; `out` valid.
enum TkStatus tk_dilation_build(const struct TkTriple *t, size_t depth, struct TkModel **out);

// Parses model JSON.
//
// # Safety
// `json` must be a NUL-terminated string; `out` valid.
enum TkStatus tk_model_from_json(const char *json, struct TkModel **out);

// Serializes the model; free the result with `tk_string_free`.
//
// # Safety
// `m` must be live; `out` valid.
enum TkStatus tk_model_to_json(const struct TkModel *m, char **out);

// # Safety
// `m` must come from this library or be null.
void tk_model_free(struct TkModel *m);

// Dimension of the model space.
//
// # Safety
// `m` must be live or null (returns 0).
size_t tk_model_dim(const struct TkModel *m);

// Worst moment residual over total degree `<= max_degree`, against the
// triple read off the model's first block.
//
// # Safety
// `m` must be live; `worst` valid.
enum TkStatus tk_model_verify_moments(const struct TkModel *m, size_t max_degree, double *worst);

// Largest of the model identity residuals.
//
// # Safety
// `m` must be live; `worst` valid.
enum TkStatus tk_model_identity_residual(const struct TkModel *m, double *worst);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TETRAKIT_H */
