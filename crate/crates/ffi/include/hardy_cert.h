#ifndef HARDY_CERT_H
#define HARDY_CERT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of the rigidity check on a block model.
 */
typedef enum HcRigidity {
  HC_RIGIDITY_CONSISTENT = 0,
  HC_RIGIDITY_REJECTED_MIXTURE = 1,
  HC_RIGIDITY_BELOW_RESIDUAL_FLOOR = 2,
  HC_RIGIDITY_INCONSISTENT = 3,
} HcRigidity;

/**
 * Result code of every fallible call.
 */
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_ARGUMENT = 2,
  HC_STATUS_INVALID_BEHAVIOR = 3,
  HC_STATUS_INVALID_MODEL = 4,
  HC_STATUS_DEGENERATE = 5,
  HC_STATUS_IO = 6,
  HC_STATUS_PARSE = 7,
  HC_STATUS_INTERNAL = 8,
} HcStatus;

/**
 * Certification verdict; values match the command-line exit codes.
 */
typedef enum HcVerdict {
  HC_VERDICT_CERTIFIED = 0,
  HC_VERDICT_REJECTED = 1,
  HC_VERDICT_BOUNDARY = 3,
} HcVerdict;

/**
 * Opaque 16-entry behavior table.
 */
typedef struct HcBehavior HcBehavior;

/**
 * Opaque block model.
 */
typedef struct HcBlockModel HcBlockModel;

/**
 * Opaque certificate.
 */
typedef struct HcCertificate HcCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *hc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hc_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void hc_string_free(char *s);

/**
 * Closed-form Hardy behavior of `(r, s)` in the closed unit square.
 *
 * # Safety
 * `out` must point to writable storage for one handle.
 */
enum HcStatus hc_behavior_from_point(double r, double s, struct HcBehavior **out);

/**
 * Behavior from 16 probabilities in storage order (index `8x + 4y + 2a + b`).
 * The table is validated.
 *
 * # Safety
 * `p` must point to `len` readable doubles; `out` as above.
 */
enum HcStatus hc_behavior_from_array(const double *p, size_t len, struct HcBehavior **out);

/**
 * Parses behavior JSON. The probabilities are not validated, so malformed
 * data can still be passed to [`hc_certify`] for a diagnostic.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` as above.
 */
enum HcStatus hc_behavior_from_json(const char *json, struct HcBehavior **out);

/**
 * Reads a behavior file (`.csv` or JSON).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` as above.
 */
enum HcStatus hc_behavior_read(const char *path, struct HcBehavior **out);

/**
 * Copies the 16 probabilities into `out`, which must hold `len >= 16` doubles.
 *
 * # Safety
 * `b` must be a live handle; `out` must point to `len` writable doubles.
 */
enum HcStatus hc_behavior_probabilities(const struct HcBehavior *b, double *out, size_t len);

/**
 * Serializes a behavior as JSON; free the result with [`hc_string_free`].
 *
 * # Safety
 * `b` must be a live handle; `out` must point to writable storage.
 */
enum HcStatus hc_behavior_to_json(const struct HcBehavior *b, char **out);

/**
 * Largest CHSH value and the locality verdict.
 *
 * # Safety
 * `b` must be a live handle; `chsh_max` and `local` must be writable.
 */
enum HcStatus hc_behavior_chsh(const struct HcBehavior *b, double *chsh_max, bool *local);

/**
 * Releases a behavior handle. NULL is ignored.
 *
 * # Safety
 * `b` must be NULL or a live handle not used afterwards.
 */
void hc_behavior_free(struct HcBehavior *b);

/**
 * Certifies a behavior at tolerance `tol` (use a nonpositive value for the
 * default `1e-6`) with the default boundary margin.
 *
 * # Safety
 * `b` must be a live handle; `out` must point to writable storage.
 */
enum HcStatus hc_certify(const struct HcBehavior *b, double tol, struct HcCertificate **out);

/**
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum HcStatus hc_certificate_verdict(const struct HcCertificate *c, enum HcVerdict *out);

/**
 * The extracted `(r, s)`; fails with `InvalidBehavior` when none was read.
 *
 * # Safety
 * `c` must be a live handle; `r` and `s` must be writable.
 */
enum HcStatus hc_certificate_point(const struct HcCertificate *c, double *r, double *s);

/**
 * Largest entrywise deviation from the Hardy table; fails when unavailable.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum HcStatus hc_certificate_residual(const struct HcCertificate *c, double *out);

/**
 * Hardy state amplitudes as 8 doubles `(re, im)` for `|00>, |01>, |10>, |11>`;
 * fails unless the certificate is certified.
 *
 * # Safety
 * `c` must be a live handle; `out` must point to `len >= 8` writable doubles.
 */
enum HcStatus hc_certificate_amplitudes(const struct HcCertificate *c, double *out, size_t len);

/**
 * True iff the certificate is certified and its point, state and angles all
 * reproduce the input behavior.
 *
 * # Safety
 * `c` must be NULL or a live handle.
 */
bool hc_certificate_roundtrip_check(const struct HcCertificate *c);

/**
 * Serializes a certificate as JSON; free the result with [`hc_string_free`].
 *
 * # Safety
 * `c` must be a live handle; `out` must point to writable storage.
 */
enum HcStatus hc_certificate_to_json(const struct HcCertificate *c, char **out);

/**
 * # Safety
 * `c` must be NULL or a live handle not used afterwards.
 */
void hc_certificate_free(struct HcCertificate *c);

/**
 * Parses a block model from JSON `{"blocks":[{"i","j","mu","r","s"}],"phi","xi"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must point to writable storage.
 */
enum HcStatus hc_model_from_json(const char *json, struct HcBlockModel **out);

/**
 * All `n_a * n_b` blocks at `(r, s)` with row-major weights `mu`.
 *
 * # Safety
 * `mu` must point to `n_a * n_b` readable doubles; `out` must be writable.
 */
enum HcStatus hc_model_common_point(double r,
                                    double s,
                                    size_t n_a,
                                    size_t n_b,
                                    const double *mu,
                                    struct HcBlockModel **out);

/**
 * Weighted mixture of the per-block Hardy tables.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum HcStatus hc_model_mixture(const struct HcBlockModel *m, struct HcBehavior **out);

/**
 * Rigidity status and form residual of the model's mixture at tolerance `tol`.
 *
 * # Safety
 * `m` must be a live handle; `status` and `residual` must be writable.
 */
enum HcStatus hc_model_verify(const struct HcBlockModel *m,
                              double tol,
                              enum HcRigidity *status,
                              double *residual);

/**
 * Fidelity of the state extracted by the local isometry with the Hardy
 * state; fails with `InvalidModel` unless all populated blocks share a point.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum HcStatus hc_model_extract_fidelity(const struct HcBlockModel *m, double *out);

/**
 * # Safety
 * `m` must be NULL or a live handle not used afterwards.
 */
void hc_model_free(struct HcBlockModel *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARDY_CERT_H */
