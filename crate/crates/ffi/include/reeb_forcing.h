#ifndef REEB_FORCING_H
#define REEB_FORCING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RfStatus {
  RF_STATUS_OK = 0,
  RF_STATUS_NULL_POINTER = 1,
  RF_STATUS_INVALID_UTF8 = 2,
  RF_STATUS_PARSE = 3,
  RF_STATUS_RESONANT = 4,
  RF_STATUS_INVALID_INPUT = 5,
  RF_STATUS_HYPOTHESIS = 6,
  RF_STATUS_EMPTY_INTERVAL = 7,
  RF_STATUS_OVERFLOW = 8,
  RF_STATUS_NUMERICAL = 9,
  RF_STATUS_BUFFER_TOO_SMALL = 10,
  RF_STATUS_OUT_OF_RANGE = 11,
  RF_STATUS_INTERNAL = 12,
} RfStatus;

/**
 * An owned list of classes `(p, q)`.
 */
typedef struct RfFractionList RfFractionList;

/**
 * A hyperbolic matrix in `SL(2, Z)`.
 */
typedef struct RfMonodromy RfMonodromy;

/**
 * A closed orbit with its rotation data.
 */
typedef struct RfOrbit RfOrbit;

/**
 * A number `(a + b sqrt(d))/c`.
 */
typedef struct RfSurd RfSurd;

typedef struct RfFraction {
  int64_t p;
  int64_t q;
} RfFraction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rf_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes; `written` must be
 * null or valid for one write.
 */
enum RfStatus rf_last_error_message(char *buf, size_t len, size_t *written);

/**
 * Parses `(a+b*sqrt(d))/c`, `p/q`, integers and `sqrt(d)`.
 *
 * # Safety
 * `input` must be a NUL-terminated string; `out` must be valid for one write.
 */
enum RfStatus rf_surd_parse(const char *input, struct RfSurd **out);

/**
 * `(a + b sqrt(d))/c`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum RfStatus rf_surd_new(int64_t a, int64_t b, int64_t c, uint64_t d, struct RfSurd **out);

/**
 * # Safety
 * `s` must be null or a handle from this library not yet freed.
 */
void rf_surd_free(struct RfSurd *s);

/**
 * Canonical text form, see [`copy_out`] for the buffer protocol.
 *
 * # Safety
 * `s` must be a live handle; `buf`/`written` as for [`rf_last_error_message`].
 */
enum RfStatus rf_surd_to_string(const struct RfSurd *s, char *buf, size_t len, size_t *written);

/**
 * Exact comparison; writes -1, 0 or 1.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` valid for one write.
 */
enum RfStatus rf_surd_cmp(const struct RfSurd *a, const struct RfSurd *b, int32_t *out);

/**
 * Exact floor.
 *
 * # Safety
 * `s` must be a live handle; `out` valid for one write.
 */
enum RfStatus rf_surd_floor(const struct RfSurd *s, int64_t *out);

/**
 * # Safety
 * `s` must be a live handle; `out` valid for one write.
 */
enum RfStatus rf_surd_to_f64(const struct RfSurd *s, double *out);

/**
 * Elliptic orbit with rotation number `theta` (copied).
 *
 * # Safety
 * `name` must be a NUL-terminated string, `theta` a live handle, `out`
 * valid for one write.
 */
enum RfStatus rf_orbit_elliptic(const char *name, const struct RfSurd *theta, struct RfOrbit **out);

/**
 * Hyperbolic orbit of index `n`.
 *
 * # Safety
 * `name` must be a NUL-terminated string, `out` valid for one write.
 */
enum RfStatus rf_orbit_hyperbolic(const char *name, int64_t n, struct RfOrbit **out);

/**
 * # Safety
 * `o` must be null or a handle from this library not yet freed.
 */
void rf_orbit_free(struct RfOrbit *o);

/**
 * Conley-Zehnder index of the `k`-fold cover.
 *
 * # Safety
 * `o` must be a live handle; `out` valid for one write.
 */
enum RfStatus rf_orbit_cz(const struct RfOrbit *o, uint64_t k, int64_t *out);

/**
 * # Safety
 * `o` must be a live handle; `out` valid for one write.
 */
enum RfStatus rf_orbit_alpha_minus(const struct RfOrbit *o, uint64_t k, int64_t *out);

/**
 * # Safety
 * `o` must be a live handle; `out` valid for one write.
 */
enum RfStatus rf_orbit_alpha_plus(const struct RfOrbit *o, uint64_t k, int64_t *out);

/**
 * # Safety
 * `o` must be a live handle; `out` valid for one write.
 */
enum RfStatus rf_orbit_parity(const struct RfOrbit *o, uint64_t k, uint8_t *out);

/**
 * Classes of closed orbits forced by a Hopf link with rotation numbers
 * `theta1`, `theta2`, sorted by `(p, q)`.
 *
 * # Safety
 * `theta1`, `theta2` must be live handles; `out` valid for one write.
 */
enum RfStatus rf_forcing_hopf(const struct RfSurd *theta1,
                              const struct RfSurd *theta2,
                              uint64_t max_p,
                              struct RfFractionList **out);

/**
 * Number of entries; 0 for a null list.
 *
 * # Safety
 * `list` must be null or a live handle.
 */
size_t rf_fraction_list_len(const struct RfFractionList *list);

/**
 * # Safety
 * `list` must be a live handle; `out` valid for one write.
 */
enum RfStatus rf_fraction_list_get(const struct RfFractionList *list,
                                   size_t index,
                                   struct RfFraction *out);

/**
 * # Safety
 * `list` must be null or a handle from this library not yet freed.
 */
void rf_fraction_list_free(struct RfFractionList *list);

/**
 * Matrix `[[a, b], [c, d]]`; needs determinant 1 and `|a + d| > 2`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum RfStatus rf_monodromy_new(int64_t a,
                               int64_t b,
                               int64_t c,
                               int64_t d,
                               struct RfMonodromy **out);

/**
 * # Safety
 * `m` must be null or a handle from this library not yet freed.
 */
void rf_monodromy_free(struct RfMonodromy *m);

/**
 * Fixed points of `A^k` on the torus as a decimal string.
 *
 * # Safety
 * `m` must be a live handle; `buf`/`written` as for [`rf_last_error_message`].
 */
enum RfStatus rf_monodromy_count(const struct RfMonodromy *m,
                                 uint64_t k,
                                 char *buf,
                                 size_t len,
                                 size_t *written);

/**
 * As [`rf_monodromy_count`], failing with `Overflow` above `u64::MAX`.
 *
 * # Safety
 * `m` must be a live handle; `out` valid for one write.
 */
enum RfStatus rf_monodromy_count_u64(const struct RfMonodromy *m, uint64_t k, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REEB_FORCING_H */
