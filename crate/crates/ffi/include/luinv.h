#ifndef LUINV_H
#define LUINV_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum LuStatus {
  LU_STATUS_OK = 0,
  LU_STATUS_NULL_POINTER = 1,
  LU_STATUS_INVALID_ARGUMENT = 2,
  LU_STATUS_SHAPE = 3,
  LU_STATUS_PARSE = 4,
  LU_STATUS_IO = 5,
  LU_STATUS_VALIDATION = 6,
  LU_STATUS_NUMERICAL = 7,
  LU_STATUS_LABEL = 8,
  LU_STATUS_BUFFER_TOO_SMALL = 9,
  LU_STATUS_PANIC = 10,
} LuStatus;

/**
 * A matrix product state.
 */
typedef struct LuChain LuChain;

/**
 * A permutation-tuple label.
 */
typedef struct LuLabel LuLabel;

/**
 * A pure state or density operator.
 */
typedef struct LuState LuState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *lu_last_error(void);

/**
 * Loads and validates a state file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum LuStatus lu_state_load(const char *path, struct LuState **out);

/**
 * # Safety
 * `state` must be a live handle and `path` a NUL-terminated string.
 */
enum LuStatus lu_state_save(const struct LuState *state, const char *path);

/**
 * Seeded random pure state, or a random density operator if `density` is nonzero.
 *
 * # Safety
 * `dims` must point to `n` values; `out` must be writable.
 */
enum LuStatus lu_state_random(const size_t *dims,
                              size_t n,
                              uint64_t seed,
                              int32_t density,
                              struct LuState **out);

/**
 * Writes the subsystem dimensions into `buf`.
 *
 * # Safety
 * `state` must be a live handle; `buf` must hold `cap` values.
 */
enum LuStatus lu_state_dims(const struct LuState *state, size_t *buf, size_t cap, size_t *out_len);

/**
 * Sets `out` to 1 for a pure state, 0 for a density operator.
 *
 * # Safety
 * `state` must be a live handle.
 */
enum LuStatus lu_state_is_pure(const struct LuState *state, int32_t *out);

/**
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void lu_state_free(struct LuState *state);

/**
 * Parses a label such as `"3; (123) | (12)"`.
 *
 * # Safety
 * `label` must be a NUL-terminated string; `out` must be writable.
 */
enum LuStatus lu_label_parse(const char *label, struct LuLabel **out);

/**
 * Canonical representative of the label's class.
 *
 * # Safety
 * `label` must be a live handle; `out` must be writable.
 */
enum LuStatus lu_label_canonical(const struct LuLabel *label, struct LuLabel **out);

/**
 * Writes the label text including its NUL terminator; `out_len` receives the
 * required size in bytes.
 *
 * # Safety
 * `label` must be a live handle; `buf` must hold `cap` bytes.
 */
enum LuStatus lu_label_to_string(const struct LuLabel *label,
                                 char *buf,
                                 size_t cap,
                                 size_t *out_len);

/**
 * # Safety
 * `label` must be null or a handle not yet freed.
 */
void lu_label_free(struct LuLabel *label);

/**
 * Number of canonical classes for `n` subsystems at degree `k`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LuStatus lu_invariant_class_count(size_t n, size_t k, size_t *out);

/**
 * Invariant value on the state.
 *
 * # Safety
 * Handles must be live; `out_re` and `out_im` must be writable.
 */
enum LuStatus lu_invariant_eval(const struct LuState *state,
                                const struct LuLabel *label,
                                double *out_re,
                                double *out_im);

/**
 * Largest relative deviation under `trials` random local unitaries.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum LuStatus lu_invariant_verify(const struct LuState *state,
                                  const struct LuLabel *label,
                                  size_t trials,
                                  uint64_t seed,
                                  double *out);

/**
 * Rényi entropy of order `alpha` of the subsystems in `keep`.
 *
 * # Safety
 * `state` must be live; `keep` must point to `nkeep` values; `out` writable.
 */
enum LuStatus lu_entropy_renyi(const struct LuState *state,
                               const size_t *keep,
                               size_t nkeep,
                               double alpha,
                               double *out);

/**
 * Von Neumann entropy of the subsystems in `keep`.
 *
 * # Safety
 * As for [`lu_entropy_renyi`].
 */
enum LuStatus lu_entropy_von_neumann(const struct LuState *state,
                                     const size_t *keep,
                                     size_t nkeep,
                                     double *out);

/**
 * Factors a pure state. `max_chi == 0` and `cutoff <= 0` disable the
 * respective truncation; setting both is an error.
 *
 * # Safety
 * `state` must be live; `out` must be writable.
 */
enum LuStatus lu_mps_factor(const struct LuState *state,
                            size_t max_chi,
                            double cutoff,
                            struct LuChain **out);

/**
 * Number of sites.
 *
 * # Safety
 * `chain` must be live; `out` must be writable.
 */
enum LuStatus lu_chain_len(const struct LuChain *chain, size_t *out);

/**
 * Singular values across bond `bond` (between sites `bond` and `bond + 1`).
 *
 * # Safety
 * `chain` must be live; `buf` must hold `cap` values.
 */
enum LuStatus lu_chain_bond_sigmas(const struct LuChain *chain,
                                   size_t bond,
                                   double *buf,
                                   size_t cap,
                                   size_t *out_len);

/**
 * Fidelity between the reconstructed chain and a pure state.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum LuStatus lu_chain_fidelity(const struct LuChain *chain,
                                const struct LuState *state,
                                double *out);

/**
 * # Safety
 * `chain` must be null or a handle not yet freed.
 */
void lu_chain_free(struct LuChain *chain);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LUINV_H */
