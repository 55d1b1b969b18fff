#ifndef BPCENTRE_H
#define BPCENTRE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum BpStatus {
  BP_STATUS_OK = 0,
  /**
   * A required pointer was null or a string was not UTF-8.
   */
  BP_STATUS_NULL_ARGUMENT = 1,
  BP_STATUS_NOT_ODD_PRIME = 2,
  /**
   * Bad weight, height, exponent sequence or configuration.
   */
  BP_STATUS_INVALID_ARGUMENT = 3,
  /**
   * A computed object failed an exact consistency check.
   */
  BP_STATUS_INCONSISTENT = 4,
  BP_STATUS_NOT_STABILIZED = 5,
  BP_STATUS_IO = 6,
  /**
   * Cache file malformed or built for different parameters.
   */
  BP_STATUS_CACHE = 7,
  /**
   * Output buffer too small; the required length was still written.
   */
  BP_STATUS_BUFFER_TOO_SMALL = 8,
  BP_STATUS_PANIC = 9,
} BpStatus;

/**
 * η_R table handle.
 */
typedef struct BpEtaTable BpEtaTable;

/**
 * `Z_(p)`-lattice handle.
 */
typedef struct BpLattice BpLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *bp_last_error_message(void);

/**
 * Frees a string returned by this library.
 */
void bp_string_free(char *s);

/**
 * Builds the η_R table for `p` up to weight `max_weight`.
 */
enum BpStatus bp_eta_table_build(uint32_t p, uint64_t max_weight, struct BpEtaTable **out);

/**
 * Loads and validates a cached table.
 */
enum BpStatus bp_eta_table_load(const char *path, struct BpEtaTable **out);

/**
 * Writes the canonical cache document for `table` to `path`.
 */
enum BpStatus bp_eta_table_save(const struct BpEtaTable *table, const char *path);

void bp_eta_table_free(struct BpEtaTable *table);

enum BpStatus bp_eta_table_max_weight(const struct BpEtaTable *table, uint64_t *out);

/**
 * `η_R(v^γ)` rendered as text, e.g. `"v_1 + 3·t_1"`. Free with
 * [`bp_string_free`].
 */
enum BpStatus bp_eta_r_string(const struct BpEtaTable *table,
                              const uint32_t *gamma,
                              size_t len,
                              char **out);

/**
 * Realizes `μ̄ E_{α,β}` and reports `log_p μ̄`.
 */
enum BpStatus bp_realize(const struct BpEtaTable *table,
                         const uint32_t *alpha,
                         size_t alpha_len,
                         const uint32_t *beta,
                         size_t beta_len,
                         uint32_t *out_mu_bar_valuation);

/**
 * Rank of the commutant of the projected elementary family in weight `r`
 * at height `n`, and whether it consists of scalar matrices.
 */
enum BpStatus bp_centre_rank(const struct BpEtaTable *table,
                             uint64_t r,
                             uint32_t n,
                             size_t *out_rank,
                             bool *out_is_scalar);

/**
 * Window `(μ_0, …, μ_N)` of `S_g` with default generator caps.
 */
enum BpStatus bp_sg_window(uint32_t p, uint64_t big_n, struct BpLattice **out);

/**
 * Windows realized by operations that are scalar on `BP⟨n⟩_*` in weights `≤ N`.
 */
enum BpStatus bp_diagonal_lattice(const struct BpEtaTable *table,
                                  uint64_t big_n,
                                  uint32_t n,
                                  struct BpLattice **out);

void bp_lattice_free(struct BpLattice *lattice);

enum BpStatus bp_lattice_rank(const struct BpLattice *lattice,
                              size_t *out_rank,
                              size_t *out_ambient);

/**
 * Exponents of the echelon pivots `p^e`. `*out_len` always receives the
 * required length.
 */
enum BpStatus bp_lattice_pivot_exponents(const struct BpLattice *lattice,
                                         uint32_t *buf,
                                         size_t cap,
                                         size_t *out_len);

/**
 * Smith invariants as ascending `p`-exponents.
 */
enum BpStatus bp_lattice_elementary_divisors(const struct BpLattice *lattice,
                                             uint32_t *buf,
                                             size_t cap,
                                             size_t *out_len);

/**
 * Whether `inner ⊆ outer`.
 */
enum BpStatus bp_lattice_is_sublattice(const struct BpLattice *inner,
                                       const struct BpLattice *outer,
                                       bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BPCENTRE_H */
