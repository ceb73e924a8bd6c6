#ifndef PCONC_H
#define PCONC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_POINTER = 1,
  PC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input is not a valid quantum state (normalization, trace, positivity).
   */
  PC_STATUS_INVALID_STATE = 3,
  PC_STATUS_JSON = 4,
  PC_STATUS_NUMERICAL = 5,
  PC_STATUS_PANIC = 6,
} PcStatus;

/**
 * How the subspace pairing is chosen.
 */
typedef enum PcSearchMode {
  PC_SEARCH_MODE_KNOWN = 0,
  PC_SEARCH_MODE_BRUTE_FORCE = 1,
  PC_SEARCH_MODE_ASSIGNMENT = 2,
  PC_SEARCH_MODE_AUTO = 3,
} PcSearchMode;

/**
 * Witness report: matched subspaces and their product.
 */
typedef struct PcReport PcReport;

/**
 * Bipartite state (ket or density matrix).
 */
typedef struct PcState PcState;

/**
 * One matched subspace of a report.
 */
typedef struct PcSubspaceRow {
  size_t a_lo;
  size_t a_hi;
  size_t b_lo;
  size_t b_hi;
  double concurrence;
  double fidelity;
  double weight;
} PcSubspaceRow;

/**
 * Measurement budget of the subspace witness vs full tomography.
 */
typedef struct PcBudget {
  size_t d;
  size_t k;
  uint64_t pconc_measurements;
  uint64_t qst_measurements;
  double pconc_hours;
  double qst_hours;
} PcBudget;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread ("" after a success).
 * Valid until the next `pc_*` call on the same thread.
 */
const char *pc_last_error_message(void);

/**
 * Frees a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void pc_string_free(char *s);

/**
 * Parses a state file (`{"type", "dimA", "dimB", "data"}`).
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum PcStatus pc_state_from_json(const char *json, struct PcState **out);

/**
 * SPDC qutrit ket with amplitudes proportional to `(alpha, 1, beta)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PcStatus pc_state_spdc_qutrit(double alpha, double beta, struct PcState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum PcStatus pc_state_max_entangled(size_t d, struct PcState **out);

/**
 * Qudit ket with a Gaussian OAM spectrum of width `decay`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PcStatus pc_state_spdc_qudit(size_t d, double decay, struct PcState **out);

/**
 * # Safety
 * `s` must come from a `pc_state_*` constructor and not be freed twice.
 */
void pc_state_free(struct PcState *s);

/**
 * # Safety
 * `s` must be a live state; `dim_a` and `dim_b` must be writable.
 */
enum PcStatus pc_state_dims(const struct PcState *s, size_t *dim_a, size_t *dim_b);

/**
 * Serializes a state; release the result with [`pc_string_free`].
 *
 * # Safety
 * `s` must be a live state; `out` must be writable.
 */
enum PcStatus pc_state_to_json(const struct PcState *s, char **out);

/**
 * Wootters concurrence of a two-qubit state.
 *
 * # Safety
 * `s` must be a live state; `out` must be writable.
 */
enum PcStatus pc_wootters_concurrence(const struct PcState *s, double *out);

/**
 * I-concurrence of a pure state (unnormalized).
 *
 * # Safety
 * `s` must be a live state; `out` must be writable.
 */
enum PcStatus pc_i_concurrence(const struct PcState *s, double *out);

/**
 * Entanglement entropy of a pure state in bits.
 *
 * # Safety
 * `s` must be a live state; `out` must be writable.
 */
enum PcStatus pc_eof_pure(const struct PcState *s, double *out);

/**
 * # Safety
 * `s` must be a live state; `out` must be writable.
 */
enum PcStatus pc_purity(const struct PcState *s, double *out);

/**
 * # Safety
 * `s` must be a live state; `out` must be writable.
 */
enum PcStatus pc_pconcurrence(const struct PcState *s, enum PcSearchMode mode, double *out);

/**
 * Full witness report; release with [`pc_report_free`].
 *
 * # Safety
 * `s` must be a live state; `out` must be writable.
 */
enum PcStatus pc_witness_report(const struct PcState *s,
                                enum PcSearchMode mode,
                                struct PcReport **out);

/**
 * # Safety
 * `r` must be a live report; `out` must be writable.
 */
enum PcStatus pc_report_pconcurrence(const struct PcReport *r, double *out);

/**
 * Number of matched subspaces.
 *
 * # Safety
 * `r` must be a live report; `out` must be writable.
 */
enum PcStatus pc_report_len(const struct PcReport *r, size_t *out);

/**
 * # Safety
 * `r` must be a live report; `out` must be writable.
 */
enum PcStatus pc_report_row(const struct PcReport *r, size_t index, struct PcSubspaceRow *out);

/**
 * Report JSON; release the result with [`pc_string_free`].
 *
 * # Safety
 * `r` must be a live report; `out` must be writable.
 */
enum PcStatus pc_report_to_json(const struct PcReport *r, char **out);

/**
 * # Safety
 * `r` must come from [`pc_witness_report`] and not be freed twice.
 */
void pc_report_free(struct PcReport *r);

/**
 * `d(d-1)/2`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PcStatus pc_count_subspaces(size_t d, size_t *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum PcStatus pc_budget(size_t d, double integration_time_s, struct PcBudget *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PCONC_H */
