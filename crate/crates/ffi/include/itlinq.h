#ifndef ITLINQ_H
#define ITLINQ_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum ItlinqStatus {
  ITLINQ_STATUS_OK = 0,
  ITLINQ_STATUS_NULL_POINTER = 1,
  ITLINQ_STATUS_INVALID_ARGUMENT = 2,
  ITLINQ_STATUS_DIMENSION_MISMATCH = 3,
  ITLINQ_STATUS_LINK_OUT_OF_RANGE = 4,
  ITLINQ_STATUS_CAP_EXCEEDED = 5,
  ITLINQ_STATUS_PANIC = 6,
} ItlinqStatus;

/**
 * Linear SNR of each link and INR of each ordered pair.
 */
typedef struct ItlinqSnrTable ItlinqSnrTable;

/**
 * A set of links: source and destination positions.
 */
typedef struct ItlinqTopology ItlinqTopology;

/**
 * ITU-R P.1411 line-of-sight parameters.
 */
typedef struct ItlinqItu1411 {
  double carrier_hz;
  double h_b_m;
  double h_m_m;
  double shadow_sigma_db;
  double antenna_gain_db_per_device;
} ItlinqItu1411;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call into the library on the
 * same thread.
 */
const char *itlinq_last_error_message(void);

/**
 * Static name of a status code.
 */
const char *itlinq_status_name(enum ItlinqStatus status);

/**
 * Links with sources uniform on a disk of `radius_m` and each destination
 * uniform on the disk of radius `r0_m * n^(-beta)` around its source.
 */
enum ItlinqStatus itlinq_topology_disk(size_t n,
                                       double radius_m,
                                       double r0_m,
                                       double beta,
                                       uint64_t seed,
                                       struct ItlinqTopology **out);

/**
 * Sources uniform in a square of `side_m`, link lengths uniform in
 * `[len_min_m, len_max_m]`.
 */
enum ItlinqStatus itlinq_topology_square(size_t n,
                                         double side_m,
                                         double len_min_m,
                                         double len_max_m,
                                         uint64_t seed,
                                         struct ItlinqTopology **out);

/**
 * Release a topology. NULL is ignored.
 */
void itlinq_topology_free(struct ItlinqTopology *t);

enum ItlinqStatus itlinq_topology_len(const struct ItlinqTopology *t, size_t *n_out);

/**
 * Copy positions as interleaved `x, y` pairs; each buffer holds `2 n` values.
 */
enum ItlinqStatus itlinq_topology_points(const struct ItlinqTopology *t,
                                         double *src_xy_out,
                                         double *dst_xy_out);

/**
 * Table from explicit linear values: `snr` has `n` entries, `inr` is the
 * row-major `n x n` matrix with `inr[i*n + j]` received at destination `i`
 * from source `j`. The diagonal of `inr` is ignored.
 */
enum ItlinqStatus itlinq_snr_table_new(size_t n,
                                       const double *snr,
                                       const double *inr,
                                       struct ItlinqSnrTable **out);

/**
 * Table under pure path loss `g0 d^(-alpha)`.
 */
enum ItlinqStatus itlinq_snr_table_pathloss(const struct ItlinqTopology *t,
                                            double g0,
                                            double alpha,
                                            double tx_power_dbm,
                                            double noise_power_dbm,
                                            struct ItlinqSnrTable **out);

/**
 * Path loss times an independent unit-mean exponential fade per entry.
 */
enum ItlinqStatus itlinq_snr_table_rayleigh(const struct ItlinqTopology *t,
                                            double g0,
                                            double alpha,
                                            double tx_power_dbm,
                                            double noise_power_dbm,
                                            uint64_t seed,
                                            struct ItlinqSnrTable **out);

/**
 * ITU-R P.1411 line-of-sight loss with log-normal shadowing drawn from `seed`.
 */
enum ItlinqStatus itlinq_snr_table_itu1411(const struct ItlinqTopology *t,
                                           const struct ItlinqItu1411 *params,
                                           double tx_power_dbm,
                                           double noise_power_dbm,
                                           uint64_t seed,
                                           struct ItlinqSnrTable **out);

/**
 * Release a table. NULL is ignored.
 */
void itlinq_snr_table_free(struct ItlinqSnrTable *s);

enum ItlinqStatus itlinq_snr_table_len(const struct ItlinqSnrTable *s, size_t *n_out);

/**
 * Copy the linear SNRs (`n` values) and INRs (`n * n`, row-major, zero
 * diagonal). Either buffer may be NULL to skip it.
 */
enum ItlinqStatus itlinq_snr_table_values(const struct ItlinqSnrTable *s,
                                          double *snr_out,
                                          double *inr_out);

/**
 * Uniformly random permutation of `0..n`, highest priority first.
 */
enum ItlinqStatus itlinq_random_priority(size_t n, uint64_t seed, size_t *perm_out);

/**
 * ITLinQ with threshold `M snr^eta` (`M` in dB). `priority` lists all `n`
 * links, highest first; NULL means `0, 1, ..., n-1`. Writes `n` flags.
 */
enum ItlinqStatus itlinq_schedule_itlinq(const struct ItlinqSnrTable *s,
                                         const size_t *priority,
                                         double eta,
                                         double m_db,
                                         uint8_t *active_out);

/**
 * Fair ITLinQ: links whose SNR exceeds `snr_th_db` use `(eta_bar, m_bar_db)`
 * at their source check.
 */
enum ItlinqStatus itlinq_schedule_fair(const struct ItlinqSnrTable *s,
                                       const size_t *priority,
                                       double eta,
                                       double m_db,
                                       double snr_th_db,
                                       double eta_bar,
                                       double m_bar_db,
                                       uint8_t *active_out);

/**
 * FlashLinQ with SIR thresholds in dB. A nonzero `rx_max` compares against
 * the strongest earlier interferer instead of their sum.
 */
enum ItlinqStatus itlinq_schedule_flashlinq(const struct ItlinqSnrTable *s,
                                            const size_t *priority,
                                            double gamma_tx_db,
                                            double gamma_rx_db,
                                            uint8_t rx_max,
                                            uint8_t *active_out);

/**
 * Whether the `len` distinct links in `links` form an ITIS.
 */
enum ItlinqStatus itlinq_is_itis(const struct ItlinqSnrTable *s,
                                 const size_t *links,
                                 size_t len,
                                 uint8_t *result_out);

/**
 * Greedy partition into ITISs, visiting links in `order` (NULL for
 * `0..n`). `labels_out` (optional, `n` entries) receives each link's class.
 */
enum ItlinqStatus itlinq_greedy_itis_cover(const struct ItlinqSnrTable *s,
                                           const size_t *order,
                                           size_t *labels_out,
                                           size_t *kappa_out);

/**
 * Minimum partition into ITISs; refuses networks larger than `cap` links.
 */
enum ItlinqStatus itlinq_exact_itis_cover(const struct ItlinqSnrTable *s,
                                          size_t cap,
                                          size_t *labels_out,
                                          size_t *kappa_out);

/**
 * Rates in bits/s/Hz with interference treated as noise for the `n` flags in
 * `active`. `rates_out` (optional) receives `n` per-link rates.
 */
enum ItlinqStatus itlinq_link_rates(const struct ItlinqSnrTable *s,
                                    const uint8_t *active,
                                    double *rates_out,
                                    double *sum_out);

/**
 * Guaranteed fraction `lambda` and gap (bits) for `n` links with exponent
 * `beta`; `constant` scales the `beta < 1` regime.
 */
enum ItlinqStatus itlinq_theoretical_fraction(double beta,
                                              size_t n,
                                              double constant,
                                              double *lambda_out,
                                              double *gap_bits_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ITLINQ_H */
