/* C interface for the OPO waveguide simulator core.
 *
 * All entry points return a status code:
 *   0  success
 *   1  invalid argument or configuration
 *   2  runtime failure (model infeasible, fit failed, I/O error)
 * On failure, opo_last_error() returns a human-readable message for the
 * calling thread.
 */
#ifndef OPO_H
#define OPO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct opo_config opo_config;

/* Copies the last error message for this thread into buf (NUL-terminated,
 * truncated to len). Returns the full message length. */
size_t opo_last_error(char* buf, size_t len);

/* Configuration: paper defaults, `key = value` text files, string overrides. */
opo_config* opo_config_create(void);
opo_config* opo_config_load(const char* path); /* NULL on failure */
opo_config* opo_config_clone(const opo_config* cfg);
int opo_config_set(opo_config* cfg, const char* key, const char* value);
int opo_config_get(const opo_config* cfg, const char* key, char* buf, size_t len);
int opo_config_save(const opo_config* cfg, const char* path);
uint64_t opo_config_hash(const opo_config* cfg);
void opo_config_destroy(opo_config* cfg);

/* Cluster spectrum + Giordmaine-Miller diagram over [band_lo, band_hi] nm;
 * writes CSV and SVG artifacts into out_dir. n_clusters may be NULL. */
int opo_run_spectrum(const opo_config* cfg, double band_lo_nm, double band_hi_nm,
                     const char* out_dir, int* n_clusters);

/* Best double-resonance temperature in [t0 - range/2, t0 + range/2]. */
int opo_find_double_resonance(const opo_config* cfg, double t0_c, double range_c,
                              double* temp_c, double* metric);

/* Closed-loop PID lock simulation; trace CSV written when out_csv != NULL. */
int opo_run_lock(const opo_config* cfg, double duration_s, const char* out_csv,
                 double* max_excursion_c, double* mean_counts_cps);

/* Monte-Carlo run; event streams written to the two paths (.csv suffix selects
 * text, anything else binary). Counts may be NULL. */
int opo_simulate(const opo_config* cfg, double duration_s, const char* out_ch1,
                 const char* out_ch2, uint64_t* n1, uint64_t* n2);

/* g2 analysis of two recorded event streams. */
int opo_analyze_g2(const opo_config* cfg, const char* ch1_path, const char* ch2_path,
                   const char* out_report, double* delta_nu_mhz, double* delta_nu_err_mhz);

/* Franson fringe analysis of a CSV with header phase_rad,counts,accidentals. */
int opo_analyze_franson(const opo_config* cfg, const char* fringe_csv, const char* out_report,
                        double* v_raw, double* v_subtracted);

/* Closed-form loss/rate/accidental budget written as text. */
int opo_budget_report(const opo_config* cfg, const char* out_path);

/* Full paper reproduction; all_pass set to 1 iff every table row passes. */
int opo_reproduce(const opo_config* cfg, const char* out_dir, int g2_seeds, int* all_pass);

/* Scalar helpers. */
int opo_finesse(const opo_config* cfg, double* finesse);
int opo_escape_probability(double t_pass, double r_face, double* p);

#ifdef __cplusplus
}
#endif

#endif /* OPO_H */
