/* C interface to the weylwalk toolkit: chamber polynomials, tail constants,
 * precomputed V tables, and the experiment command runner.
 *
 * Every function returns a ww_status; on failure ww_last_error() holds a
 * human-readable message for the calling thread, valid until the next call
 * on that thread. Strings returned through char** are heap-allocated and
 * released with ww_string_free.
 */
#ifndef WEYLWALK_H
#define WEYLWALK_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ww_status {
    WW_OK = 0,
    WW_ERR_USAGE = 2,   /* bad arguments or configuration */
    WW_ERR_CONTRACT = 3 /* numerical-contract violation during a run */
} ww_status;

const char* ww_version(void);
const char* ww_last_error(void);

/* Chamber polynomial h^Z at x (k doubles). chamber is "A", "C" or "D". */
ww_status ww_h(const char* chamber, int k, const double* x, double* out);

/* Tail constants; chamber is "C" or "D". */
ww_status ww_alpha(const char* chamber, int k, double* out);
ww_status ww_kappa(const char* chamber, int k, double* out);
ww_status ww_k_constant(const char* chamber, int k, double* out);

/* Brownian survival-tail asymptotic kappa * h(y) * t^(-alpha/2). */
ww_status ww_bm_tail(const char* chamber, int k, const double* y, double t, double* out);

/* Precomputed staying-in-the-chamber function V on the integer lattice.
 * dist_json describes the step law (as produced by the toolkit, e.g.
 * {"kind":"discrete-atoms","k":2,"atoms":[[1,1,1,2],[-1,1,1,2]]}). */
typedef struct ww_vtable ww_vtable;
ww_status ww_vtable_build(const char* dist_json, const char* chamber, long long radius,
                          long long horizon, ww_vtable** out);
ww_status ww_vtable_load_csv(const char* path, ww_vtable** out);
ww_status ww_vtable_save_csv(const ww_vtable* table, const char* path);
ww_status ww_vtable_value(const ww_vtable* table, const long long* x, int k, double* out);
void ww_vtable_free(ww_vtable* table);

/* Runs an experiment command ("constants", "tails", "transform", "limit")
 * with a JSON configuration; writes data files under the configured output
 * directory and hands back a JSON summary. */
ww_status ww_run_command(const char* command, const char* config_json, char** summary_json);

void ww_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* WEYLWALK_H */
