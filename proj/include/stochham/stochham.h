/* stochham — C API for the stochastic action-angle simulation library.
 *
 * Conventions
 *   - Every fallible function returns an sh_status; SH_OK (0) means success.
 *   - On failure, sh_last_error() returns a human-readable message describing
 *     the most recent failing call on the calling thread.
 *   - Objects are opaque handles created by sh_*_create-style functions and
 *     released by the matching sh_*_destroy. Destroy functions accept NULL.
 *   - Strings returned through char** parameters are heap-allocated and must
 *     be released with sh_string_free.
 *   - All functions are thread-safe as long as a given handle is used by one
 *     thread at a time.
 */
#ifndef STOCHHAM_H
#define STOCHHAM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SH_API __declspec(dllexport)
#else
#define SH_API __attribute__((visibility("default")))
#endif

/* Error taxonomy. Codes are stable and match the library's internal error
 * classes; the CLI maps them to process exit statuses (config problems ->
 * exit 2, runtime problems -> exit 3). */
typedef enum sh_status {
    SH_OK = 0,
    SH_ERR_INVALID_ARGUMENT = 1, /* null handle / malformed call            */
    SH_ERR_SPEC = 2,             /* configuration or validation failure     */
    SH_ERR_DOMAIN = 3,           /* state left the admissible domain        */
    SH_ERR_NUMERIC = 4,          /* quadrature / ODE / numeric failure      */
    SH_ERR_IO = 5                /* file system problem                     */
} sh_status;

/* Message from the most recent failing call on this thread ("" if none). The
 * pointer stays valid until the next failing call on the same thread. */
SH_API const char* sh_last_error(void);

/* Library name and version, e.g. "stochham 1.0.0". */
SH_API const char* sh_version(void);

/* Releases a string returned through a char** out-parameter. NULL is a no-op. */
SH_API void sh_string_free(char* s);

/* ------------------------------------------------------------------ RNG --
 * Counter-based generator (Philox4x32-10). A stream is addressed by the pair
 * (seed, stream id); distinct ids give statistically independent streams and
 * the draw sequence for a given pair is identical across platforms and runs.
 */
typedef struct sh_rng sh_rng;

SH_API sh_status sh_rng_create(unsigned long long seed, unsigned long long stream_id,
                               sh_rng** out);
SH_API sh_status sh_rng_uniform01(sh_rng* rng, double* out); /* strictly in (0,1) */
SH_API sh_status sh_rng_normal(sh_rng* rng, double* out);    /* standard normal   */
SH_API void sh_rng_destroy(sh_rng* rng);

/* -------------------------------------------------------------- systems --
 * Integrable base systems exposing the frequency map omega(I).
 */
typedef struct sh_system sh_system;

/* Pendulum linearized at its stable equilibrium: omega = sqrt(g/l), any d=1
 * action. gravity and length must be positive. */
SH_API sh_status sh_system_pendulum(double gravity, double length, sh_system** out);

/* Anharmonic oscillator x'' + x^(2m+1) = 0 through its action-angle chart
 * (d = 1, actions must stay positive). chart_tol controls the chart build
 * accuracy. cache_dir may be "" (always rebuild) or a directory used to
 * load/store the tabulated chart. */
SH_API sh_status sh_system_oscillator(long long m, double chart_tol,
                                      const char* cache_dir, sh_system** out);

/* Custom bounded frequency family
 *   omega_p(I) = base_p * (1 + amp * tanh((mean(I) - center) / width)).
 * base has dim components; width must be positive. */
SH_API sh_status sh_system_custom(size_t dim, const double* base, double amp,
                                  double center, double width, sh_system** out);

SH_API sh_status sh_system_dim(const sh_system* sys, size_t* out);

/* Evaluates omega at the given action (dim components in, dim out). Fails
 * with SH_ERR_DOMAIN when the action is outside the map's domain. */
SH_API sh_status sh_system_omega(const sh_system* sys, const double* action,
                                 double* omega_out);
SH_API void sh_system_destroy(sh_system* sys);

/* Reference period of the unit-amplitude orbit of x'' + x^(2m+1) = 0,
 * computed by adaptive quadrature of the closed-form period integral
 * (independent of the chart builder; useful as a cross-check). */
SH_API sh_status sh_oscillator_t_star(long long m, double* out);

/* ------------------------------------------------------------- commands --
 * Full command driver: loads and validates a config file, runs one of the
 * four commands, writes the documented artifacts, and reports the verdict.
 */
typedef struct sh_run_options {
    const char* out_dir;        /* overrides [output] dir; NULL = keep file's */
    int has_seed;               /* nonzero: use `seed` instead of the file's  */
    unsigned long long seed;
    int has_replicas;           /* nonzero: use `replicas`                    */
    long long replicas;
    int threads;                /* worker threads; <= 0 = hardware default    */
} sh_run_options;

/* command is one of "simulate", "verify-clt", "levy-check", "period-table".
 * opts may be NULL (no overrides). On success:
 *   - *pass_out is 1 when every gated criterion of the command passed, else 0
 *     (the run itself completed either way and the report was written);
 *   - *report_json_out (if non-NULL) receives the report/metadata JSON text;
 *   - *report_path_out (if non-NULL) receives the path it was written to.
 * Configuration problems return SH_ERR_SPEC before anything is written. */
SH_API sh_status sh_run_command(const char* command, const char* config_path,
                                const sh_run_options* opts, int* pass_out,
                                char** report_json_out, char** report_path_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STOCHHAM_H */
