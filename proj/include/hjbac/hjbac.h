/* hjbac - neural actor-critic solver for stationary HJB equations.
 *
 * C API of the shared library. All objects are opaque handles created and
 * destroyed here; functions return hjbac_status, with a thread-local
 * human-readable message available via hjbac_last_error(). Heavy operations
 * (training, Monte Carlo verification, studies) take a JSON option string
 * and write their CSV/JSON outputs into a caller-chosen directory.
 */
#ifndef HJBAC_H
#define HJBAC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HJBAC_API __declspec(dllexport)
#else
#define HJBAC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hjbac_status {
  HJBAC_OK = 0,
  HJBAC_ERR_INVALID_ARG = 1,   /* bad configuration or argument */
  HJBAC_ERR_UNKNOWN_NAME = 2,  /* unknown problem or study name */
  HJBAC_ERR_IO = 3,            /* file read/write failure */
  HJBAC_ERR_NUMERIC = 4,       /* non-finite evaluation */
  HJBAC_ERR_DIVERGED = 5,      /* training diverged (outputs still written) */
  HJBAC_ERR_INTERNAL = 6
} hjbac_status;

typedef struct hjbac_problem hjbac_problem;
typedef struct hjbac_net hjbac_net;

HJBAC_API const char* hjbac_version(void);

/* Message for the most recent failing call on this thread. */
HJBAC_API const char* hjbac_last_error(void);

/* Worker threads for batch evaluation; 0 restores the automatic choice
 * (HJBAC_THREADS env var, else hardware count). */
HJBAC_API void hjbac_set_threads(int threads);

/* ---- problem catalog ---------------------------------------------------- */

/* Newline-separated list of known problem names (static storage). */
HJBAC_API const char* hjbac_catalog(void);

/* dim <= 0 keeps the preset's own dimension. */
HJBAC_API hjbac_status hjbac_problem_create(const char* name, int dim, hjbac_problem** out);
HJBAC_API void hjbac_problem_destroy(hjbac_problem* p);

HJBAC_API int hjbac_problem_dim(const hjbac_problem* p);
HJBAC_API int hjbac_problem_action_dim(const hjbac_problem* p);
HJBAC_API int hjbac_problem_has_analytic(const hjbac_problem* p);

/* Analytic value function / optimal control where available. */
HJBAC_API hjbac_status hjbac_problem_value(const hjbac_problem* p, const double* x,
                                           double* out);
HJBAC_API hjbac_status hjbac_problem_control(const hjbac_problem* p, const double* x,
                                             double* out /* action_dim */);

/* ---- networks ------------------------------------------------------------ */

HJBAC_API hjbac_status hjbac_net_load(const char* path, hjbac_net** out);
HJBAC_API hjbac_status hjbac_net_save(const hjbac_net* net, const char* path);
HJBAC_API void hjbac_net_destroy(hjbac_net* net);

HJBAC_API int hjbac_net_width(const hjbac_net* net);
HJBAC_API int hjbac_net_input_dim(const hjbac_net* net);
HJBAC_API int hjbac_net_output_dim(const hjbac_net* net);

/* Raw network output (no clamping, no boundary structure). */
HJBAC_API hjbac_status hjbac_net_eval(const hjbac_net* net, const double* x, double* out);

/* Critic value Q(x) = Z(x) eta(x) + gbar(x) for a problem's geometry, where
 * net is the critic's inner network. */
HJBAC_API hjbac_status hjbac_critic_value(const hjbac_problem* p, const hjbac_net* net,
                                          const double* x, double* out);

/* ---- training ------------------------------------------------------------ */

typedef struct hjbac_train_summary {
  double final_mse_critic, final_re_critic;
  double final_mse_actor, final_re_actor;
  /* means over the last 10% of cycles */
  double window_mse_critic, window_re_critic;
  double window_mse_actor, window_re_actor;
  int cycles_run;
  int diverged;
} hjbac_train_summary;

/* Runs the alternating actor-critic loop. config_json holds flat TrainConfig
 * fields (missing fields keep their defaults). Writes metrics.csv,
 * manifest.json, actor.json and critic.json into out_dir. Returns
 * HJBAC_ERR_DIVERGED when divergence detection fired; the last healthy
 * checkpoints are still written. summary may be NULL. */
HJBAC_API hjbac_status hjbac_train(const hjbac_problem* p, const char* config_json,
                                   const char* out_dir, hjbac_train_summary* summary);

/* ---- Monte Carlo verification -------------------------------------------- */

/* Euler-Maruyama agreement report. config_json holds flat McConfig fields.
 * Writes agreement.csv, histogram_*.csv and manifest.json into out_dir and
 * fills e_out[3] = {E1, E2, E3}. */
HJBAC_API hjbac_status hjbac_verify_mc(const hjbac_problem* p, const hjbac_net* actor,
                                       const hjbac_net* critic, const char* config_json,
                                       const char* out_dir, double* e_out);

/* ---- studies -------------------------------------------------------------- */

/* name: "ntk-variance" | "param-drift" | "limit-ode" | "width-consistency".
 * config_json carries study-specific options; results land in out_dir. */
HJBAC_API hjbac_status hjbac_study(const char* name, const char* config_json,
                                   const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HJBAC_H */
