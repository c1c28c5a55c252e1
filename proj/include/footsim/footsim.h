/* Deformable foot-ground contact simulation: C interface.
 *
 * All functions return an fsim_status. On failure a message is available
 * from fsim_last_error() on the calling thread until its next call.
 * Strings returned by the library stay valid until the owning handle is
 * freed. Handles are not thread-safe; distinct handles may be used
 * concurrently.
 */
#ifndef FOOTSIM_FOOTSIM_H
#define FOOTSIM_FOOTSIM_H

#include <stddef.h>

#if defined(_WIN32)
#define FSIM_API __declspec(dllexport)
#else
#define FSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fsim_status {
  FSIM_OK = 0,
  FSIM_ERR_INVALID_ARGUMENT = 1,
  FSIM_ERR_PARSE = 2,
  FSIM_ERR_IO = 3,
  FSIM_ERR_CONFIG = 4,
  FSIM_ERR_NUMERICAL = 5,
  FSIM_ERR_INTERNAL = 6
} fsim_status;

typedef enum fsim_model { FSIM_MODEL_DEFORMABLE = 0, FSIM_MODEL_RIGID = 1 } fsim_model;
typedef enum fsim_side { FSIM_SIDE_RIGHT = 0, FSIM_SIDE_LEFT = 1 } fsim_side;

typedef struct fsim_config fsim_config;
typedef struct fsim_mesh fsim_mesh;

FSIM_API const char* fsim_version(void);
FSIM_API const char* fsim_last_error(void);
FSIM_API const char* fsim_status_name(fsim_status status);
/* Process exit code for a status: 0 ok, 3 numerical failure, 2 otherwise. */
FSIM_API int fsim_exit_code(fsim_status status);

/* Progress lines from long-running commands; NULL disables. */
typedef void (*fsim_log_fn)(const char* line, void* user);
FSIM_API void fsim_set_log(fsim_log_fn fn, void* user);

/* Interrupt flag polled by fsim_simulate; safe to set from a signal handler. */
FSIM_API void fsim_request_stop(void);
FSIM_API void fsim_clear_stop(void);

/* ---- configuration ---- */
FSIM_API const char* fsim_config_env(void); /* name of the default-config environment variable */
FSIM_API fsim_status fsim_config_new(fsim_config** out);
FSIM_API void fsim_config_free(fsim_config* cfg);
FSIM_API fsim_status fsim_config_load(fsim_config* cfg, const char* path);
FSIM_API fsim_status fsim_config_parse(fsim_config* cfg, const char* text, const char* source);
FSIM_API fsim_status fsim_config_set(fsim_config* cfg, const char* key, const char* value);
/* The returned string is owned by cfg and valid until the next call on it. */
FSIM_API fsim_status fsim_config_get(fsim_config* cfg, const char* key, const char** value);
FSIM_API fsim_status fsim_config_canonical(fsim_config* cfg, const char** text);
FSIM_API fsim_status fsim_config_hash(fsim_config* cfg, const char** hash);
FSIM_API fsim_status fsim_config_validate(const fsim_config* cfg);
FSIM_API size_t fsim_config_key_count(void);
FSIM_API const char* fsim_config_key(size_t index);

/* ---- meshes ---- */
FSIM_API fsim_status fsim_mesh_generate(const fsim_config* cfg, fsim_side side, fsim_mesh** out);
FSIM_API fsim_status fsim_mesh_load(const char* obj_path, const char* attr_path, fsim_mesh** out);
FSIM_API fsim_status fsim_mesh_save(const fsim_mesh* mesh, const char* obj_path, const char* attr_path);
FSIM_API fsim_status fsim_mesh_mirror(const fsim_mesh* mesh, fsim_mesh** out);
FSIM_API void fsim_mesh_free(fsim_mesh* mesh);
FSIM_API size_t fsim_mesh_vertex_count(const fsim_mesh* mesh);
FSIM_API size_t fsim_mesh_triangle_count(const fsim_mesh* mesh);
FSIM_API size_t fsim_mesh_edge_count(const fsim_mesh* mesh);
FSIM_API size_t fsim_mesh_pinned_count(const fsim_mesh* mesh);
FSIM_API fsim_side fsim_mesh_side(const fsim_mesh* mesh);
FSIM_API fsim_status fsim_mesh_vertex(const fsim_mesh* mesh, size_t index, double xyz[3]);
FSIM_API fsim_status fsim_mesh_radial_dir(const fsim_mesh* mesh, size_t index, double xyz[3]);
FSIM_API fsim_status fsim_mesh_bounds(const fsim_mesh* mesh, double lo[3], double hi[3]);

/* ---- solver primitives ---- */
FSIM_API fsim_status fsim_impedance(const fsim_config* cfg, double violation, double* out);
FSIM_API fsim_status fsim_reference_accel(const fsim_config* cfg, double violation, double violation_rate,
                                          double* out);

/* ---- pipeline commands ---- */
FSIM_API fsim_status fsim_gen_mesh(const fsim_config* cfg, const char* out_dir, size_t* vertices, size_t* triangles);

typedef struct fsim_retarget_info {
  size_t input_frames;
  size_t output_frames;
  double max_site_residual; /* m */
  int unconverged_frames;
} fsim_retarget_info;
FSIM_API fsim_status fsim_retarget(const fsim_config* cfg, const char* keypoints_path, const char* out_path,
                                   fsim_retarget_info* info);

typedef struct fsim_run_info {
  fsim_model model;
  long steps_planned;
  long steps_completed;
  int truncated;
  long failed_step; /* -1 unless the run aborted */
  double wall_seconds;
} fsim_run_info;
/* Writes out_dir/<model>/ for every requested model. mesh_dir may be NULL.
 * time_limit <= 0 disables the per-run wall-clock limit. Returns
 * FSIM_ERR_NUMERICAL when any run aborted; its logs are still written. */
FSIM_API fsim_status fsim_simulate(const fsim_config* cfg, const char* trajectory_path, const char* out_dir,
                                   const fsim_model* models, size_t model_count, const char* mesh_dir,
                                   double time_limit, fsim_run_info* infos);

typedef struct fsim_report_summary {
  double peak_grf;         /* N */
  double contact_points;   /* mean distinct points per stance, both feet */
  int contact_points_max;
  double speed_cv;
  double accel_cv;
  double kinetic_mean;     /* J */
  double potential_mean;   /* J */
  double zmp_inside_fraction;
  int cycles;              /* right foot */
  int truncated;
} fsim_report_summary;
FSIM_API fsim_status fsim_analyze(const fsim_config* cfg, const char* log_dir, const char* out_dir, int svg,
                                  const char* mesh_dir, fsim_report_summary* summary);
FSIM_API fsim_status fsim_compare(const fsim_config* cfg, const char* deformable_dir, const char* rigid_dir,
                                  const char* out_dir, int svg, const char* mesh_dir, fsim_report_summary* deformable,
                                  fsim_report_summary* rigid);

#ifdef __cplusplus
}
#endif

#endif
