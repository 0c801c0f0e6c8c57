#ifndef HYPERTORIC_H
#define HYPERTORIC_H

#include <stddef.h>
#include <stdint.h>

#if defined(HYPERTORIC_BUILD)
#define HT_API __attribute__((visibility("default")))
#else
#define HT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ht_status {
  HT_OK = 0,
  HT_ERR_SCHEMA = 1,       /* malformed input; message has a line or field */
  HT_ERR_DOMAIN = 2,       /* outside the domain of the operation */
  HT_ERR_SINGULARITY = 3,  /* point on a flat or a branch locus */
  HT_ERR_ORDERING = 4,     /* operation needs a certified configuration */
  HT_ERR_CONVERGENCE = 5,  /* solver or tail bound did not converge */
  HT_ERR_ARGUMENT = 6,
  HT_ERR_INTERNAL = 7
} ht_status;

/* Immutable flat configuration. */
typedef struct ht_config ht_config;

typedef struct ht_options {
  size_t window;        /* flats per family */
  size_t truncation;    /* initial potential window */
  double tol;           /* incidence tolerance */
  double identity_tol;  /* finite-difference residual budget */
  double h;             /* finite-difference step */
  double box;           /* chamber box half-width, or sample reach; <= 0 means automatic */
  uint64_t seed;
  size_t samples;       /* random points for identities when no points are given */
} ht_options;

HT_API void ht_options_default(ht_options* options);

/* Message for the last failing call on this thread; never NULL. */
HT_API const char* ht_last_error(void);
HT_API const char* ht_status_name(ht_status status);

HT_API ht_status ht_config_parse(const char* json, ht_config** out);
HT_API ht_status ht_config_load(const char* path, ht_config** out);
HT_API ht_status ht_config_builtin_goto(size_t n, size_t prefix_depth, ht_config** out);
HT_API ht_status ht_config_serialize(const ht_config* config, char** out);
HT_API size_t ht_config_rank(const ht_config* config);
/* 1 when both configurations are structurally equal. */
HT_API int ht_config_equal(const ht_config* a, const ht_config* b);
HT_API void ht_config_free(ht_config* config);

/* Reports are JSON strings owned by the caller (free with ht_string_free).
   `pass` (nullable) receives 1 on PASS and 0 on FAIL. */
HT_API ht_status ht_validate(const ht_config* config, const ht_options* options, char** report, int* pass);
HT_API ht_status ht_topology(const ht_config* config, const ht_options* options, char** report);
/* Plain-text plot rows from a topology report. */
HT_API ht_status ht_topology_plot(const char* report, char** text);
/* points_csv: a_1..a_n, Re b_1, Im b_1, ..., Re b_n, Im b_n per row.
   deformation_json (nullable): {"c": [[...]], "weights": [...]}. */
HT_API ht_status ht_eval(const ht_config* config, const char* points_csv, const char* deformation_json,
                         const ht_options* options, char** report, int* pass);
/* points_csv may be NULL: `samples` seeded random points are drawn instead. */
HT_API ht_status ht_identities(const ht_config* config, const char* points_csv, const char* deformation_json,
                               const ht_options* options, char** report, int* pass);
HT_API ht_status ht_solve_moment(const char* problem_json, const ht_options* options, char** report);
HT_API ht_status ht_periodic(const char* families_json, const char* points_csv, const ht_options* options,
                             char** report, int* pass);

HT_API void ht_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif
