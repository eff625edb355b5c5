#ifndef FERMI_FERMI_H
#define FERMI_FERMI_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define FERMI_API __declspec(dllexport)
#else
#define FERMI_API __attribute__((visibility("default")))
#endif

typedef enum {
  FERMI_OK = 0,
  FERMI_CHECK_FAILED = 1,
  FERMI_CONFIG_ERROR = 2,
  FERMI_GEOMETRY_ERROR = 3,
  FERMI_DIVERGENCE = 4,
  FERMI_INVALID_ARGUMENT = 5,
  FERMI_INTERNAL_ERROR = 6
} fermi_status;

typedef struct fermi_config fermi_config;
typedef struct fermi_dispersion fermi_dispersion;
typedef struct fermi_graph fermi_graph;
typedef struct fermi_result fermi_result;

typedef struct {
  int has_seed;
  uint64_t seed;
  int max_vertices;
} fermi_run_options;

/* Message of the last failed call on this thread. */
FERMI_API const char* fermi_last_error(void);
/* Process exit code for a status: 0 ok, 1 check failed, 2 config, 3 geometry, 4 divergence, 5 internal. */
FERMI_API int fermi_exit_code(fermi_status status);

FERMI_API fermi_status fermi_config_load(const char* path, fermi_config** out);
FERMI_API fermi_status fermi_config_parse(const char* text, const char* base_dir, fermi_config** out);
FERMI_API fermi_status fermi_config_set(fermi_config* config, const char* section, const char* key, const char* value);
FERMI_API void fermi_config_free(fermi_config* config);

FERMI_API fermi_status fermi_dispersion_create(const char* family, const double* params, size_t count,
                                               fermi_dispersion** out);
FERMI_API fermi_status fermi_dispersion_from_config(const fermi_config* config, fermi_dispersion** out);
FERMI_API void fermi_dispersion_free(fermi_dispersion* e);
/* jet = {value, d1, d2, d11, d12, d22}; entries above the requested order are zero. */
FERMI_API fermi_status fermi_dispersion_evaluate(const fermi_dispersion* e, double p1, double p2, int order,
                                                 double jet[6]);
FERMI_API fermi_status fermi_fermi_radius(const fermi_dispersion* e, double theta, double* radius);
FERMI_API fermi_status fermi_trace_surface(const fermi_dispersion* e, int m_theta, double* theta, double* radius);
/* margins = {half cell, gradient, C2 bound, curvature}. */
FERMI_API fermi_status fermi_check_class(const fermi_dispersion* e, double delta0, double g0, double G0,
                                         double omega0, int m_theta, int* verdict, double margins[4]);
FERMI_API fermi_status fermi_radial_constants(double delta0, double g0, double G0, double omega0, double* g1,
                                              double* r0, double* eps_max);

FERMI_API fermi_status fermi_graph_parse(const char* edge_list, fermi_graph** out);
FERMI_API void fermi_graph_free(fermi_graph* g);
FERMI_API fermi_status fermi_graph_is_one_pi(const fermi_graph* g, int* result);
FERMI_API fermi_status fermi_graph_spanning_tree_count(const fermi_graph* g, int64_t* count);
FERMI_API fermi_status fermi_graph_corpus_size(int max_vertices, int* size);

/* Runs a batch command; config may be NULL for graph-verify. */
FERMI_API fermi_status fermi_run(const char* command, const fermi_config* config, const fermi_run_options* options,
                                 fermi_result** out);
FERMI_API int fermi_result_exit_code(const fermi_result* r);
FERMI_API const char* fermi_result_message(const fermi_result* r);
FERMI_API size_t fermi_result_artifact_count(const fermi_result* r);
FERMI_API const char* fermi_result_artifact_name(const fermi_result* r, size_t i);
FERMI_API const char* fermi_result_artifact_content(const fermi_result* r, size_t i);
FERMI_API void fermi_result_free(fermi_result* r);

#ifdef __cplusplus
}
#endif

#endif
