#ifndef PERCO_C_H
#define PERCO_C_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Flat C interface over the percolation-window library.  All functions
 * return a status code; results come back through out-parameters.  On
 * failure a thread-local message is set, readable via perco_last_error. */

#define PERCO_OK 0
#define PERCO_ERR_INTERNAL 1
#define PERCO_ERR_INVALID 2
#define PERCO_ERR_BUDGET 3
#define PERCO_ERR_IO 4

typedef struct perco_window perco_window;

int32_t perco_abi_version(void);
const char* perco_version(void);

/* empty string when no error is pending */
const char* perco_last_error(void);
void perco_clear_error(void);

/* family: "tree" | "grandparent" | "unit-tree" */
int32_t perco_window_create(const char* family, uint32_t q, uint32_t height,
                            uint32_t collar, perco_window** out);
void perco_window_destroy(perco_window* win);

int32_t perco_window_counts(const perco_window* win, uint64_t* n_vertices,
                            uint64_t* n_edges);
/* descriptor as a JSON string; free with perco_free */
int32_t perco_window_info_json(const perco_window* win, char** out);

int32_t perco_vertex_depth(const perco_window* win, uint64_t v, uint32_t* out);
/* log_q of the weight cocycle between two vertices */
int32_t perco_cocycle_exponent(const perco_window* win, uint64_t x, uint64_t y,
                               int64_t* out);
/* reduced orbit-count ratio |Gamma_y x| / |Gamma_x y| */
int32_t perco_orbit_count_ratio(const perco_window* win, uint64_t x, uint64_t y,
                                uint64_t* num, uint64_t* den);

/* coupling label of one edge under the given seed */
int32_t perco_edge_label(const perco_window* win, uint64_t seed,
                         uint64_t edge_id, double* out);
/* number of open clusters at level p */
int32_t perco_cluster_count(const perco_window* win, uint64_t seed, double p,
                            uint64_t* out);

/* run a full experiment described by a config JSON document; the result
 * (manifest plus printable report) comes back as JSON in *out, to be
 * released with perco_free */
int32_t perco_run_json(const char* config_json, char** out);

void perco_free(void* ptr);

#ifdef __cplusplus
}
#endif

#endif /* PERCO_C_H */
