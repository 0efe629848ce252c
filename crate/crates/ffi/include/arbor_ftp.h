#ifndef ARBOR_FTP_H
#define ARBOR_FTP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum ArborStatus {
  ARBOR_STATUS_OK = 0,
  ARBOR_STATUS_NULL_POINTER = 1,
  ARBOR_STATUS_INVALID_UTF8 = 2,
  ARBOR_STATUS_PARSE_ERROR = 3,
  ARBOR_STATUS_INFEASIBLE = 4,
  ARBOR_STATUS_UNKNOWN_EDGE = 5,
  ARBOR_STATUS_CERTIFICATION_FAILED = 6,
  ARBOR_STATUS_PANIC = 7,
} ArborStatus;

/**
 * A parsed directed graph.
 */
typedef struct ArborGraph ArborGraph;

/**
 * A fault-tolerant subgraph tied to the graph it was built or loaded from.
 */
typedef struct ArborSubgraph ArborSubgraph;

/**
 * Answer to one fault query. Costs are fixed-point with six fractional
 * digits (`1.5` is `1500000`).
 */
typedef struct ArborQueryResult {
  /**
   * The failed edge lies on the base tree.
   */
  bool tree_edge;
  bool interim_feasible;
  int64_t interim_cost;
  /**
   * The exact fields are filled only for certified queries.
   */
  bool certified;
  bool exact_feasible;
  int64_t exact_cost;
} ArborQueryResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *arbor_last_error(void);

/**
 * Parses an edge list (`n m root` header, then `tail head cost` lines).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ArborStatus arbor_graph_parse(const char *text, struct ArborGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from [`arbor_graph_parse`] not yet freed.
 */
void arbor_graph_free(struct ArborGraph *g);

/**
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t arbor_graph_vertex_count(const struct ArborGraph *g);

/**
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t arbor_graph_edge_count(const struct ArborGraph *g);

/**
 * Builds the subgraph of `g`, on seeded perturbed costs when `perturb`.
 *
 * # Safety
 * `g` must be a live graph handle and `out` a writable pointer.
 */
enum ArborStatus arbor_subgraph_build(const struct ArborGraph *g,
                                      bool perturb,
                                      uint64_t seed,
                                      struct ArborSubgraph **out);

/**
 * Loads a subgraph file previously written for `g`.
 *
 * # Safety
 * `g` must be a live graph handle, `text` a NUL-terminated string and `out`
 * a writable pointer.
 */
enum ArborStatus arbor_subgraph_load(const struct ArborGraph *g,
                                     const char *text,
                                     struct ArborSubgraph **out);

/**
 * # Safety
 * `h` must be null or a subgraph handle not yet freed.
 */
void arbor_subgraph_free(struct ArborSubgraph *h);

/**
 * # Safety
 * `h` must be null or a live subgraph handle.
 */
size_t arbor_subgraph_edge_count(const struct ArborSubgraph *h);

/**
 * Writes the subgraph as an edge list; free the result with
 * [`arbor_string_free`].
 *
 * # Safety
 * `g` and `h` must be live handles with `h` belonging to `g`; `out` must be
 * a writable pointer.
 */
enum ArborStatus arbor_subgraph_serialize(const struct ArborGraph *g,
                                          const struct ArborSubgraph *h,
                                          char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void arbor_string_free(char *s);

/**
 * Min-cost arborescence of `H - fault`; with `certify`, also of `G - fault`
 * and a check that the two costs lie within a factor of two.
 *
 * # Safety
 * `g` and `h` must be live handles with `h` belonging to `g`; `out` must be
 * a writable pointer.
 */
enum ArborStatus arbor_query_fault(const struct ArborGraph *g,
                                   const struct ArborSubgraph *h,
                                   size_t fault,
                                   bool certify_result,
                                   struct ArborQueryResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARBOR_FTP_H */
