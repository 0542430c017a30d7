#ifndef GEIRINGER_H
#define GEIRINGER_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Orbit cap used by the command-line tool.
 */
#define GEIRINGER_DEFAULT_CAP 200000

typedef enum GeiringerStatus {
  GEIRINGER_STATUS_OK = 0,
  GEIRINGER_STATUS_NULL_POINTER = 1,
  GEIRINGER_STATUS_INVALID_UTF8 = 2,
  GEIRINGER_STATUS_PARSE = 3,
  GEIRINGER_STATUS_INVALID_ARGUMENT = 4,
  GEIRINGER_STATUS_CAP_EXCEEDED = 5,
  GEIRINGER_STATUS_INTERNAL = 6,
} GeiringerStatus;

/**
 * Opaque population handle.
 */
typedef struct GeiringerPopulation GeiringerPopulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *geiringer_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void geiringer_string_free(char *s);

/**
 * Parses population text.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum GeiringerStatus geiringer_population_parse(const char *text, struct GeiringerPopulation **out);

/**
 * # Safety
 * `pop` must be null or a handle from this library, not yet freed.
 */
void geiringer_population_free(struct GeiringerPopulation *pop);

/**
 * Number of rollouts.
 *
 * # Safety
 * `pop` must be a live handle; `out` must be writable.
 */
enum GeiringerStatus geiringer_population_size(const struct GeiringerPopulation *pop, size_t *out);

/**
 * Population in the text format accepted by the parser.
 *
 * # Safety
 * `pop` must be a live handle; `out` must be writable.
 */
enum GeiringerStatus geiringer_population_to_string(const struct GeiringerPopulation *pop,
                                                    char **out);

/**
 * Downward sets and order counts as JSON.
 *
 * # Safety
 * `pop` must be a live handle; `out` must be writable.
 */
enum GeiringerStatus geiringer_stats_json(const struct GeiringerPopulation *pop, char **out);

/**
 * Applies a comma-separated operator sequence, writing a new handle.
 *
 * # Safety
 * `pop` must be a live handle, `ops` a nul-terminated string, `out` writable.
 */
enum GeiringerStatus geiringer_apply_ops(const struct GeiringerPopulation *pop,
                                         const char *ops,
                                         struct GeiringerPopulation **out);

/**
 * Inflation by factor `m`, writing a new handle.
 *
 * # Safety
 * `pop` must be a live handle; `out` must be writable.
 */
enum GeiringerStatus geiringer_inflate(const struct GeiringerPopulation *pop,
                                       uint32_t m,
                                       struct GeiringerPopulation **out);

/**
 * Closed-form schema frequency as a reduced fraction string such as "1/35".
 *
 * # Safety
 * `pop` must be a live handle, `schema` a nul-terminated string, `out` writable.
 */
enum GeiringerStatus geiringer_predict(const struct GeiringerPopulation *pop,
                                       const char *schema,
                                       char **out);

/**
 * Exact limiting frequency from the orbit, as a fraction string. With
 * `shapes` set the letter-quotient orbit is used. Returns
 * `CapExceeded` when the orbit has more than `cap` members.
 *
 * # Safety
 * `pop` must be a live handle, `schema` a nul-terminated string, `out` writable.
 */
enum GeiringerStatus geiringer_orbit_frequency(const struct GeiringerPopulation *pop,
                                               const char *schema,
                                               bool include_transpositions,
                                               bool shapes,
                                               size_t cap,
                                               char **out);

/**
 * Chain estimate of a schema frequency under the uniform mixing
 * distribution, averaged over `replicas` independent runs.
 *
 * # Safety
 * `pop` must be a live handle, `schema` a nul-terminated string, `out` writable.
 */
enum GeiringerStatus geiringer_mix(const struct GeiringerPopulation *pop,
                                   const char *schema,
                                   bool include_transpositions,
                                   size_t steps,
                                   uint64_t seed,
                                   size_t replicas,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEIRINGER_H */
