#ifndef CLSCHED_H
#define CLSCHED_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum ClschedStatus {
  CLSCHED_STATUS_OK = 0,
  // A required pointer argument was null.
  CLSCHED_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  CLSCHED_STATUS_INVALID_UTF8 = 2,
  // A descriptor or coloring text was rejected.
  CLSCHED_STATUS_PARSE_ERROR = 3,
  // A numeric argument was out of range.
  CLSCHED_STATUS_INVALID_ARGUMENT = 4,
  // No coloring was found within the limits.
  CLSCHED_STATUS_SEARCH_FAILED = 5,
  // A panic was caught at the boundary.
  CLSCHED_STATUS_INTERNAL = 6,
} ClschedStatus;

// Family of generated network for [`clsched_network_generate`].
typedef enum ClschedFamily {
  // Single-layer `(a, b)` folded chain.
  CLSCHED_FAMILY_FOLDED_SINGLE = 0,
  // Two-layer `(a, b)` folded chain.
  CLSCHED_FAMILY_FOLDED_TWO_LAYER = 1,
  // `a`-nested folded chain; `b` is ignored.
  CLSCHED_FAMILY_NESTED = 2,
} ClschedFamily;

// Coloring strategy for [`clsched_color`].
typedef enum ClschedStrategy {
  CLSCHED_STRATEGY_MCL = 0,
  CLSCHED_STRATEGY_MIL = 1,
  CLSCHED_STRATEGY_END_TO_END = 2,
  CLSCHED_STRATEGY_TDMA = 3,
  CLSCHED_STRATEGY_CONSTRUCTIVE = 4,
} ClschedStrategy;

// A coloring of the route-expanded graph of one network.
typedef struct ClschedColoring ClschedColoring;

// A layered network together with its route-expanded graph.
typedef struct ClschedNetwork ClschedNetwork;

// Outcome of [`clsched_verify`].
typedef struct ClschedVerification {
  // The coloring satisfies every Coded Layer condition.
  bool checker_valid;
  // Number of condition violations found by the checker.
  size_t violations;
  // Symbolic cancellation holds in the linear deterministic model.
  bool deterministic_ok;
  // Symbolic cancellation holds in the Gaussian model.
  bool gaussian_ok;
} ClschedVerification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or an empty string.
// The pointer stays valid until the next clsched call on this thread.
const char *clsched_last_error(void);

// Parses a network descriptor.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum ClschedStatus clsched_network_parse(const char *text, struct ClschedNetwork **out);

// Generates a network of `family` with parameters `a` and `b`.
//
// # Safety
// `out` must be a valid pointer.
enum ClschedStatus clsched_network_generate(enum ClschedFamily family,
                                            uint32_t a,
                                            uint32_t b,
                                            struct ClschedNetwork **out);

// Releases a network. Null is ignored.
//
// # Safety
// `net` must come from this library and not be used afterwards.
void clsched_network_free(struct ClschedNetwork *net);

// Number of source-destination pairs, or 0 for a null handle.
//
// # Safety
// `net` must be null or a live network handle.
size_t clsched_network_num_pairs(const struct ClschedNetwork *net);

// Writes the descriptor text of `net` to `*out`.
//
// # Safety
// `net` must be a live network handle and `out` a valid pointer.
enum ClschedStatus clsched_network_descriptor(const struct ClschedNetwork *net, char **out);

// Upper bound on the normalized sum-capacity as the fraction `num / den`.
//
// # Safety
// `net` must be a live network handle; `num` and `den` valid pointers.
enum ClschedStatus clsched_upper_bound(const struct ClschedNetwork *net,
                                       uint64_t *num,
                                       uint64_t *den);

// Computes a coloring of `net`. `max_colors` of 0 means the number of
// pairs; `budget` limits the Coded Layer search.
//
// # Safety
// `net` must be a live network handle and `out` a valid pointer.
enum ClschedStatus clsched_color(const struct ClschedNetwork *net,
                                 enum ClschedStrategy strategy,
                                 size_t max_colors,
                                 uint64_t budget,
                                 struct ClschedColoring **out);

// Parses a coloring file for `net`.
//
// # Safety
// `net` must be a live network handle, `text` a NUL-terminated string and
// `out` a valid pointer.
enum ClschedStatus clsched_coloring_parse(const struct ClschedNetwork *net,
                                          const char *text,
                                          struct ClschedColoring **out);

// Writes the coloring file text of `coloring` to `*out`.
//
// # Safety
// Both handles must be live, `coloring` must belong to `net`, and `out`
// must be a valid pointer.
enum ClschedStatus clsched_coloring_text(const struct ClschedNetwork *net,
                                         const struct ClschedColoring *coloring,
                                         char **out);

// Number of colors of `coloring`, or 0 for a null handle.
//
// # Safety
// `coloring` must be null or a live coloring handle.
size_t clsched_coloring_num_colors(const struct ClschedColoring *coloring);

// Releases a coloring. Null is ignored.
//
// # Safety
// `coloring` must come from this library and not be used afterwards.
void clsched_coloring_free(struct ClschedColoring *coloring);

// Runs the condition checker and the symbolic verifier in both channel
// models.
//
// # Safety
// Both handles must be live and `out` a valid pointer.
enum ClschedStatus clsched_verify(const struct ClschedNetwork *net,
                                  const struct ClschedColoring *coloring,
                                  struct ClschedVerification *out);

// Runs `trials` seeded random-gain simulations with `q`-bit signals and
// stores how many matched the isolated runs bit for bit.
//
// # Safety
// Both handles must be live and `passed` a valid pointer.
enum ClschedStatus clsched_simulate(const struct ClschedNetwork *net,
                                    const struct ClschedColoring *coloring,
                                    uint32_t q,
                                    size_t trials,
                                    uint64_t seed,
                                    size_t *passed);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void clsched_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLSCHED_H */
