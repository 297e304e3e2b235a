#ifndef HELIXLAB_H
#define HELIXLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HlClass {
  HL_CLASS_HELIX = 0,
  HL_CLASS_PSEUDO_HELIX = 1,
  HL_CLASS_CHAOTIC = 2,
  HL_CLASS_UNCLASSIFIED = 3,
} HlClass;

typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_UTF8 = 2,
  HL_STATUS_INVALID_ARGUMENT = 3,
  HL_STATUS_PARSE = 4,
  /**
   * The computation stopped (pole, overflow, domain error).
   */
  HL_STATUS_EVAL = 5,
  HL_STATUS_NOT_FOUND = 6,
  HL_STATUS_BUFFER_TOO_SMALL = 7,
  HL_STATUS_PANIC = 8,
} HlStatus;

/**
 * A map or an L-system.
 */
typedef struct HlSystem HlSystem;

/**
 * A computed trajectory with its retained tail.
 */
typedef struct HlTrajectory HlTrajectory;

/**
 * Library version as a static NUL-terminated string.
 */
const char *hl_version(void);

/**
 * Copies the calling thread's last error message into `buf`.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes (or be null with `cap` 0);
 * `needed` may be null.
 */
enum HlStatus hl_last_error(char *buf, size_t cap, size_t *needed);

/**
 * Looks up a built-in map or L-system (`sine-drift`, `identity`,
 * `lfam-gamma-cos`, `lfam-gamma-sin`, ...).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum HlStatus hl_system_builtin(const char *name, struct HlSystem **out);

/**
 * Parses a map expression in `x` and named parameters.
 *
 * # Safety
 * `expr` must be a NUL-terminated string; `out` must be writable.
 */
enum HlStatus hl_system_parse_map(const char *expr, struct HlSystem **out);

/**
 * Parses an L-system definition (axiom, rules, one map per letter).
 *
 * # Safety
 * `def` must be a NUL-terminated string; `out` must be writable.
 */
enum HlStatus hl_system_parse_lsystem(const char *def, struct HlSystem **out);

/**
 * # Safety
 * `sys` must come from an `hl_system_*` constructor, or be null.
 */
void hl_system_free(struct HlSystem *sys);

/**
 * Computes terms 1..=n (maps) or 0..=n (L-systems) from start value `a`,
 * keeping the last `tail` terms. A run that stops early still returns a
 * trajectory; check [`hl_trajectory_failure`].
 *
 * # Safety
 * `sys` must be a live handle; `a` and `params` NUL-terminated (`params`
 * may be null); `out` writable.
 */
enum HlStatus hl_run(const struct HlSystem *sys,
                     const char *a,
                     const char *params_text,
                     uint64_t n,
                     uint32_t digits,
                     uint64_t tail,
                     struct HlTrajectory **out);

/**
 * # Safety
 * `traj` must come from [`hl_run`], or be null.
 */
void hl_trajectory_free(struct HlTrajectory *traj);

/**
 * Index of the last computed term.
 *
 * # Safety
 * `traj` must be a live handle; `index` writable.
 */
enum HlStatus hl_trajectory_last_index(const struct HlTrajectory *traj, uint64_t *index);

/**
 * `HL_STATUS_OK` if the run completed; otherwise `HL_STATUS_EVAL` with the
 * index of the term that could not be computed.
 *
 * # Safety
 * `traj` must be a live handle; `index` may be null.
 */
enum HlStatus hl_trajectory_failure(const struct HlTrajectory *traj, uint64_t *index);

/**
 * Decimal string of term `index`, if it was retained.
 *
 * # Safety
 * `traj` must be a live handle; `buf` must hold `cap` bytes; `needed` may be null.
 */
enum HlStatus hl_trajectory_value(const struct HlTrajectory *traj,
                                  uint64_t index,
                                  char *buf,
                                  size_t cap,
                                  size_t *needed);

/**
 * Smallest period j ≤ j_max with a constant per-period increment c over the
 * retained tail past `transient`. `HL_STATUS_NOT_FOUND` when none exists.
 *
 * # Safety
 * `traj` must be a live handle; `j` writable; `c_buf` holds `cap` bytes;
 * `needed` may be null.
 */
enum HlStatus hl_detect_helix(const struct HlTrajectory *traj,
                              size_t j_max,
                              double tol,
                              uint64_t transient,
                              size_t *j,
                              char *c_buf,
                              size_t cap,
                              size_t *needed);

/**
 * Whether `seq` (comma-separated decimals) is a helix of period `j`
 * modulo `r`.
 *
 * # Safety
 * `seq` and `r` must be NUL-terminated; `result` writable.
 */
enum HlStatus hl_verify_helix(const char *seq,
                              size_t j,
                              const char *r,
                              uint32_t digits,
                              bool *result);

/**
 * Classifies the map at parameter `b` with the default configuration.
 * `period` is set for helix and pseudo-helix classes, 0 otherwise.
 *
 * # Safety
 * `sys` must be a live map handle; `b` NUL-terminated; outputs writable.
 */
enum HlStatus hl_classify(const struct HlSystem *sys,
                          const char *b,
                          enum HlClass *class_,
                          size_t *period);

/**
 * Letter n of the Thue-Morse word, counting from 1, as 'A' or 'B';
 * 0 for n = 0.
 */
char hl_tm_letter(uint64_t n);

#endif  /* HELIXLAB_H */
