#ifndef PATHCHECK_H
#define PATHCHECK_H

/* Generated by cbindgen from pathcheck-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by the checking entry points. Non-negative values
 * are verdicts.
 */
typedef enum PcStatus {
  /**
   * The word satisfies the formula.
   */
  PC_SAT = 1,
  /**
   * The word does not satisfy the formula.
   */
  PC_UNSAT = 0,
  /**
   * A parse error; see `pc_last_error`.
   */
  PC_ERR_PARSE = -1,
  /**
   * A null pointer or invalid handle was passed.
   */
  PC_ERR_ARGUMENT = -2,
  /**
   * The selected engine cannot handle the input.
   */
  PC_ERR_UNSUPPORTED = -3,
  /**
   * The engine panicked on out-of-range inputs.
   */
  PC_ERR_INTERNAL = -4,
} PcStatus;

/**
 * Engine selector mirroring the library's `--engine` flag.
 */
typedef enum PcEngine {
  PC_ENGINE_AUTO = 0,
  PC_ENGINE_NAIVE = 1,
  PC_ENGINE_FINITE = 2,
  PC_ENGINE_PERIODIC = 3,
  PC_ENGINE_SLP = 4,
  PC_ENGINE_TPTL1 = 5,
  PC_ENGINE_QUASIMONO = 6,
} PcEngine;

/**
 * An opaque parsed formula.
 */
typedef struct PcFormula PcFormula;

/**
 * An opaque one-counter machine.
 */
typedef struct PcOcm PcOcm;

/**
 * An opaque data word in any supported representation.
 */
typedef struct PcWord PcWord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the error message of the last failing call on this thread, or
 * null. The string is owned by the library and valid until the next
 * failing call.
 */
const char *pc_last_error(void);

/**
 * Parses a word in the `word finite`, `word periodic` or `slp` text
 * format. Returns null on failure.
 */
struct PcWord *pc_word_parse(const char *text);

/**
 * Frees a word handle. Null is ignored.
 *
 * # Safety
 * `word` must have been returned by this library and not freed before.
 */
void pc_word_free(struct PcWord *word);

/**
 * Parses a formula in the ASCII grammar. Returns null on failure.
 */
struct PcFormula *pc_formula_parse(const char *text);

/**
 * Frees a formula handle. Null is ignored.
 *
 * # Safety
 * `formula` must have been returned by this library and not freed before.
 */
void pc_formula_free(struct PcFormula *formula);

/**
 * Parses a machine in the `ocm unary|binary` text format. Returns null on
 * failure.
 */
struct PcOcm *pc_ocm_parse(const char *text);

/**
 * Frees a machine handle. Null is ignored.
 *
 * # Safety
 * `ocm` must have been returned by this library and not freed before.
 */
void pc_ocm_free(struct PcOcm *ocm);

/**
 * Checks a word against a formula with the selected engine. Returns 1
 * when satisfied, 0 when not, and a negative status code on failure.
 *
 * # Safety
 * `word` and `formula` must be live handles from this library.
 */
int pc_check(const struct PcWord *word, const struct PcFormula *formula, int engine);

/**
 * Extracts the machine's computation and checks it against the formula.
 * Returns 1/0 verdicts and negative status codes as in [`pc_check`].
 *
 * # Safety
 * `ocm` and `formula` must be live handles from this library.
 */
int pc_ocm_check(const struct PcOcm *ocm, const struct PcFormula *formula);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PATHCHECK_H */
