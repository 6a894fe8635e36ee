#ifndef RELCON_H
#define RELCON_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. `RELCON_FALSE` is a valid negative answer, not an error.
 */
typedef enum RelconStatus {
  RELCON_OK = 0,
  RELCON_FALSE = 1,
  RELCON_INVALID = 2,
  RELCON_BUDGET = 3,
  RELCON_NULL_POINTER = 4,
  RELCON_INVALID_UTF8 = 5,
  RELCON_NOT_FOUND = 6,
  RELCON_OUT_OF_BOUNDS = 7,
  RELCON_PANIC = 8,
} RelconStatus;

/**
 * A relation owned by the caller.
 */
typedef struct RelconRelation RelconRelation;

/**
 * Parsed declarations: domains, relations, functions, constraints, schemes.
 */
typedef struct RelconWorkspace RelconWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next `relcon_*` call on the same thread.
 */
const char *relcon_last_error(void);

/**
 * Library version as a static string.
 */
const char *relcon_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void relcon_string_free(char *s);

/**
 * Parses workspace text into a new handle stored in `*out`.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` writable.
 */
enum RelconStatus relcon_workspace_parse(const char *source, struct RelconWorkspace **out);

/**
 * Adds the declarations in `source` to an existing workspace.
 *
 * # Safety
 * `ws` must be a live handle and `source` a NUL-terminated string.
 */
enum RelconStatus relcon_workspace_extend(struct RelconWorkspace *ws, const char *source);

/**
 * # Safety
 * `ws` must be NULL or a handle from [`relcon_workspace_parse`] not yet freed.
 */
void relcon_workspace_free(struct RelconWorkspace *ws);

/**
 * Canonical text of the workspace; free with [`relcon_string_free`].
 *
 * # Safety
 * `ws` must be a live handle and `out` writable.
 */
enum RelconStatus relcon_workspace_serialize(const struct RelconWorkspace *ws, char **out);

/**
 * Copies the named relation into a new handle.
 *
 * # Safety
 * `ws` must be a live handle, `name` NUL-terminated and `out` writable.
 */
enum RelconStatus relcon_workspace_relation(const struct RelconWorkspace *ws,
                                            const char *name,
                                            struct RelconRelation **out);

/**
 * `RELCON_OK` if `f` maps every matrix with columns in `antecedent` to a
 * tuple of `consequent`, `RELCON_FALSE` if not.
 *
 * # Safety
 * `ws` must be a live handle and the names NUL-terminated strings.
 */
enum RelconStatus relcon_satisfies(const struct RelconWorkspace *ws,
                                   const char *function,
                                   const char *antecedent,
                                   const char *consequent);

/**
 * # Safety
 * `ws` must be a live handle and the names NUL-terminated strings.
 */
enum RelconStatus relcon_preserves(const struct RelconWorkspace *ws,
                                   const char *function,
                                   const char *relation);

/**
 * Image of a relation under a function, as a new handle.
 *
 * # Safety
 * `ws` must be a live handle, the names NUL-terminated and `out` writable.
 */
enum RelconStatus relcon_image(const struct RelconWorkspace *ws,
                               const char *function,
                               const char *relation,
                               struct RelconRelation **out);

/**
 * Tight minor of the relations `names[0..count]` via the named scheme.
 *
 * # Safety
 * `ws` must be a live handle, `scheme` NUL-terminated, `names` an array of
 * `count` NUL-terminated strings and `out` writable.
 */
enum RelconStatus relcon_tight_minor(const struct RelconWorkspace *ws,
                                     const char *scheme,
                                     const char *const *names,
                                     size_t count,
                                     struct RelconRelation **out);

/**
 * # Safety
 * `r` must be NULL or a relation handle not yet freed.
 */
void relcon_relation_free(struct RelconRelation *r);

/**
 * Arity, or 0 for NULL.
 *
 * # Safety
 * `r` must be NULL or a live relation handle.
 */
size_t relcon_relation_arity(const struct RelconRelation *r);

/**
 * Number of tuples, or 0 for NULL.
 *
 * # Safety
 * `r` must be NULL or a live relation handle.
 */
size_t relcon_relation_len(const struct RelconRelation *r);

/**
 * Size of the underlying domain, or 0 for NULL.
 *
 * # Safety
 * `r` must be NULL or a live relation handle.
 */
size_t relcon_relation_domain_size(const struct RelconRelation *r);

/**
 * Writes the `index`-th tuple in lexicographic order to `buf`, which must
 * hold at least `arity` elements.
 *
 * # Safety
 * `r` must be a live relation handle and `buf` writable for `capacity`
 * elements.
 */
enum RelconStatus relcon_relation_tuple(const struct RelconRelation *r,
                                        size_t index,
                                        size_t *buf,
                                        size_t capacity);

/**
 * Runs the command-line interface on `argv[0..argc]` (including the program
 * name) and returns its exit code. Captured output is stored in `*out` and
 * `*err` when those are non-NULL; free them with [`relcon_string_free`].
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings; `out` and `err` must be
 * NULL or writable.
 */
int relcon_run(int argc, const char *const *argv, char **out, char **err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELCON_H */
