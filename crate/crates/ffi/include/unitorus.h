#ifndef UNITORUS_H
#define UNITORUS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UtStatus {
  UT_STATUS_OK = 0,
  UT_STATUS_NULL_POINTER = 1,
  UT_STATUS_INVALID_UTF8 = 2,
  UT_STATUS_PARSE_ERROR = 3,
  UT_STATUS_INVARIANT_VIOLATION = 4,
  UT_STATUS_NOT_UNIPOTENT = 5,
  UT_STATUS_BAD_ARGUMENT = 6,
  UT_STATUS_PANIC = 7,
  UT_STATUS_INTERNAL = 8,
} UtStatus;

// Opaque group handle.
typedef struct UtGroup UtGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a version 1 group file from a NUL-terminated UTF-8 string.
//
// # Safety
// `json` must be a valid C string; `out` must be writable.
enum UtStatus ut_group_from_json(const char *json, struct UtGroup **out);

// The `U(n, ℤ)` gallery group on the square-curve torus of dimension `n`.
//
// # Safety
// `out` must be writable.
enum UtStatus ut_gallery_u_n(size_t n, struct UtGroup **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `g` must come from this library and not be used afterwards.
void ut_group_free(struct UtGroup *g);

// Complex dimension of the torus.
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum UtStatus ut_group_dimension(const struct UtGroup *g, size_t *out);

// # Safety
// `g` must be a live handle; `out` must be writable.
enum UtStatus ut_group_generator_count(const struct UtGroup *g, size_t *out);

// # Safety
// `g` must be a live handle; `out` must be writable.
enum UtStatus ut_group_nilpotency_class(const struct UtGroup *g, size_t *out);

// # Safety
// `g` must be a live handle; `out` must be writable.
enum UtStatus ut_group_derived_length(const struct UtGroup *g, size_t *out);

// Growth exponent of generator `generator` on `H^{p,q}`.
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum UtStatus ut_growth_exponent(const struct UtGroup *g,
                                 size_t generator,
                                 size_t p,
                                 size_t q,
                                 size_t *out);

// The analyze-group report as JSON. Free the result with [`ut_string_free`].
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum UtStatus ut_analyze_json(const struct UtGroup *g, char **out);

// Canonical group-file text. Free the result with [`ut_string_free`].
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum UtStatus ut_group_to_json(const struct UtGroup *g, char **out);

// # Safety
// `s` must come from this library, or be null.
void ut_string_free(char *s);

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call into the library from the same thread.
const char *ut_last_error_message(void);

const char *ut_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNITORUS_H */
