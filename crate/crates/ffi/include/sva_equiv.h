#ifndef SVA_EQUIV_H
#define SVA_EQUIV_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum SvaBackend {
  SVA_BACKEND_ENUMERATE = 0,
  SVA_BACKEND_SMT = 1,
} SvaBackend;

typedef enum SvaProfile {
  SVA_PROFILE_LINT = 0,
  SVA_PROFILE_PEC = 1,
} SvaProfile;

typedef enum SvaReason {
  SVA_REASON_NONE = 0,
  SVA_REASON_LIVENESS = 1,
  SVA_REASON_MULTI_CLOCK = 2,
  SVA_REASON_UNBOUNDED_RANGE = 3,
  SVA_REASON_GOTO_REPEAT = 4,
  SVA_REASON_UNSUPPORTED_FN = 5,
  SVA_REASON_TIMEOUT = 6,
} SvaReason;

typedef enum SvaStatus {
  SVA_STATUS_OK = 0,
  SVA_STATUS_NULL_ARGUMENT = 1,
  SVA_STATUS_INVALID_UTF8 = 2,
  SVA_STATUS_SYNTAX_ERROR = 3,
  SVA_STATUS_CONFIG_ERROR = 4,
  SVA_STATUS_ENGINE_ERROR = 5,
  SVA_STATUS_DOMAIN_ERROR = 6,
  SVA_STATUS_PANIC = 7,
} SvaStatus;

typedef enum SvaVerdict {
  SVA_VERDICT_EQUIVALENT = 0,
  SVA_VERDICT_IMPLIES_REF_TO_LM = 1,
  SVA_VERDICT_IMPLIES_LM_TO_REF = 2,
  SVA_VERDICT_NOT_EQUIVALENT = 3,
  SVA_VERDICT_UNSUPPORTED = 4,
} SvaVerdict;

/**
 * Opaque checker configuration.
 */
typedef struct SvaChecker SvaChecker;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * New checker with depth 20, 60 s timeout, enumerate backend.
 */
struct SvaChecker *sva_checker_new(void);

/**
 * # Safety
 * `checker` must come from [`sva_checker_new`] and not be freed already.
 * Null is ignored.
 */
void sva_checker_free(struct SvaChecker *checker);

/**
 * # Safety
 * `checker` must be a live handle.
 */
enum SvaStatus sva_checker_set_depth(struct SvaChecker *checker, uint32_t depth);

/**
 * # Safety
 * `checker` must be a live handle.
 */
enum SvaStatus sva_checker_set_timeout_ms(struct SvaChecker *checker, uint64_t timeout_ms);

/**
 * # Safety
 * `checker` must be a live handle.
 */
enum SvaStatus sva_checker_set_backend(struct SvaChecker *checker, enum SvaBackend backend);

/**
 * # Safety
 * `checker` must be a live handle.
 */
enum SvaStatus sva_checker_set_max_enum_bits(struct SvaChecker *checker, uint32_t bits);

/**
 * Decides the verdict of `candidate` against `reference`. `out_reason` may
 * be null; it is `SVA_REASON_NONE` unless the verdict is unsupported.
 *
 * # Safety
 * `checker` must be a live handle, the strings NUL-terminated, and
 * `out_verdict` writable.
 */
enum SvaStatus sva_check_equivalence(const struct SvaChecker *checker,
                                     const char *candidate,
                                     const char *reference,
                                     enum SvaVerdict *out_verdict,
                                     enum SvaReason *out_reason);

/**
 * Writes 1, 2 or 3 for classes C1, C2, C3.
 *
 * # Safety
 * `sva` must be NUL-terminated and `out_class` writable.
 */
enum SvaStatus sva_classify(const char *sva, uint32_t *out_class);

/**
 * # Safety
 * `sva` must be NUL-terminated and `out` writable. Free the result with
 * [`sva_string_free`].
 */
enum SvaStatus sva_normalize(const char *sva, enum SvaProfile profile, char **out);

/**
 * Lint-normalizes `sva` and emits the checker module around it.
 *
 * # Safety
 * `sva` must be NUL-terminated and `out` writable. Free the result with
 * [`sva_string_free`].
 */
enum SvaStatus sva_wrap(const char *sva, char **out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void sva_string_free(char *s);

/**
 * Distillation weight for one rollout.
 */
double sva_rwopd_weight(enum SvaVerdict verdict, bool syntax_ok);

/**
 * Policy-optimization reward for one rollout.
 */
double sva_rlvf_reward(enum SvaVerdict verdict, bool syntax_ok);

/**
 * # Safety
 * `out` must be writable.
 */
enum SvaStatus sva_pass_at_k(uint64_t n, uint64_t c, uint64_t k, double *out);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *sva_last_error_message(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SVA_EQUIV_H */
