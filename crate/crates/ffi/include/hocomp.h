#ifndef HOCOMP_H
#define HOCOMP_H

#include <stdint.h>
#include <stddef.h>

// How a run ended.
typedef enum HcOutcomeKind {
  HC_OUTCOME_KIND_VALUE = 0,
  HC_OUTCOME_KIND_NO_VALUE_WITHIN_FUEL = 1,
  HC_OUTCOME_KIND_ORACLE_REFUSAL = 2,
  HC_OUTCOME_KIND_OVERFLOW = 3,
  HC_OUTCOME_KIND_STUCK_ILL_TYPED = 4,
} HcOutcomeKind;

// Result code of every fallible call.
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_ARGUMENT = 1,
  HC_STATUS_INVALID_UTF8 = 2,
  HC_STATUS_PARSE_ERROR = 3,
  HC_STATUS_TYPE_ERROR = 4,
  HC_STATUS_EVAL_ERROR = 5,
  HC_STATUS_ORACLE_ERROR = 6,
  HC_STATUS_BUDGET_EXCEEDED = 7,
  HC_STATUS_PANIC = 8,
} HcStatus;

typedef enum HcVerdict {
  HC_VERDICT_AGREE = 0,
  HC_VERDICT_DISAGREE = 1,
  HC_VERDICT_INCONCLUSIVE_FUEL = 2,
} HcVerdict;

// A table of oracle plugins with their configuration.
typedef struct HcOracles HcOracles;

// A parsed term.
typedef struct HcTerm HcTerm;

typedef struct HcOutcome {
  enum HcOutcomeKind kind;
  // The value for `VALUE`, the fuel for `NO_VALUE_WITHIN_FUEL`, else 0.
  uint64_t value;
  uint64_t steps;
  // Nonzero if some oracle answered from a bounded search.
  uint8_t approximate;
} HcOutcome;

typedef struct HcEquivReport {
  enum HcVerdict verdict;
  // Nonzero if the denotation is a number.
  uint8_t has_denotation;
  uint32_t denotation;
  struct HcOutcome operational;
} HcEquivReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses `src` into a new term handle stored in `*out`.
enum HcStatus hc_parse(const char *src, struct HcTerm **out);

void hc_term_free(struct HcTerm *t);

// Creates a table holding the built-in oracles.
struct HcOracles *hc_oracles_new(void);

// Sets configuration `key = value` of oracle `name`.
enum HcStatus hc_oracles_set(struct HcOracles *o,
                             const char *name,
                             const char *key,
                             const char *value);

void hc_oracles_free(struct HcOracles *o);

// Typechecks a closed term and stores its type, as a string to be freed
// with `hc_string_free`, in `*type_out`.
enum HcStatus hc_typecheck(const struct HcTerm *t, char **type_out);

// Evaluates a closed term of type `0` by its computation tree with the
// given fuel. `bound` 0 selects the infinite model, otherwise the finite
// model with base values `0..=bound`. `oracles` may be null for the
// built-in defaults.
enum HcStatus hc_eval(const struct HcTerm *t,
                      const struct HcOracles *oracles,
                      uint32_t bound,
                      uint64_t fuel,
                      struct HcOutcome *out);

// Compares the denotation of a closed term of type `0` in the finite model
// of the given bound with its computation tree.
enum HcStatus hc_check_equiv(const struct HcTerm *t,
                             const struct HcOracles *oracles,
                             uint32_t bound,
                             uint64_t fuel,
                             struct HcEquivReport *out);

// Size of the space of type `ty` in the finite model of the given bound:
// hereditarily monotone partial elements if `partial` is nonzero, total
// functionals otherwise.
enum HcStatus hc_enumerate_count(const char *ty, uint32_t bound, uint8_t partial, uint64_t *out);

// Message of the last failed call on this thread, empty after a success.
// Valid until the next call on the same thread.
const char *hc_last_error_message(void);

void hc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOCOMP_H */
