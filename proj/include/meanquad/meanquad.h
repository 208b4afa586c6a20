/* meanquad: shared-weight quadrature synthesis from convex-combination
 * reduction of normalized integral means.
 *
 * The library computes the mean vector of a system of n integrands over a
 * measured domain and constructs an exact convex-combination representation
 * of that mean on at most n domain points (n+1 when an integrand is declared
 * discontinuous). Everything is deterministic: identical configs produce
 * byte-identical JSON.
 *
 * All functions return MQ_OK on success. On failure, mq_last_error_message()
 * and mq_last_error_position() describe the most recent error on the calling
 * thread. Strings returned through char** are owned by the caller and must
 * be released with mq_string_free().
 */

#ifndef MEANQUAD_H
#define MEANQUAD_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mq_status {
    MQ_OK = 0,
    MQ_ERROR_PARSE = 1,     /* malformed JSON or expression text */
    MQ_ERROR_CONFIG = 2,    /* schema-valid text with invalid contents */
    MQ_ERROR_EVAL = 3,      /* expression domain error during evaluation */
    MQ_ERROR_NUMERIC = 4,   /* refinement or solve failure */
    MQ_ERROR_TOLERANCE = 5, /* result exceeds the configured tolerance */
    MQ_ERROR_INTERNAL = 6
} mq_status;

typedef struct mq_config mq_config; /* opaque: parsed run configuration */
typedef struct mq_rule mq_rule;     /* opaque: synthesized quadrature rule */

/* --- configuration ------------------------------------------------------ */

mq_status mq_config_parse(const char* json_text, mq_config** out_config);
void mq_config_free(mq_config* config);

/* Overrides applied after parsing (CLI flags map onto these). */
mq_status mq_config_set_tolerance(mq_config* config, double tolerance);
mq_status mq_config_set_resolution(mq_config* config, long resolution);
mq_status mq_config_set_max_evals(mq_config* config, long max_evals);
mq_status mq_config_set_seed(mq_config* config, uint64_t seed);
mq_status mq_config_set_unnormalized(mq_config* config, int unnormalized);

/* --- synthesis and verification ----------------------------------------- */

/* Runs the full pipeline. When out_trace_jsonl is non-null it receives the
 * per-round elimination trace as JSON lines (may be empty). */
mq_status mq_synthesize(const mq_config* config, mq_rule** out_rule, char** out_trace_jsonl);

mq_status mq_rule_parse(const char* json_text, mq_rule** out_rule);
void mq_rule_free(mq_rule* rule);

/* Rule as JSON with 17-significant-digit numbers; NULL only on allocation
 * failure. */
char* mq_rule_to_json(const mq_rule* rule);

/* Recomputes the target at tolerance/10 and the combination sum by direct
 * evaluation; out_pass is 1 when every discrepancy is within tolerance. */
mq_status mq_verify(const mq_config* config, const mq_rule* rule, char** out_report_json,
                    int* out_pass);

/* Mean vector only: {"target":[...],"error_estimate":[...],...}. */
mq_status mq_integrate(const mq_config* config, char** out_json);

/* Property checks; `property` is "markov", "fap" or "hull". */
mq_status mq_check(const mq_config* config, const char* property, char** out_report_json,
                   int* out_pass);

/* --- errors and memory --------------------------------------------------- */

const char* mq_last_error_message(void);

/* Character offset for parse errors, -1 otherwise. */
long mq_last_error_position(void);

void mq_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* MEANQUAD_H */
