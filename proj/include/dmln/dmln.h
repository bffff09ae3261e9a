/* dmln: decomposed Markov Logic inference engine, C interface.
 *
 * All objects are opaque handles created and destroyed by this library.
 * Functions return DMLN_OK on success; on failure, dmln_last_error() gives a
 * thread-local message describing what went wrong.
 */
#ifndef DMLN_H
#define DMLN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmln_status {
  DMLN_OK = 0,
  DMLN_ERR_IO = 1,          /* file not readable / writable */
  DMLN_ERR_PARSE = 2,       /* syntax or semantic error in an input file */
  DMLN_ERR_INFEASIBLE = 3,  /* hard rules cannot be satisfied */
  DMLN_ERR_INVALID = 4,     /* bad argument or handle misuse */
  DMLN_ERR_INTERNAL = 5
} dmln_status;

typedef struct dmln_program dmln_program;
typedef struct dmln_session dmln_session;
typedef struct dmln_result dmln_result;

typedef struct dmln_config {
  int marginal;        /* 0: MAP, 1: marginal */
  int monolithic;      /* force a single generic task */
  int iterations;      /* message-passing iteration budget, >= 1 */
  double step;         /* initial gradient step size */
  int constant_step;   /* 0: diminishing schedule, 1: constant */
  uint64_t seed;
  int workers;         /* concurrent task solves, 1 = fully deterministic */
} dmln_config;

/* sensible defaults: MAP, auto decomposition, 100 iterations, step 1.0,
 * diminishing schedule, seed 0, one worker */
void dmln_config_init(dmln_config* config);

const char* dmln_last_error(void);

/* -- program loading ----------------------------------------------------- */

dmln_status dmln_program_parse(const char* text, dmln_program** out);
dmln_status dmln_program_parse_file(const char* path, dmln_program** out);
dmln_status dmln_program_load_evidence(dmln_program* program, const char* text);
dmln_status dmln_program_load_evidence_file(dmln_program* program,
                                            const char* path);
/* canonical printout of the parsed program; free with dmln_string_free */
dmln_status dmln_program_print(const dmln_program* program, char** out);
void dmln_program_free(dmln_program* program);

/* -- compilation --------------------------------------------------------- */

/* Grounds the program and compiles the logical plan (tasks, solver
 * assignments, materialization plans). The session keeps its own copy of the
 * program; the input handle stays owned by the caller. */
dmln_status dmln_session_create(const dmln_program* program,
                                const dmln_config* config,
                                dmln_session** out);
/* human-readable plan dump; free with dmln_string_free */
dmln_status dmln_session_explain(const dmln_session* session, char** out);
void dmln_session_free(dmln_session* session);

/* -- inference ----------------------------------------------------------- */

/* Runs dual-decomposition inference. Returns DMLN_ERR_INFEASIBLE when hard
 * rules cannot be satisfied; a result handle is still produced in that case
 * so diagnostics can be read. */
dmln_status dmln_session_infer(dmln_session* session, dmln_result** out);

/* one row per ground query atom: relation<TAB>args...<TAB>value, sorted */
dmln_status dmln_result_tsv(const dmln_result* result, char** out);
/* same, restricted to a comma-separated relation list (NULL = all) */
dmln_status dmln_session_result_tsv(const dmln_session* session,
                                    const dmln_result* result,
                                    const char* relations, char** out);
/* per-iteration trace: iteration, step, rmse, disagreement, best primal */
dmln_status dmln_result_trace_tsv(const dmln_result* result, char** out);
int dmln_result_infeasible(const dmln_result* result);
int dmln_result_iterations(const dmln_result* result);
double dmln_result_final_cost(const dmln_result* result);
/* 1 when the duality-gap check certifies the MAP answer optimal */
int dmln_result_certified(const dmln_result* result);
void dmln_result_free(dmln_result* result);

void dmln_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* DMLN_H */
