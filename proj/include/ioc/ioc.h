/* C interface to the inverse-optimal controller synthesis library.
 *
 * All objects are opaque handles; every function that can fail returns an
 * error code and, where a char buffer is given, a human-readable message.
 * Strings returned through char** are heap-allocated and must be released
 * with ioc_string_free().
 */
#ifndef IOC_H
#define IOC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ioc_problem ioc_problem;
typedef struct ioc_synthesis ioc_synthesis;

enum {
  IOC_OK = 0,
  IOC_EPARSE = 1,       /* malformed system text or expression */
  IOC_EUNSUPPORTED = 2, /* no synthesis scheme applies to the system */
  IOC_EINVAL = 3,       /* bad argument */
  IOC_ERUNTIME = 4      /* evaluation or integration failure */
};

/* verification verdicts (also used as CLI exit codes) */
enum {
  IOC_VERIFY_PASS = 0,
  IOC_VERIFY_FAIL = 1,
  IOC_VERIFY_PARTIAL = 2
};

const char* ioc_version(void);

/* -- problems -------------------------------------------------------- */

/* text is TOML or JSON, auto-detected */
int ioc_problem_parse(const char* text, ioc_problem** out, char* err, size_t errcap);
int ioc_problem_load(const char* path, ioc_problem** out, char* err, size_t errcap);
void ioc_problem_free(ioc_problem* p);
int ioc_problem_to_json(const ioc_problem* p, char** out);

/* -- bundled example registry ---------------------------------------- */

size_t ioc_example_count(void);
const char* ioc_example_name(size_t index); /* NULL when out of range */
int ioc_example_load(const char* name, ioc_problem** out, char* err, size_t errcap);
int ioc_examples_json(char** out);

/* Reproduce all bundled examples. with_verify != 0 also runs the full
 * verification battery per example. Returns IOC_OK; *failures is the number
 * of entries that did not match their frozen expectations. */
int ioc_examples_check(int with_verify, int* failures, char** json_out);

/* -- synthesis -------------------------------------------------------- */

/* case_tag: NULL or "auto" picks from the cost block / classification;
 * otherwise one of "I", "Ib", "II", "III", "third". */
int ioc_synthesize(const ioc_problem* p, const char* case_tag, ioc_synthesis** out, char* err,
                   size_t errcap);
void ioc_synthesis_free(ioc_synthesis* s);
const char* ioc_synthesis_case(const ioc_synthesis* s);
/* which: "u" control law, "V" value function, "L" running cost */
int ioc_synthesis_expression(const ioc_synthesis* s, const char* which, char** out);
int ioc_synthesis_to_json(const ioc_synthesis* s, char** out);

/* -- verification ------------------------------------------------------ */

/* resolution <= 0 picks the default grid. Outputs are optional (NULL ok). */
int ioc_verify(const ioc_synthesis* s, const ioc_problem* p, int resolution, unsigned seed,
               int* verdict, char** json_out, char** text_out);

/* -- simulation -------------------------------------------------------- */

/* x0 has length n = system order; dt/t_max <= 0 pick defaults; stride < 1 is
 * treated as 1. csv_out, summary_json_out and svg_out are optional. Returns
 * IOC_ERUNTIME when the closed loop diverges (outputs are still written). */
int ioc_simulate(const ioc_synthesis* s, const ioc_problem* p, const double* x0, size_t n,
                 double dt, double t_max, int stride, char** csv_out,
                 char** summary_json_out, char** svg_out);

void ioc_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* IOC_H */
