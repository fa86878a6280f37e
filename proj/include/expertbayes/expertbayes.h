/* C interface to the expertbayes engine.
 *
 * Handles are opaque and owned by the caller; release them with the matching
 * *_free function. Strings returned through char** are heap copies released
 * with eb_string_free. Every function returns an eb_status; on failure
 * eb_last_error() describes the problem for the calling thread. */
#ifndef EXPERTBAYES_H
#define EXPERTBAYES_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EB_API __declspec(dllexport)
#else
#define EB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eb_status {
  EB_OK = 0,
  EB_ERR_INVALID_ARGUMENT = 1,
  EB_ERR_INVALID_STRUCTURE = 2,
  EB_ERR_CYCLIC_STRUCTURE = 3,
  EB_ERR_CYCLE_WOULD_FORM = 4,
  EB_ERR_EDIT_INAPPLICABLE = 5,
  EB_ERR_COLUMN_MISMATCH = 6,
  EB_ERR_EMPTY_DATASET = 7,
  EB_ERR_UNESTIMATED_CPT = 8,
  EB_ERR_INVALID_EVIDENCE_LABEL = 9,
  EB_ERR_NON_BINARY_CLASS = 10,
  EB_ERR_INVALID_ORDERING = 11,
  EB_ERR_TOO_FEW_ROWS = 12,
  EB_ERR_LENGTH_MISMATCH = 13,
  EB_ERR_PARSE = 14,
  EB_ERR_SCHEMA_VERSION_UNSUPPORTED = 15,
  EB_ERR_RAGGED_ROW = 16,
  EB_ERR_MISSING_CLASS_COLUMN = 17,
  EB_ERR_SINGLE_STATE_CLASS = 18,
  EB_ERR_IO = 19,
  EB_ERR_CANCELLED = 20,
  EB_ERR_INTERNAL = 99
} eb_status;

typedef struct eb_network eb_network;
typedef struct eb_dataset eb_dataset;
typedef struct eb_report eb_report;

typedef enum eb_reject_policy { EB_REJECT_COUNT = 0, EB_REJECT_REDRAW = 1 } eb_reject_policy;

EB_API const char* eb_version(void);
/* Message of the last failed call on this thread; "" when none. */
EB_API const char* eb_last_error(void);
/* Identifier such as "CycleWouldForm". */
EB_API const char* eb_status_name(eb_status status);
EB_API void eb_string_free(char* text);

/* Networks */
EB_API eb_status eb_network_load_file(const char* path, eb_network** out);
EB_API eb_status eb_network_load_buffer(const char* bytes, size_t length, eb_network** out);
EB_API eb_status eb_network_save_file(const eb_network* network, const char* path);
/* Canonical document text. */
EB_API eb_status eb_network_to_json(const eb_network* network, char** out);
EB_API eb_status eb_network_variable_count(const eb_network* network, size_t* out);
EB_API eb_status eb_network_edge_count(const eb_network* network, size_t* out);
/* edit_json: {"kind": "add"|"remove"|"reverse", "node_a": name, "node_b": name,
 * "direction": "a_to_b"|"b_to_a" (add only)}. The input is left untouched. */
EB_API eb_status eb_network_apply_edit(const eb_network* network, const char* edit_json,
                                       eb_network** out);
EB_API void eb_network_free(eb_network* network);

/* Datasets. missing_token may be NULL for "?". */
EB_API eb_status eb_dataset_load_file(const char* path, const char* class_column,
                                      const char* missing_token, eb_dataset** out);
EB_API eb_status eb_dataset_load_buffer(const char* bytes, size_t length, const char* class_column,
                                        const char* missing_token, eb_dataset** out);
EB_API eb_status eb_dataset_row_count(const eb_dataset* data, size_t* out);
EB_API eb_status eb_dataset_column_count(const eb_dataset* data, size_t* out);
/* {"threshold": t, "warnings": [...]} for pairs whose normalized mutual
 * information exceeds threshold. */
EB_API eb_status eb_dataset_screen(const eb_dataset* data, double threshold, char** out);
EB_API void eb_dataset_free(eb_dataset* data);

/* Refinement */
typedef struct eb_refine_options {
  size_t iterations;           /* default 100 */
  uint64_t seed;               /* default 0 */
  double threshold;            /* default 0.5 */
  double pseudocount;          /* default 1 */
  const char* positive_state;  /* NULL or "" -> first class state */
  eb_reject_policy reject_policy;
  int keep_supplied_cpts;
  unsigned workers;            /* 0 = auto */
  size_t folds;                /* 0 = train/test split; >= 2 cross-validates */
  int stratified;              /* default 1 */
} eb_refine_options;

EB_API void eb_refine_options_init(eb_refine_options* options);

/* With options->folds == 0, test must be non-NULL; otherwise test is ignored
 * and train is cross-validated. */
EB_API eb_status eb_refine(const eb_network* network, const eb_dataset* train,
                           const eb_dataset* test, const eb_refine_options* options,
                           eb_report** out);

/* Evaluation */
typedef struct eb_eval_options {
  size_t folds;                /* default 5 */
  uint64_t seed;               /* folds and refinement */
  int stratified;              /* default 1 */
  double threshold;            /* default 0.5 */
  double pseudocount;          /* default 1 */
  const char* positive_state;  /* NULL or "" -> first class state */
  size_t iterations;           /* expertbayes, default 100 */
  eb_reject_policy reject_policy;
  size_t max_parents;          /* k2, default 1 */
  int keep_supplied_cpts;
  unsigned workers;
} eb_eval_options;

EB_API void eb_eval_options_init(eb_eval_options* options);

/* learners: comma-separated subset of original,expertbayes,k2,tan. network may
 * be NULL when neither original nor expertbayes is listed. */
EB_API eb_status eb_evaluate(const char* learners, const eb_network* network,
                             const eb_dataset* data, const eb_eval_options* options,
                             eb_report** out);

/* Structure learning. algorithm: "k2" or "tan". network_out or report_out may
 * be NULL. */
EB_API eb_status eb_learn(const eb_dataset* data, const char* algorithm, size_t max_parents,
                          double pseudocount, eb_network** network_out, eb_report** report_out);

/* Reports */
/* stable != 0 omits "created_at". */
EB_API eb_status eb_report_to_json(const eb_report* report, int stable, char** out);
EB_API eb_status eb_report_save_file(const eb_report* report, const char* path);
/* Test CCI of the retained network (refine) or macro CCI of the first learner. */
EB_API eb_status eb_report_macro_cci(const eb_report* report, double* out);
/* Tab-separated PR rows; empty for reports without cross-validation. */
EB_API eb_status eb_report_pr_table(const eb_report* report, char** out);
/* learner<TAB>macro_cci rows with a header; empty like the PR table. */
EB_API eb_status eb_report_cci_table(const eb_report* report, char** out);
EB_API void eb_report_free(eb_report* report);

#ifdef __cplusplus
}
#endif

#endif /* EXPERTBAYES_H */
