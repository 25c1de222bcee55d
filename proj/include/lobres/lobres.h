#ifndef LOBRES_LOBRES_H
#define LOBRES_LOBRES_H

/*
 * C interface to the lobres library: order book replay, liquidity measures
 * and the resilience/commonality pipeline.
 *
 * Every function returns a lobres_status. On failure the message of the most
 * recent error on the calling thread is available from lobres_last_error().
 * Objects are opaque handles released with the matching *_destroy call.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LOBRES_API __declspec(dllexport)
#elif defined(LOBRES_BUILDING_LIBRARY)
#define LOBRES_API __attribute__((visibility("default")))
#else
#define LOBRES_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lobres_status {
  LOBRES_OK = 0,
  LOBRES_INVALID_ARGUMENT = 1,
  LOBRES_IO = 2,
  LOBRES_PARSE = 3,
  LOBRES_UNKNOWN_ORDER_ID = 4,
  LOBRES_DUPLICATE_ORDER_ID = 5,
  LOBRES_VOLUME_EXCEEDS_RESTING = 6,
  LOBRES_CROSSED_BOOK_REJECTED = 7,
  LOBRES_NON_MONOTONIC_TIMESTAMP = 8,
  LOBRES_EMPTY_SIDE = 9,
  LOBRES_DEGENERATE_R = 10,
  LOBRES_DEGENERATE_DISTRIBUTION = 11,
  LOBRES_RANK_DEFICIENT_DESIGN = 12,
  LOBRES_TOO_FEW_OBSERVATIONS = 13,
  LOBRES_MISSING_FIT = 14,
  LOBRES_OUT_OF_RANGE = 15,
  LOBRES_SINGULAR_SYSTEM = 16,
  LOBRES_INSUFFICIENT_CURVES = 17,
  LOBRES_SHARED_BASIS_VIOLATION = 18,
  LOBRES_SINGULAR_NORMAL_EQUATIONS = 19,
  LOBRES_CONSTANT_COLUMN = 20,
  LOBRES_NON_CONVERGENCE = 21,
  LOBRES_CONFIG = 22,
  LOBRES_INTERNAL = 99
} lobres_status;

typedef enum lobres_event_kind { LOBRES_SUBMIT = 0, LOBRES_EXECUTE = 1, LOBRES_CANCEL = 2 } lobres_event_kind;
typedef enum lobres_side { LOBRES_BID = 0, LOBRES_ASK = 1 } lobres_side;
typedef enum lobres_measure { LOBRES_SPREAD = 0, LOBRES_XLM = 1 } lobres_measure;

typedef enum lobres_stage {
  LOBRES_STAGE_SYNTH = 0,
  LOBRES_STAGE_MEASURE = 1,
  LOBRES_STAGE_TED = 2,
  LOBRES_STAGE_LRP = 3,
  LOBRES_STAGE_FPCA = 4,
  LOBRES_STAGE_COMMONALITY = 5,
  LOBRES_STAGE_SUMMARY = 6,
  LOBRES_STAGE_ALL = 7
} lobres_stage;

typedef struct lobres_event {
  int64_t timestamp_ms;
  int32_t kind; /* lobres_event_kind */
  int32_t side; /* lobres_side */
  uint64_t order_id;
  int64_t price_ticks;
  int64_t volume;
} lobres_event;

typedef struct lobres_level {
  int64_t price_ticks;
  int64_t volume;
  int64_t order_count;
} lobres_level;

typedef struct lobres_book lobres_book;
typedef struct lobres_config lobres_config;
typedef struct lobres_report lobres_report;

LOBRES_API const char* lobres_version(void);
LOBRES_API const char* lobres_last_error(void);
LOBRES_API const char* lobres_status_name(lobres_status status);
/* "HH:MM[:SS[.mmm]]" or a plain millisecond count. */
LOBRES_API lobres_status lobres_parse_time(const char* text, int64_t* ms);

/* Order books. automatch != 0 matches crossing submissions instead of
 * rejecting them. */
LOBRES_API lobres_status lobres_book_create(int automatch, lobres_book** out);
LOBRES_API void lobres_book_destroy(lobres_book* book);
LOBRES_API lobres_status lobres_book_apply(lobres_book* book, const lobres_event* event);
/* Replays an event file (CSV or NDJSON) up to and including until_ms;
 * until_ms < 0 replays everything. */
LOBRES_API lobres_status lobres_book_replay_file(const char* path, int automatch, int64_t until_ms,
                                                 lobres_book** out);
LOBRES_API lobres_status lobres_book_best(const lobres_book* book, int64_t* bid_ticks, int64_t* ask_ticks);
/* Copies up to capacity levels of one side, best first; *count receives the
 * number of levels on the side. */
LOBRES_API lobres_status lobres_book_levels(const lobres_book* book, int32_t side, lobres_level* levels,
                                            size_t capacity, size_t* count);
/* Measure in ticks; r_cap applies to LOBRES_XLM only. */
LOBRES_API lobres_status lobres_book_measure(const lobres_book* book, int32_t measure, double r_cap,
                                             double* value);

/* Pipeline configuration: key = value settings as in the config file. */
LOBRES_API lobres_status lobres_config_create(lobres_config** out);
LOBRES_API lobres_status lobres_config_load(const char* path, lobres_config** out);
LOBRES_API void lobres_config_destroy(lobres_config* config);
LOBRES_API lobres_status lobres_config_set(lobres_config* config, const char* key, const char* value);
/* Copies the value (NUL-terminated) when it fits; *needed receives the size
 * including the terminator. LOBRES_CONFIG if the key is unset. */
LOBRES_API lobres_status lobres_config_get(const lobres_config* config, const char* key, char* buffer,
                                           size_t capacity, size_t* needed);
/* Validates the settings as a whole. */
LOBRES_API lobres_status lobres_config_validate(const lobres_config* config);

/* Runs one stage (or all of them). Per asset/day failures do not fail the
 * call; they are listed in the report. */
LOBRES_API lobres_status lobres_run_stage(const lobres_config* config, lobres_stage stage, lobres_report** out);
LOBRES_API void lobres_report_destroy(lobres_report* report);
LOBRES_API size_t lobres_report_stage_count(const lobres_report* report);
LOBRES_API lobres_status lobres_report_stage(const lobres_report* report, size_t index, const char** name,
                                             size_t* tasks, size_t* cached, size_t* failed);
LOBRES_API size_t lobres_report_failure_count(const lobres_report* report);
LOBRES_API lobres_status lobres_report_failure(const lobres_report* report, size_t index, const char** stage,
                                               const char** symbol, const char** day, lobres_status* code,
                                               const char** message);

#ifdef __cplusplus
}
#endif

#endif
