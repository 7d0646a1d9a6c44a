#ifndef TYPEDEBUG_H
#define TYPEDEBUG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Where a session stands.
typedef enum TdPhase {
  TD_PHASE_AWAITING_PROGRAM = 0,
  TD_PHASE_DEBUGGING = 1,
  TD_PHASE_DONE = 2,
  TD_PHASE_WELL_TYPED = 3,
  TD_PHASE_FAILED = 4,
} TdPhase;

// Result of a library call.
typedef enum TdStatus {
  // The call succeeded; any output has been written.
  TD_STATUS_OK = 0,
  // A null pointer, invalid UTF-8, a bad level, or a malformed answer.
  TD_STATUS_INVALID_ARGUMENT = 1,
  // The program does not parse, breaks a level restriction, or uses an
  // unbound name. The output holds a `parse_error` message.
  TD_STATUS_PROGRAM_ERROR = 2,
  // The call does not fit the session's state: answering a question
  // that is not pending, naming a variable not in the question, or
  // submitting twice.
  TD_STATUS_SESSION_STATE = 3,
  // An unexpected failure inside the library.
  TD_STATUS_INTERNAL = 4,
} TdStatus;

// An opaque debugging session.
typedef struct TdSession TdSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failed call on this thread. The pointer
// stays valid until the next library call on the same thread.
const char *td_last_error(void);

// Library version as a static string.
const char *td_version(void);

// Release a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void td_string_free(char *s);

// Create a session at `level` (1 to 4). Returns null if the level is out
// of range.
struct TdSession *td_session_new(uint8_t level_number);

// Release a session. Null is ignored.
//
// # Safety
// `session` must come from `td_session_new` and not have been freed.
void td_session_free(struct TdSession *session);

// Submit the program. On success `*out_json` receives the first step.
//
// # Safety
// `session` must be a live handle, `source` a NUL-terminated string, and
// `out_json` null or writable.
enum TdStatus td_session_submit(struct TdSession *session, const char *source, char **out_json);

// Answer the pending question `question_id` with `y`, `n`, or
// `n:<variable>`. On success `*out_json` receives the next step.
//
// # Safety
// As for `td_session_submit`.
enum TdStatus td_session_answer(struct TdSession *session,
                                size_t question_id,
                                const char *answer,
                                char **out_json);

// # Safety
// `session` must be a live handle or null.
enum TdPhase td_session_phase(const struct TdSession *session);

// Run a whole session in one call with a scripted answer list (one
// answer per line). `*out_json` receives the final step, or the pending
// question if the script runs out.
//
// # Safety
// `source` and `answers` must be NUL-terminated strings (`answers` may be
// null for no answers) and `out_json` null or writable.
enum TdStatus td_run_script(const char *source,
                            uint8_t level_number,
                            const char *answers,
                            char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TYPEDEBUG_H */
