#include <stdio.h>
#include <string.h>
#include "typedebug.h"

int main(void) {
    TdSession *s = td_session_new(4);
    char *out = NULL;
    if (!s) return 10;
    if (td_session_submit(s, "let rec gcd m n = if n = 0 then m else gcd n", &out) != TD_STATUS_OK) {
        fprintf(stderr, "%s\n", td_last_error());
        return 11;
    }
    if (!strstr(out, "\"type\":\"question\"")) return 12;
    td_string_free(out);
    if (td_session_answer(s, 0, "y", &out) != TD_STATUS_OK) return 13;
    puts(out);
    td_string_free(out);
    if (td_session_phase(s) != TD_PHASE_DONE) return 14;
    td_session_free(s);
    return 0;
}
