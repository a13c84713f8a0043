#include <stdio.h>
#include <string.h>
#include "hocomp.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, hc_last_error_message()); return 1; } } while (0)

int main(void) {
    HcTerm *t = NULL;
    CHECK(hc_parse("(fix add:0 -> 0 -> 0. \\a:0. \\b:0. case b a (suc (add a (pred b)))) 2 3", &t) == HC_STATUS_OK);

    char *ty = NULL;
    CHECK(hc_typecheck(t, &ty) == HC_STATUS_OK);
    CHECK(strcmp(ty, "0") == 0);
    hc_string_free(ty);

    HcOutcome o;
    CHECK(hc_eval(t, NULL, 0, 100000, &o) == HC_STATUS_OK);
    CHECK(o.kind == HC_OUTCOME_KIND_VALUE && o.value == 5);
    hc_term_free(t);

    HcTerm *bad = NULL;
    CHECK(hc_parse("suc (", &bad) == HC_STATUS_PARSE_ERROR);
    CHECK(bad == NULL && strlen(hc_last_error_message()) > 0);

    uint64_t n = 0;
    CHECK(hc_enumerate_count("0 -> 0", 1, 1, &n) == HC_STATUS_OK && n == 11);
    printf("ok\n");
    return 0;
}
