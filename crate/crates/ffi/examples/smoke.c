/* Minimal consumer of the tadeval C API.
 *
 * Build (after `cargo build -p tadeval-ffi`):
 *
 *   cc -std=c11 -Wall -Wextra -I crates/ffi/include crates/ffi/examples/smoke.c \
 *      target/debug/libtadeval_ffi.a -lm -lpthread -ldl -o smoke
 */
#include <assert.h>
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "tadeval.h"

int main(void) {
    const double scores[] = {0.1, 0.2, 0.9, 0.3, 0.1};
    const uint8_t labels[] = {0, 1, 1, 1, 0};
    TadScores *s = NULL;
    TadLabels *l = NULL;
    assert(tadeval_scores_new(scores, 5, &s) == TAD_STATUS_OK);
    assert(tadeval_labels_new(labels, 5, &l) == TAD_STATUS_OK);

    /* Point-wise: one hit inside the three-point segment. */
    TadEvaluation ev;
    assert(tadeval_evaluate(s, l, 0.5, TAD_PROTOCOL_POINT, 0.0, &ev) == TAD_STATUS_OK);
    printf("point-wise    F1 = %.4f\n", ev.f1);

    /* Point adjustment credits the whole segment. */
    assert(tadeval_evaluate(s, l, 0.5, TAD_PROTOCOL_POINT_ADJUST, 0.0, &ev) == TAD_STATUS_OK);
    printf("point-adjust  F1 = %.4f\n", ev.f1);

    /* Best-F1 threshold sweep under PA%K with K = 40. */
    TadSweepBest best;
    assert(tadeval_sweep_best_f1(s, l, TAD_PROTOCOL_PERCENT_K, 40.0, &best) == TAD_STATUS_OK);
    printf("PA%%40 best   F1 = %.4f at threshold %g\n", best.f1, best.threshold);

    /* Closed-form expected PA precision for a random-ish detector. */
    double precision = 0.0;
    assert(tadeval_expected_precision_pa(0.05, 1000, 0.99, &precision) == TAD_STATUS_OK);
    printf("E[precision | gamma=0.05, L=1000, delta'=0.99] = %.6f\n", precision);

    /* Errors come back as status codes with a readable message. */
    if (tadeval_evaluate(NULL, l, 0.5, TAD_PROTOCOL_POINT, 0.0, &ev) != TAD_STATUS_OK) {
        printf("expected failure: %s\n", tadeval_last_error_message());
    }

    tadeval_scores_free(s);
    tadeval_labels_free(l);
    printf("tadeval %s ok\n", tadeval_version());
    return 0;
}
