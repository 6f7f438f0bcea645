#include <stdio.h>
#include <string.h>
#include "tetrakit.h"

int main(void) {
    double half[1] = {0.5}, quarter[1] = {0.25};
    TkTriple *t = NULL;
    if (tk_triple_new(1, half, NULL, half, NULL, quarter, NULL, &t) != TK_STATUS_OK) {
        fprintf(stderr, "%s\n", tk_last_error());
        return 1;
    }
    TkFundamental *f = NULL;
    if (tk_fundamental_new(t, &f) != TK_STATUS_OK) return 2;
    double re[1], im[1];
    tk_fundamental_operator(f, 1, re, im);
    printf("F1 = %.12f\n", re[0]);
    TkModel *m = NULL;
    if (tk_dilation_build(t, 5, &m) != TK_STATUS_OK) return 3;
    double worst = 1.0;
    tk_model_verify_moments(m, 4, &worst);
    printf("dim = %zu, moments = %g\n", tk_model_dim(m), worst);
    tk_model_free(m);
    tk_fundamental_free(f);
    tk_triple_free(t);
    return 0;
}
