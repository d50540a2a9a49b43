#include <math.h>
#include <stdio.h>
#include <string.h>

#include "mpcore.h"

#define CHECK(expr, want)                                                   \
    do {                                                                    \
        int32_t s_ = (expr);                                                \
        if (s_ != (want)) {                                                 \
            fprintf(stderr, "%s:%d: %s -> %d\n", __FILE__, __LINE__, #expr, s_); \
            return 1;                                                       \
        }                                                                   \
    } while (0)

int main(void) {
    uint64_t a, b, x, piv;
    double c[2];
    const char *vals[2][2] = {{"4", "3"}, {"6", "3"}};

    if (mpcore_abi_version() != 1 || strlen(mpcore_version()) == 0) {
        fputs("version query failed\n", stderr);
        return 1;
    }
    CHECK(mpcore_mc_matrix_new(2, 2, 2, &a), 0);
    CHECK(mpcore_mc_vector_new(2, 2, &b), 0);
    CHECK(mpcore_mc_vector_new(2, 2, &x), 0);
    for (size_t i = 0; i < 2; i++)
        for (size_t j = 0; j < 2; j++) CHECK(mpcore_mc_set_element_from_decimal(a, i, j, vals[i][j]), 0);
    CHECK(mpcore_mc_set_element_from_decimal(b, 0, 0, "10"), 0);
    CHECK(mpcore_mc_set_element_from_decimal(b, 1, 0, "12"), 0);
    CHECK(mpcore_mc_lu_factor(a, &piv), 0);
    CHECK(mpcore_mc_lu_solve(a, piv, b, x), 0);
    CHECK(mpcore_mc_get_element_components(x, 0, 0, c, 2), 0);
    if (fabs(c[0] - 1.0) + fabs(c[1]) > 0x1p-100) { fprintf(stderr, "x0 = %a %a\n", c[0], c[1]); return 1; }
    CHECK(mpcore_mc_get_element_components(x, 1, 0, c, 2), 0);
    if (fabs(c[0] - 2.0) + fabs(c[1]) > 0x1p-100) { fprintf(stderr, "x1 = %a %a\n", c[0], c[1]); return 1; }
    CHECK(mpcore_release(piv), 0);
    CHECK(mpcore_release(piv), 1);
    CHECK(mpcore_mc_set_element_from_decimal(b, 0, 0, "1.2.3"), 4);
    CHECK(mpcore_release(a), 0);
    CHECK(mpcore_release(b), 0);
    CHECK(mpcore_release(x), 0);
    puts("ok");
    return 0;
}
