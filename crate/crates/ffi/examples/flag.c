/* cc examples/flag.c -Iinclude ../../target/debug/libfinsler_ffi.a -lm -lpthread -ldl -o flag */
#include <stdio.h>
#include "finsler.h"

int main(void) {
    FslStructure *s = NULL;
    const char *family = "family = \"riemannian\"\nmetric = { kind = \"sphere\", radius = 2.0 }";
    if (fsl_structure_from_toml(3, family, &s) != FSL_STATUS_OK) {
        fprintf(stderr, "%s\n", fsl_last_error());
        return 1;
    }
    double x[3] = {0.1, -0.2, 0.3}, y[3] = {1.0, 0.5, 0.0}, u[3] = {0.0, 0.0, 1.0};
    double k = 0.0;
    if (fsl_flag_curvature(s, x, y, u, 3, &k) != FSL_STATUS_OK) {
        fprintf(stderr, "%s\n", fsl_last_error());
        fsl_structure_free(s);
        return 1;
    }
    printf("finsler %s: K = %.12f\n", fsl_version(), k);
    fsl_structure_free(s);
    return 0;
}
