#include <math.h>
#include <stdio.h>
#include "siegel_moduli.h"

int main(void) {
    double x1[] = {0.0}, y1[] = {1.0}, y2[] = {2.0}, bad[] = {-1.0};
    SmPoint *a = NULL, *b = NULL, *c = NULL;
    double d = 0.0;
    if (sm_point_new(1, x1, y1, &a) != SM_STATUS_OK) return 1;
    if (sm_point_new(1, x1, y2, &b) != SM_STATUS_OK) return 2;
    if (sm_distance(a, b, &d) != SM_STATUS_OK) return 3;
    if (fabs(d - log(2.0)) > 1e-12) return 4;
    if (sm_point_new(1, x1, bad, &c) != SM_STATUS_NOT_POSITIVE_DEFINITE) return 5;
    if (sm_last_error_message() == NULL) return 6;
    printf("%.15g\n", d);
    sm_point_free(a);
    sm_point_free(b);
    return 0;
}
