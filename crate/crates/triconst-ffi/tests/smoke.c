#include <stdio.h>
#include <string.h>
#include "triconst.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (line %d)\n", #cond, __LINE__); return 1; } } while (0)

int main(void) {
    TriconstShape *shape = NULL;
    CHECK(triconst_shape_new("0", "1", &shape) == TRICONST_STATUS_OK);
    double k = 0.0;
    CHECK(triconst_k_constant(shape, 4, &k) == TRICONST_STATUS_OK);
    CHECK(k > 0.4915959 && k < 0.4915961);
    CHECK(triconst_k_constant(shape, 9, &k) == TRICONST_STATUS_INVALID_ARGUMENT);
    CHECK(triconst_last_error() != NULL);

    TriconstPencil *pencil = NULL;
    CHECK(triconst_pencil_new(shape, 3, 3, &pencil) == TRICONST_STATUS_OK);
    CHECK(triconst_pencil_dim(pencil) > 0);
    bool ok = false;
    CHECK(triconst_pencil_certify(pencil, "1000", &ok) == TRICONST_STATUS_OK && ok);
    CHECK(triconst_pencil_certify(pencil, "0", &ok) == TRICONST_STATUS_OK && !ok);
    triconst_pencil_free(pencil);

    char *lambda = NULL;
    CHECK(triconst_lambda_threshold(shape, 1, 20, TRICONST_MODE_THM61, &lambda) == TRICONST_STATUS_OK);
    CHECK(strchr(lambda, '/') != NULL);
    triconst_string_free(lambda);
    triconst_shape_free(shape);

    CHECK(triconst_shape_new("1/2", "0", &shape) == TRICONST_STATUS_DEGENERATE && shape == NULL);
    printf("ok %s\n", triconst_version());
    return 0;
}
