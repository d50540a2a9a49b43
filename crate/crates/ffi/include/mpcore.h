/* C interface to the mpcore shared library (ABI version 1).
 *
 * Every call returns a status: 0 ok, 1 invalid handle, 2 dimension mismatch
 * (also: text buffer too small), 3 singular, 4 parse, 5 overflow,
 * 6 internal (also: invalid argument, handle busy in another call).
 * Handles are opaque; a released handle is reported as invalid. */
#ifndef MPCORE_H
#define MPCORE_H

#include <stddef.h>
#include <stdint.h>

#define MPCORE_OK 0
#define MPCORE_INVALID_HANDLE 1
#define MPCORE_DIMENSION_MISMATCH 2
#define MPCORE_SINGULAR 3
#define MPCORE_PARSE 4
#define MPCORE_OVERFLOW 5
#define MPCORE_INTERNAL 6

#ifdef __cplusplus
extern "C" {
#endif

const char *mpcore_version(void);
uint32_t mpcore_abi_version(void);
int32_t mpcore_simd_enabled(void);

/* k is the component count: 2 (double-double), 3 (triple), 4 (quad). */
int32_t mpcore_mc_matrix_new(uint32_t k, size_t rows, size_t cols, uint64_t *out);
int32_t mpcore_mc_vector_new(uint32_t k, size_t len, uint64_t *out);
int32_t mpcore_release(uint64_t h);
int32_t mpcore_mc_shape(uint64_t h, uint32_t *k, size_t *rows, size_t *cols);

/* Decimal or hex-float text; vectors use j = 0. */
int32_t mpcore_mc_set_element_from_decimal(uint64_t h, size_t i, size_t j, const char *text);
int32_t mpcore_mc_get_element_components(uint64_t h, size_t i, size_t j, double *out, size_t cap);

int32_t mpcore_mc_lu_factor(uint64_t h, uint64_t *piv_out);
int32_t mpcore_mc_lu_solve(uint64_t lu, uint64_t piv, uint64_t b, uint64_t x);

/* a_path, b_path: matrix files with tag bf. */
int32_t mpcore_mc_refine(const char *a_path, const char *b_path, uint32_t k, uint32_t long_bits,
                         const char *rtol, const char *atol, size_t max_iter, uint64_t *report_out);

int32_t mpcore_report_iterations(uint64_t h, size_t *out);
/* 0 converged, 1 max_iter, 2 stagnated. */
int32_t mpcore_report_stop_reason(uint64_t h, int32_t *out);
int32_t mpcore_report_residual_count(uint64_t h, size_t *out);
int32_t mpcore_report_residual(uint64_t h, size_t idx, double *out);
int32_t mpcore_report_solution_len(uint64_t h, size_t *out);
int32_t mpcore_report_solution_element(uint64_t h, size_t i, char *buf, size_t cap, size_t *needed);

#ifdef __cplusplus
}
#endif

#endif
