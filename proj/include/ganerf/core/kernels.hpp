#pragma once

#include <cstddef>

namespace ganerf::kernels {

// Heavy inner loops live here in two variants: an OpenMP-parallel kernel
// used everywhere, and a serial reference kept for tests and the
// benchmark target. Both compute every output element with the same
// serial accumulation order, so results are bitwise identical regardless
// of thread count.

// C[n,m] = A[n,k] * B[k,m]
void matmul(const float* A, const float* B, float* C, int n, int k, int m);
void matmul_ref(const float* A, const float* B, float* C, int n, int k, int m);

// dA[n,k] += dC[n,m] * B^T ; dB[k,m] += A^T * dC[n,m]
void matmul_grad_a(const float* dC, const float* B, float* dA, int n, int k, int m);
void matmul_grad_b(const float* A, const float* dC, float* dB, int n, int k, int m);

// CHW conv2d, weight [co, ci, kh, kw].
void conv2d(const float* x, const float* w, const float* b, float* y,
            int ci, int h, int wi, int co, int kh, int kw, int stride, int pad);
void conv2d_ref(const float* x, const float* w, const float* b, float* y,
                int ci, int h, int wi, int co, int kh, int kw, int stride, int pad);
void conv2d_grad_x(const float* dy, const float* w, float* dx,
                   int ci, int h, int wi, int co, int kh, int kw, int stride, int pad);
void conv2d_grad_w(const float* x, const float* dy, float* dw, float* db,
                   int ci, int h, int wi, int co, int kh, int kw, int stride, int pad);

}  // namespace ganerf::kernels
