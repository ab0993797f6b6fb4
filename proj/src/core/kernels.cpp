#include "ganerf/core/kernels.hpp"

#include <cstring>

namespace ganerf::kernels {

namespace {

inline int out_size(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

}  // namespace

void matmul_ref(const float* A, const float* B, float* C, int n, int k, int m) {
  std::memset(C, 0, sizeof(float) * static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    const float* a = A + static_cast<std::size_t>(i) * k;
    float* c = C + static_cast<std::size_t>(i) * m;
    for (int l = 0; l < k; ++l) {
      const float av = a[l];
      const float* b = B + static_cast<std::size_t>(l) * m;
      for (int j = 0; j < m; ++j) c[j] += av * b[j];
    }
  }
}

void matmul(const float* A, const float* B, float* C, int n, int k, int m) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const float* a = A + static_cast<std::size_t>(i) * k;
    float* c = C + static_cast<std::size_t>(i) * m;
    for (int j = 0; j < m; ++j) c[j] = 0.0f;
    for (int l = 0; l < k; ++l) {
      const float av = a[l];
      const float* b = B + static_cast<std::size_t>(l) * m;
      for (int j = 0; j < m; ++j) c[j] += av * b[j];
    }
  }
}

void matmul_grad_a(const float* dC, const float* B, float* dA, int n, int k, int m) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const float* dc = dC + static_cast<std::size_t>(i) * m;
    float* da = dA + static_cast<std::size_t>(i) * k;
    for (int l = 0; l < k; ++l) {
      const float* b = B + static_cast<std::size_t>(l) * m;
      float acc = 0.0f;
      for (int j = 0; j < m; ++j) acc += dc[j] * b[j];
      da[l] += acc;
    }
  }
}

void matmul_grad_b(const float* A, const float* dC, float* dB, int n, int k, int m) {
#pragma omp parallel for schedule(static)
  for (int l = 0; l < k; ++l) {
    float* db = dB + static_cast<std::size_t>(l) * m;
    for (int i = 0; i < n; ++i) {
      const float av = A[static_cast<std::size_t>(i) * k + l];
      const float* dc = dC + static_cast<std::size_t>(i) * m;
      for (int j = 0; j < m; ++j) db[j] += av * dc[j];
    }
  }
}

void conv2d_ref(const float* x, const float* w, const float* b, float* y,
                int ci, int h, int wi, int co, int kh, int kw, int stride, int pad) {
  const int oh = out_size(h, kh, stride, pad);
  const int ow = out_size(wi, kw, stride, pad);
  for (int oc = 0; oc < co; ++oc) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        float acc = b ? b[oc] : 0.0f;
        for (int ic = 0; ic < ci; ++ic) {
          for (int ky = 0; ky < kh; ++ky) {
            const int iy = oy * stride + ky - pad;
            if (iy < 0 || iy >= h) continue;
            for (int kx = 0; kx < kw; ++kx) {
              const int ix = ox * stride + kx - pad;
              if (ix < 0 || ix >= wi) continue;
              acc += x[(static_cast<std::size_t>(ic) * h + iy) * wi + ix] *
                     w[((static_cast<std::size_t>(oc) * ci + ic) * kh + ky) * kw + kx];
            }
          }
        }
        y[(static_cast<std::size_t>(oc) * oh + oy) * ow + ox] = acc;
      }
    }
  }
}

void conv2d(const float* x, const float* w, const float* b, float* y,
            int ci, int h, int wi, int co, int kh, int kw, int stride, int pad) {
  const int oh = out_size(h, kh, stride, pad);
  const int ow = out_size(wi, kw, stride, pad);
#pragma omp parallel for schedule(static) collapse(2)
  for (int oc = 0; oc < co; ++oc) {
    for (int oy = 0; oy < oh; ++oy) {
      float* yr = y + (static_cast<std::size_t>(oc) * oh + oy) * ow;
      for (int ox = 0; ox < ow; ++ox) yr[ox] = b ? b[oc] : 0.0f;
      for (int ic = 0; ic < ci; ++ic) {
        for (int ky = 0; ky < kh; ++ky) {
          const int iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= h) continue;
          const float* xr = x + (static_cast<std::size_t>(ic) * h + iy) * wi;
          const float* wr = w + ((static_cast<std::size_t>(oc) * ci + ic) * kh + ky) * kw;
          for (int kx = 0; kx < kw; ++kx) {
            const float wv = wr[kx];
            const int x0 = kx - pad;
            for (int ox = 0; ox < ow; ++ox) {
              const int ix = ox * stride + x0;
              if (ix < 0 || ix >= wi) continue;
              yr[ox] += wv * xr[ix];
            }
          }
        }
      }
    }
  }
}

void conv2d_grad_x(const float* dy, const float* w, float* dx,
                   int ci, int h, int wi, int co, int kh, int kw, int stride, int pad) {
  const int oh = out_size(h, kh, stride, pad);
  const int ow = out_size(wi, kw, stride, pad);
#pragma omp parallel for schedule(static) collapse(2)
  for (int ic = 0; ic < ci; ++ic) {
    for (int iy = 0; iy < h; ++iy) {
      float* dxr = dx + (static_cast<std::size_t>(ic) * h + iy) * wi;
      for (int ix = 0; ix < wi; ++ix) {
        float acc = 0.0f;
        for (int oc = 0; oc < co; ++oc) {
          for (int ky = 0; ky < kh; ++ky) {
            const int num_y = iy + pad - ky;
            if (num_y < 0 || num_y % stride != 0) continue;
            const int oy = num_y / stride;
            if (oy >= oh) continue;
            for (int kx = 0; kx < kw; ++kx) {
              const int num_x = ix + pad - kx;
              if (num_x < 0 || num_x % stride != 0) continue;
              const int ox = num_x / stride;
              if (ox >= ow) continue;
              acc += dy[(static_cast<std::size_t>(oc) * oh + oy) * ow + ox] *
                     w[((static_cast<std::size_t>(oc) * ci + ic) * kh + ky) * kw + kx];
            }
          }
        }
        dxr[ix] += acc;
      }
    }
  }
}

void conv2d_grad_w(const float* x, const float* dy, float* dw, float* db,
                   int ci, int h, int wi, int co, int kh, int kw, int stride, int pad) {
  const int oh = out_size(h, kh, stride, pad);
  const int ow = out_size(wi, kw, stride, pad);
#pragma omp parallel for schedule(static)
  for (int oc = 0; oc < co; ++oc) {
    const float* dyr = dy + static_cast<std::size_t>(oc) * oh * ow;
    if (db) {
      float acc = 0.0f;
      for (int i = 0; i < oh * ow; ++i) acc += dyr[i];
      db[oc] += acc;
    }
    for (int ic = 0; ic < ci; ++ic) {
      for (int ky = 0; ky < kh; ++ky) {
        for (int kx = 0; kx < kw; ++kx) {
          float acc = 0.0f;
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * stride + ky - pad;
            if (iy < 0 || iy >= h) continue;
            const float* xr = x + (static_cast<std::size_t>(ic) * h + iy) * wi;
            const float* dr = dyr + static_cast<std::size_t>(oy) * ow;
            for (int ox = 0; ox < ow; ++ox) {
              const int ix = ox * stride + kx - pad;
              if (ix < 0 || ix >= wi) continue;
              acc += xr[ix] * dr[ox];
            }
          }
          dw[((static_cast<std::size_t>(oc) * ci + ic) * kh + ky) * kw + kx] += acc;
        }
      }
    }
  }
}

}  // namespace ganerf::kernels
