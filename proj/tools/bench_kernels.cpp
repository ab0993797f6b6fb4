#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "ganerf/core/kernels.hpp"

using namespace ganerf;
using clk = std::chrono::steady_clock;

namespace {

std::vector<float> random_buf(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (float& x : v) x = u(rng);
  return v;
}

template <typename F>
double time_ms(F&& f, int reps) {
  const auto t0 = clk::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double, std::milli>(clk::now() - t0).count() / reps;
}

float max_abs_diff(const std::vector<float>& a, const std::vector<float>& b) {
  float m = 0.0f;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

int main() {
  std::mt19937 rng(3);

  {
    const int n = 256, k = 256, m = 256;
    const auto a = random_buf(static_cast<std::size_t>(n) * k, rng);
    const auto b = random_buf(static_cast<std::size_t>(k) * m, rng);
    std::vector<float> out_par(static_cast<std::size_t>(n) * m), out_ref(out_par.size());
    const double t_par =
        time_ms([&] { kernels::matmul(a.data(), b.data(), out_par.data(), n, k, m); }, 10);
    const double t_ref =
        time_ms([&] { kernels::matmul_ref(a.data(), b.data(), out_ref.data(), n, k, m); }, 10);
    std::printf("matmul %dx%dx%d: parallel %.2f ms, reference %.2f ms, max|diff| %g\n", n, k, m,
                t_par, t_ref, max_abs_diff(out_par, out_ref));
  }
  {
    const int ci = 16, h = 128, w = 128, co = 32, kk = 3;
    const auto x = random_buf(static_cast<std::size_t>(ci) * h * w, rng);
    const auto wt = random_buf(static_cast<std::size_t>(co) * ci * kk * kk, rng);
    const auto bias = random_buf(co, rng);
    std::vector<float> out_par(static_cast<std::size_t>(co) * h * w), out_ref(out_par.size());
    const double t_par = time_ms(
        [&] {
          kernels::conv2d(x.data(), wt.data(), bias.data(), out_par.data(), ci, h, w, co, kk, kk,
                          1, 1);
        },
        5);
    const double t_ref = time_ms(
        [&] {
          kernels::conv2d_ref(x.data(), wt.data(), bias.data(), out_ref.data(), ci, h, w, co, kk,
                              kk, 1, 1);
        },
        5);
    std::printf("conv2d %d->%d @%dx%d: parallel %.2f ms, reference %.2f ms, max|diff| %g\n", ci,
                co, h, w, t_par, t_ref, max_abs_diff(out_par, out_ref));
  }
  return 0;
}
