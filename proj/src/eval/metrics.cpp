#include "ganerf/eval/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ganerf::eval {

float psnr(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape) throw std::invalid_argument("psnr shape mismatch");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.data.size());
  if (mse <= 0.0) return 99.0f;
  return std::min(99.0f, static_cast<float>(-10.0 * std::log10(mse)));
}

namespace {

std::vector<float> gaussian_window(int half, float sigma) {
  std::vector<float> w(static_cast<std::size_t>(2 * half + 1));
  float sum = 0.0f;
  for (int i = -half; i <= half; ++i) {
    w[static_cast<std::size_t>(i + half)] = std::exp(-0.5f * i * i / (sigma * sigma));
    sum += w[static_cast<std::size_t>(i + half)];
  }
  for (float& v : w) v /= sum;
  return w;
}

}  // namespace

float ssim(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape || a.shape.size() != 3)
    throw std::invalid_argument("ssim expects matching [C,H,W] tensors");
  const int c = a.dim(0), h = a.dim(1), w = a.dim(2);
  const int half = 5;
  const std::vector<float> win = gaussian_window(half, 1.5f);
  const float c1 = 0.01f * 0.01f, c2 = 0.03f * 0.03f;
  double total = 0.0;
  for (int ch = 0; ch < c; ++ch) {
    const float* pa = a.data.data() + static_cast<std::size_t>(ch) * h * w;
    const float* pb = b.data.data() + static_cast<std::size_t>(ch) * h * w;
    double acc = 0.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double wsum = 0, ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
        for (int dy = -half; dy <= half; ++dy) {
          const int yy = y + dy;
          if (yy < 0 || yy >= h) continue;
          for (int dx = -half; dx <= half; ++dx) {
            const int xx = x + dx;
            if (xx < 0 || xx >= w) continue;
            const double wt = static_cast<double>(win[static_cast<std::size_t>(dy + half)]) *
                              win[static_cast<std::size_t>(dx + half)];
            const double va = pa[yy * w + xx], vb = pb[yy * w + xx];
            wsum += wt;
            ma += wt * va;
            mb += wt * vb;
            saa += wt * va * va;
            sbb += wt * vb * vb;
            sab += wt * va * vb;
          }
        }
        ma /= wsum;
        mb /= wsum;
        const double va = saa / wsum - ma * ma;
        const double vb = sbb / wsum - mb * mb;
        const double cov = sab / wsum - ma * mb;
        acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
      }
    total += acc / (static_cast<double>(h) * w);
  }
  return static_cast<float>(total / c);
}

float perceptual(const train::PerceptualExtractor& ex, const Tensor& a, const Tensor& b) {
  return train::perceptual_distance(ex, a, b);
}

namespace {

// channel-mean grayscale
std::vector<float> to_gray(const Tensor& img, int& h, int& w) {
  const int c = img.dim(0);
  h = img.dim(1);
  w = img.dim(2);
  std::vector<float> g(static_cast<std::size_t>(h) * w, 0.0f);
  for (int ch = 0; ch < c; ++ch) {
    const float* p = img.data.data() + static_cast<std::size_t>(ch) * h * w;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += p[i] / c;
  }
  return g;
}

std::vector<float> downsample2(const std::vector<float>& src, int h, int w, int& oh, int& ow) {
  oh = h / 2;
  ow = w / 2;
  std::vector<float> dst(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      dst[static_cast<std::size_t>(y) * ow + x] =
          0.25f * (src[static_cast<std::size_t>(2 * y) * w + 2 * x] +
                   src[static_cast<std::size_t>(2 * y) * w + 2 * x + 1] +
                   src[static_cast<std::size_t>(2 * y + 1) * w + 2 * x] +
                   src[static_cast<std::size_t>(2 * y + 1) * w + 2 * x + 1]);
  return dst;
}

float sad(const std::vector<float>& a, const std::vector<float>& b, int h, int w, int ax, int ay,
          int bx, int by, int half) {
  float acc = 0.0f;
  for (int dy = -half; dy <= half; ++dy)
    for (int dx = -half; dx <= half; ++dx) {
      const int ya = std::min(std::max(ay + dy, 0), h - 1);
      const int xa = std::min(std::max(ax + dx, 0), w - 1);
      const int yb = std::min(std::max(by + dy, 0), h - 1);
      const int xb = std::min(std::max(bx + dx, 0), w - 1);
      acc += std::fabs(a[static_cast<std::size_t>(ya) * w + xa] -
                       b[static_cast<std::size_t>(yb) * w + xb]);
    }
  return acc;
}

}  // namespace

Tensor FlowEstimator::flow(const Tensor& a, const Tensor& b) const {
  if (a.shape != b.shape) throw std::invalid_argument("flow shape mismatch");
  int h, w;
  const std::vector<float> ga = to_gray(a, h, w);
  const std::vector<float> gb = to_gray(b, h, w);

  std::vector<std::vector<float>> pa{ga}, pb{gb};
  std::vector<int> ph{h}, pw{w};
  for (int l = 1; l < levels; ++l) {
    int oh, ow;
    pa.push_back(downsample2(pa.back(), ph.back(), pw.back(), oh, ow));
    pb.push_back(downsample2(pb.back(), ph.back(), pw.back(), oh, ow));
    ph.push_back(oh);
    pw.push_back(ow);
    if (oh < 2 * block + 2 || ow < 2 * block + 2) break;
  }

  const int top = static_cast<int>(pa.size()) - 1;
  std::vector<float> fx(static_cast<std::size_t>(ph[static_cast<std::size_t>(top)]) *
                            pw[static_cast<std::size_t>(top)],
                        0.0f);
  std::vector<float> fy = fx;
  for (int l = top; l >= 0; --l) {
    const int lh = ph[static_cast<std::size_t>(l)], lw = pw[static_cast<std::size_t>(l)];
    const auto& ia = pa[static_cast<std::size_t>(l)];
    const auto& ib = pb[static_cast<std::size_t>(l)];
    std::vector<float> nfx(static_cast<std::size_t>(lh) * lw), nfy(nfx.size());
#pragma omp parallel for schedule(static)
    for (int y = 0; y < lh; ++y)
      for (int x = 0; x < lw; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * lw + x;
        const int px = static_cast<int>(std::lround(fx[i]));
        const int py = static_cast<int>(std::lround(fy[i]));
        int best_dx = 0, best_dy = 0;
        // seed with the upsampled estimate so ties keep it
        float best = sad(ia, ib, lh, lw, x, y, x + px, y + py, block);
        for (int dy = -radius; dy <= radius; ++dy)
          for (int dx = -radius; dx <= radius; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const float cost = sad(ia, ib, lh, lw, x, y, x + px + dx, y + py + dy, block);
            if (cost < best - 1e-6f) {
              best = cost;
              best_dx = dx;
              best_dy = dy;
            }
          }
        nfx[i] = static_cast<float>(px + best_dx);
        nfy[i] = static_cast<float>(py + best_dy);
      }
    fx = std::move(nfx);
    fy = std::move(nfy);
    if (l > 0) {
      // upsample flow to the next finer level, doubling magnitudes
      const int uh = ph[static_cast<std::size_t>(l - 1)], uw = pw[static_cast<std::size_t>(l - 1)];
      std::vector<float> ufx(static_cast<std::size_t>(uh) * uw), ufy(ufx.size());
      for (int y = 0; y < uh; ++y)
        for (int x = 0; x < uw; ++x) {
          const int sy = std::min(y / 2, lh - 1), sx = std::min(x / 2, lw - 1);
          ufx[static_cast<std::size_t>(y) * uw + x] = 2 * fx[static_cast<std::size_t>(sy) * lw + sx];
          ufy[static_cast<std::size_t>(y) * uw + x] = 2 * fy[static_cast<std::size_t>(sy) * lw + sx];
        }
      fx = std::move(ufx);
      fy = std::move(ufy);
    }
  }

  Tensor out({2, h, w});
  std::copy(fx.begin(), fx.end(), out.data.begin());
  std::copy(fy.begin(), fy.end(), out.data.begin() + static_cast<std::ptrdiff_t>(fx.size()));
  return out;
}

float tof(const std::vector<Tensor>& video_a, const std::vector<Tensor>& video_b,
          const FlowEstimator& fe) {
  if (video_a.size() != video_b.size()) throw std::invalid_argument("tof length mismatch");
  if (video_a.size() < 2) throw std::invalid_argument("tof needs at least two frames");
  double acc = 0.0;
  for (std::size_t t = 0; t + 1 < video_a.size(); ++t) {
    const Tensor fa = fe.flow(video_a[t], video_a[t + 1]);
    const Tensor fb = fe.flow(video_b[t], video_b[t + 1]);
    double d = 0.0;
    for (std::size_t i = 0; i < fa.data.size(); ++i)
      d += std::fabs(static_cast<double>(fa.data[i]) - fb.data[i]);
    acc += d / static_cast<double>(fa.data.size());
  }
  return static_cast<float>(acc / static_cast<double>(video_a.size() - 1));
}

}  // namespace ganerf::eval
