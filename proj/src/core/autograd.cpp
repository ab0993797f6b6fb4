#include "ganerf/core/autograd.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "ganerf/core/kernels.hpp"

namespace ganerf::ag {

Var constant(Tensor t) {
  auto n = std::make_shared<Node>();
  n->val = std::move(t);
  n->requires_grad = false;
  return n;
}

Var param(Tensor t) {
  auto n = std::make_shared<Node>();
  n->val = std::move(t);
  n->requires_grad = true;
  return n;
}

Var make_node(Tensor value, std::vector<Var> parents, std::function<void(Node&)> bw) {
  auto n = std::make_shared<Node>();
  n->val = std::move(value);
  n->parents = std::move(parents);
  for (const auto& p : n->parents)
    if (p->requires_grad) n->requires_grad = true;
  if (n->requires_grad) n->backward_fn = std::move(bw);
  return n;
}

void backward(const Var& root) {
  root->ensure_grad();
  std::fill(root->grad.data.begin(), root->grad.data.end(), 1.0f);
  // iterative post-order topo sort over grad-requiring nodes
  std::vector<Node*> order;
  std::unordered_set<Node*> seen{root.get()};
  std::vector<std::pair<Node*, std::size_t>> stack{{root.get(), 0}};
  while (!stack.empty()) {
    auto& [n, idx] = stack.back();
    if (idx < n->parents.size()) {
      Node* p = n->parents[idx].get();
      ++idx;
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn && n->requires_grad) n->backward_fn(*n);
  }
}

namespace {

void check_same_shape(const Var& a, const Var& b) {
  if (a->val.shape != b->val.shape) throw std::invalid_argument("shape mismatch");
}

Var unary_op(const Var& x, const std::function<float(float)>& f,
             const std::function<float(float, float)>& dfdx_times_g) {
  Tensor out(x->val.shape);
  const std::size_t n = out.numel();
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    out.data[i] = f(x->val.data[i]);
  return make_node(std::move(out), {x}, [x, dfdx_times_g](Node& self) {
    auto& g = x->ensure_grad();
    for (std::size_t i = 0; i < g.numel(); ++i)
      g.data[i] += dfdx_times_g(x->val.data[i], self.grad.data[i]);
  });
}

}  // namespace

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b);
  Tensor out(a->val.shape);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] = a->val.data[i] + b->val.data[i];
  return make_node(std::move(out), {a, b}, [a, b](Node& self) {
    if (a->requires_grad) {
      auto& g = a->ensure_grad();
      for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] += self.grad.data[i];
    }
    if (b->requires_grad) {
      auto& g = b->ensure_grad();
      for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] += self.grad.data[i];
    }
  });
}

Var sub(const Var& a, const Var& b) {
  check_same_shape(a, b);
  Tensor out(a->val.shape);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] = a->val.data[i] - b->val.data[i];
  return make_node(std::move(out), {a, b}, [a, b](Node& self) {
    if (a->requires_grad) {
      auto& g = a->ensure_grad();
      for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] += self.grad.data[i];
    }
    if (b->requires_grad) {
      auto& g = b->ensure_grad();
      for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] -= self.grad.data[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b);
  Tensor out(a->val.shape);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] = a->val.data[i] * b->val.data[i];
  return make_node(std::move(out), {a, b}, [a, b](Node& self) {
    if (a->requires_grad) {
      auto& g = a->ensure_grad();
      for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] += self.grad.data[i] * b->val.data[i];
    }
    if (b->requires_grad) {
      auto& g = b->ensure_grad();
      for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] += self.grad.data[i] * a->val.data[i];
    }
  });
}

Var scale(const Var& a, float s) {
  Tensor out(a->val.shape);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] = a->val.data[i] * s;
  return make_node(std::move(out), {a}, [a, s](Node& self) {
    auto& g = a->ensure_grad();
    for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] += self.grad.data[i] * s;
  });
}

Var matmul(const Var& a, const Var& b) {
  const int n = a->val.dim(0), k = a->val.dim(1);
  if (b->val.dim(0) != k) throw std::invalid_argument("matmul inner dim mismatch");
  const int m = b->val.dim(1);
  Tensor out({n, m});
  kernels::matmul(a->val.data.data(), b->val.data.data(), out.data.data(), n, k, m);
  return make_node(std::move(out), {a, b}, [a, b, n, k, m](Node& self) {
    if (a->requires_grad)
      kernels::matmul_grad_a(self.grad.data.data(), b->val.data.data(),
                             a->ensure_grad().data.data(), n, k, m);
    if (b->requires_grad)
      kernels::matmul_grad_b(a->val.data.data(), self.grad.data.data(),
                             b->ensure_grad().data.data(), n, k, m);
  });
}

Var linear(const Var& x, const Var& w, const Var& b) {
  Var y = matmul(x, w);
  const int n = y->val.dim(0), m = y->val.dim(1);
  if (b->val.numel() != static_cast<std::size_t>(m))
    throw std::invalid_argument("bias size mismatch");
  Tensor out = y->val;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) out.at2(i, j) += b->val.data[j];
  return make_node(std::move(out), {y, b}, [y, b, n, m](Node& self) {
    if (y->requires_grad) {
      auto& g = y->ensure_grad();
      for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] += self.grad.data[i];
    }
    if (b->requires_grad) {
      auto& g = b->ensure_grad();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) g.data[j] += self.grad.at2(i, j);
    }
  });
}

Var relu(const Var& x) {
  return unary_op(
      x, [](float v) { return v > 0.0f ? v : 0.0f; },
      [](float v, float g) { return v > 0.0f ? g : 0.0f; });
}

Var leaky_relu(const Var& x, float slope) {
  return unary_op(
      x, [slope](float v) { return v > 0.0f ? v : slope * v; },
      [slope](float v, float g) { return v > 0.0f ? g : slope * g; });
}

Var tanh_(const Var& x) {
  return unary_op(
      x, [](float v) { return std::tanh(v); },
      [](float v, float g) {
        const float t = std::tanh(v);
        return g * (1.0f - t * t);
      });
}

Var sigmoid_(const Var& x) {
  return unary_op(
      x, [](float v) { return 1.0f / (1.0f + std::exp(-v)); },
      [](float v, float g) {
        const float s = 1.0f / (1.0f + std::exp(-v));
        return g * s * (1.0f - s);
      });
}

Var softplus_(const Var& x) {
  return unary_op(
      x,
      [](float v) { return v > 20.0f ? v : std::log1p(std::exp(v)); },
      [](float v, float g) { return g / (1.0f + std::exp(-v)); });
}

Var conv2d(const Var& x, const Var& w, const Var& b, int stride, int pad) {
  const int ci = x->val.dim(0), h = x->val.dim(1), wi = x->val.dim(2);
  const int co = w->val.dim(0), kh = w->val.dim(2), kw = w->val.dim(3);
  if (w->val.dim(1) != ci) throw std::invalid_argument("conv2d channel mismatch");
  const int oh = (h + 2 * pad - kh) / stride + 1;
  const int ow = (wi + 2 * pad - kw) / stride + 1;
  Tensor out({co, oh, ow});
  kernels::conv2d(x->val.data.data(), w->val.data.data(),
                  b ? b->val.data.data() : nullptr, out.data.data(), ci, h, wi, co,
                  kh, kw, stride, pad);
  std::vector<Var> parents = {x, w};
  if (b) parents.push_back(b);
  return make_node(std::move(out), std::move(parents),
                   [x, w, b, ci, h, wi, co, kh, kw, stride, pad](Node& self) {
                     if (x->requires_grad)
                       kernels::conv2d_grad_x(self.grad.data.data(), w->val.data.data(),
                                              x->ensure_grad().data.data(), ci, h, wi,
                                              co, kh, kw, stride, pad);
                     if (w->requires_grad)
                       kernels::conv2d_grad_w(
                           x->val.data.data(), self.grad.data.data(),
                           w->ensure_grad().data.data(),
                           (b && b->requires_grad) ? b->ensure_grad().data.data() : nullptr,
                           ci, h, wi, co, kh, kw, stride, pad);
                   });
}

Var upsample2x(const Var& x) {
  const int c = x->val.dim(0), h = x->val.dim(1), w = x->val.dim(2);
  Tensor out({c, 2 * h, 2 * w});
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < 2 * h; ++y)
      for (int xx = 0; xx < 2 * w; ++xx)
        out.at3(ch, y, xx) = x->val.at3(ch, y / 2, xx / 2);
  return make_node(std::move(out), {x}, [x, c, h, w](Node& self) {
    auto& g = x->ensure_grad();
    for (int ch = 0; ch < c; ++ch)
      for (int y = 0; y < 2 * h; ++y)
        for (int xx = 0; xx < 2 * w; ++xx)
          g.at3(ch, y / 2, xx / 2) += self.grad.at3(ch, y, xx);
  });
}

Var instance_norm(const Var& x, const Var& gamma, const Var& beta, float eps) {
  const int c = x->val.dim(0), h = x->val.dim(1), w = x->val.dim(2);
  const int hw = h * w;
  Tensor out({c, h, w});
  std::vector<float> mean(c), inv_std(c);
  for (int ch = 0; ch < c; ++ch) {
    const float* px = x->val.data.data() + static_cast<std::size_t>(ch) * hw;
    double m = 0.0;
    for (int i = 0; i < hw; ++i) m += px[i];
    m /= hw;
    double v = 0.0;
    for (int i = 0; i < hw; ++i) v += (px[i] - m) * (px[i] - m);
    v /= hw;
    mean[ch] = static_cast<float>(m);
    inv_std[ch] = 1.0f / std::sqrt(static_cast<float>(v) + eps);
    float* po = out.data.data() + static_cast<std::size_t>(ch) * hw;
    const float ga = gamma->val.data[ch], be = beta->val.data[ch];
    for (int i = 0; i < hw; ++i)
      po[i] = (px[i] - mean[ch]) * inv_std[ch] * ga + be;
  }
  return make_node(std::move(out), {x, gamma, beta},
                   [x, gamma, beta, c, hw, mean, inv_std](Node& self) {
                     for (int ch = 0; ch < c; ++ch) {
                       const float* px = x->val.data.data() + static_cast<std::size_t>(ch) * hw;
                       const float* pg = self.grad.data.data() + static_cast<std::size_t>(ch) * hw;
                       const float ga = gamma->val.data[ch];
                       // xhat = (x - mean) * inv_std
                       double sum_g = 0.0, sum_gx = 0.0;
                       for (int i = 0; i < hw; ++i) {
                         const float xh = (px[i] - mean[ch]) * inv_std[ch];
                         sum_g += pg[i];
                         sum_gx += pg[i] * xh;
                       }
                       if (gamma->requires_grad)
                         gamma->ensure_grad().data[ch] += static_cast<float>(sum_gx);
                       if (beta->requires_grad)
                         beta->ensure_grad().data[ch] += static_cast<float>(sum_g);
                       if (x->requires_grad) {
                         float* gx = x->ensure_grad().data.data() +
                                     static_cast<std::size_t>(ch) * hw;
                         const float mg = static_cast<float>(sum_g / hw);
                         const float mgx = static_cast<float>(sum_gx / hw);
                         for (int i = 0; i < hw; ++i) {
                           const float xh = (px[i] - mean[ch]) * inv_std[ch];
                           gx[i] += ga * inv_std[ch] * (pg[i] - mg - xh * mgx);
                         }
                       }
                     }
                   });
}

Var concat_ch(const std::vector<Var>& xs) {
  if (xs.empty()) throw std::invalid_argument("concat of nothing");
  const int h = xs[0]->val.dim(1), w = xs[0]->val.dim(2);
  int c = 0;
  for (const auto& x : xs) {
    if (x->val.dim(1) != h || x->val.dim(2) != w)
      throw std::invalid_argument("concat spatial mismatch");
    c += x->val.dim(0);
  }
  Tensor out({c, h, w});
  std::size_t off = 0;
  for (const auto& x : xs) {
    std::copy(x->val.data.begin(), x->val.data.end(), out.data.begin() + off);
    off += x->val.numel();
  }
  return make_node(std::move(out), xs, [xs](Node& self) {
    std::size_t off = 0;
    for (const auto& x : xs) {
      if (x->requires_grad) {
        auto& g = x->ensure_grad();
        for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] += self.grad.data[off + i];
      }
      off += x->val.numel();
    }
  });
}

Var slice_ch(const Var& x, int from, int count) {
  const int c = x->val.dim(0), h = x->val.dim(1), w = x->val.dim(2);
  if (from < 0 || from + count > c) throw std::invalid_argument("slice out of range");
  Tensor out({count, h, w});
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  std::copy(x->val.data.begin() + from * hw, x->val.data.begin() + (from + count) * hw,
            out.data.begin());
  return make_node(std::move(out), {x}, [x, from, hw](Node& self) {
    auto& g = x->ensure_grad();
    for (std::size_t i = 0; i < self.grad.numel(); ++i)
      g.data[from * hw + i] += self.grad.data[i];
  });
}

Var softmax_ch(const Var& x) {
  const int c = x->val.dim(0), h = x->val.dim(1), w = x->val.dim(2);
  const int hw = h * w;
  Tensor out({c, h, w});
  for (int i = 0; i < hw; ++i) {
    float mx = -1e30f;
    for (int ch = 0; ch < c; ++ch) mx = std::max(mx, x->val.data[ch * hw + i]);
    float denom = 0.0f;
    for (int ch = 0; ch < c; ++ch) {
      const float e = std::exp(x->val.data[ch * hw + i] - mx);
      out.data[ch * hw + i] = e;
      denom += e;
    }
    for (int ch = 0; ch < c; ++ch) out.data[ch * hw + i] /= denom;
  }
  return make_node(std::move(out), {x}, [x, c, hw](Node& self) {
    auto& g = x->ensure_grad();
    for (int i = 0; i < hw; ++i) {
      float dot = 0.0f;
      for (int ch = 0; ch < c; ++ch)
        dot += self.grad.data[ch * hw + i] * self.val.data[ch * hw + i];
      for (int ch = 0; ch < c; ++ch) {
        const float y = self.val.data[ch * hw + i];
        g.data[ch * hw + i] += y * (self.grad.data[ch * hw + i] - dot);
      }
    }
  });
}

Var grid_sample(const Var& map, const std::vector<float>& coords_xy) {
  const int c = map->val.dim(0), h = map->val.dim(1), w = map->val.dim(2);
  const int n = static_cast<int>(coords_xy.size() / 2);
  Tensor out({n, c});
  // per-row corner indices and weights, reused in backward
  auto idx = std::make_shared<std::vector<int>>(static_cast<std::size_t>(n) * 4);
  auto wts = std::make_shared<std::vector<float>>(static_cast<std::size_t>(n) * 4);
  for (int i = 0; i < n; ++i) {
    float fx = coords_xy[2 * i], fy = coords_xy[2 * i + 1];
    fx = std::min(std::max(fx, 0.0f), static_cast<float>(w - 1));
    fy = std::min(std::max(fy, 0.0f), static_cast<float>(h - 1));
    const int x0 = std::min(static_cast<int>(fx), w - 2 >= 0 ? w - 2 : 0);
    const int y0 = std::min(static_cast<int>(fy), h - 2 >= 0 ? h - 2 : 0);
    const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
    const float ax = fx - x0, ay = fy - y0;
    (*idx)[4 * i + 0] = y0 * w + x0;
    (*idx)[4 * i + 1] = y0 * w + x1;
    (*idx)[4 * i + 2] = y1 * w + x0;
    (*idx)[4 * i + 3] = y1 * w + x1;
    (*wts)[4 * i + 0] = (1 - ax) * (1 - ay);
    (*wts)[4 * i + 1] = ax * (1 - ay);
    (*wts)[4 * i + 2] = (1 - ax) * ay;
    (*wts)[4 * i + 3] = ax * ay;
    for (int ch = 0; ch < c; ++ch) {
      const float* plane = map->val.data.data() + static_cast<std::size_t>(ch) * h * w;
      float acc = 0.0f;
      for (int k = 0; k < 4; ++k) acc += (*wts)[4 * i + k] * plane[(*idx)[4 * i + k]];
      out.at2(i, ch) = acc;
    }
  }
  return make_node(std::move(out), {map}, [map, idx, wts, c, h, w, n](Node& self) {
    auto& g = map->ensure_grad();
    for (int i = 0; i < n; ++i)
      for (int ch = 0; ch < c; ++ch) {
        float* plane = g.data.data() + static_cast<std::size_t>(ch) * h * w;
        const float gv = self.grad.at2(i, ch);
        for (int k = 0; k < 4; ++k) plane[(*idx)[4 * i + k]] += gv * (*wts)[4 * i + k];
      }
  });
}

Var add_const(const Var& a, float c) {
  Tensor out(a->val.shape);
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] = a->val.data[i] + c;
  return make_node(std::move(out), {a}, [a](Node& self) {
    auto& g = a->ensure_grad();
    for (std::size_t i = 0; i < g.numel(); ++i) g.data[i] += self.grad.data[i];
  });
}

Var concat_cols(const std::vector<Var>& xs) {
  if (xs.empty()) throw std::invalid_argument("concat of nothing");
  const int n = xs[0]->val.dim(0);
  int c = 0;
  for (const auto& x : xs) {
    if (x->val.dim(0) != n) throw std::invalid_argument("concat_cols row mismatch");
    c += x->val.dim(1);
  }
  Tensor out({n, c});
  int off = 0;
  for (const auto& x : xs) {
    const int xc = x->val.dim(1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < xc; ++j) out.at2(i, off + j) = x->val.at2(i, j);
    off += xc;
  }
  return make_node(std::move(out), xs, [xs, n](Node& self) {
    int off = 0;
    for (const auto& x : xs) {
      const int xc = x->val.dim(1);
      if (x->requires_grad) {
        auto& g = x->ensure_grad();
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < xc; ++j) g.at2(i, j) += self.grad.at2(i, off + j);
      }
      off += xc;
    }
  });
}

Var slice_cols(const Var& x, int from, int count) {
  const int n = x->val.dim(0), c = x->val.dim(1);
  if (from < 0 || from + count > c) throw std::invalid_argument("slice_cols out of range");
  Tensor out({n, count});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < count; ++j) out.at2(i, j) = x->val.at2(i, from + j);
  return make_node(std::move(out), {x}, [x, from, n, count](Node& self) {
    auto& g = x->ensure_grad();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < count; ++j) g.at2(i, from + j) += self.grad.at2(i, j);
  });
}

Var interleave_rows(const Var& a, const Var& b, const std::vector<std::uint8_t>& pick) {
  const int c = a->val.dim(1);
  if (b->val.dim(1) != c) throw std::invalid_argument("interleave_rows column mismatch");
  const int n = static_cast<int>(pick.size());
  Tensor out({n, c});
  auto sel = std::make_shared<std::vector<std::uint8_t>>(pick);
  int ia = 0, ib = 0;
  for (int i = 0; i < n; ++i) {
    const Var& src = pick[i] ? b : a;
    int& idx = pick[i] ? ib : ia;
    for (int j = 0; j < c; ++j) out.at2(i, j) = src->val.at2(idx, j);
    ++idx;
  }
  if (ia != a->val.dim(0) || ib != b->val.dim(0))
    throw std::invalid_argument("interleave_rows row-count mismatch");
  return make_node(std::move(out), {a, b}, [a, b, sel, c](Node& self) {
    int ia = 0, ib = 0;
    for (int i = 0; i < static_cast<int>(sel->size()); ++i) {
      const Var& src = (*sel)[i] ? b : a;
      int& idx = (*sel)[i] ? ib : ia;
      if (src->requires_grad) {
        auto& g = src->ensure_grad();
        for (int j = 0; j < c; ++j) g.at2(idx, j) += self.grad.at2(i, j);
      }
      ++idx;
    }
  });
}

Var scatter_rows_to_image(const Var& x, const std::vector<int>& pixels, int h, int w) {
  const int n = x->val.dim(0), c = x->val.dim(1);
  if (static_cast<int>(pixels.size()) != n)
    throw std::invalid_argument("scatter pixel count mismatch");
  Tensor out({c, h, w});
  auto pix = std::make_shared<std::vector<int>>(pixels);
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < c; ++j) out.data[j * hw + (*pix)[i]] = x->val.at2(i, j);
  return make_node(std::move(out), {x}, [x, pix, c, hw, n](Node& self) {
    auto& g = x->ensure_grad();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < c; ++j) g.at2(i, j) += self.grad.data[j * hw + (*pix)[i]];
  });
}

Var broadcast_ch(const Var& s, int from, int count, int h, int w) {
  Tensor out({count, h, w});
  for (int c = 0; c < count; ++c) {
    const float v = s->val.data.at(static_cast<std::size_t>(from + c));
    std::fill_n(out.data.begin() + static_cast<std::size_t>(c) * h * w,
                static_cast<std::size_t>(h) * w, v);
  }
  return make_node(std::move(out), {s}, [s, from, count, h, w](Node& self) {
    if (!s->requires_grad) return;
    auto& g = s->ensure_grad();
    for (int c = 0; c < count; ++c) {
      float acc = 0.0f;
      const float* p = self.grad.data.data() + static_cast<std::size_t>(c) * h * w;
      for (int i = 0; i < h * w; ++i) acc += p[i];
      g.data[static_cast<std::size_t>(from + c)] += acc;
    }
  });
}

Var repeat_ch(const Var& x, int n) {
  if (x->val.dim(0) != 1) throw std::invalid_argument("repeat_ch expects one channel");
  const int h = x->val.dim(1), w = x->val.dim(2);
  Tensor out({n, h, w});
  for (int c = 0; c < n; ++c)
    std::copy(x->val.data.begin(), x->val.data.end(),
              out.data.begin() + static_cast<std::size_t>(c) * h * w);
  return make_node(std::move(out), {x}, [x, n, h, w](Node& self) {
    if (!x->requires_grad) return;
    auto& g = x->ensure_grad();
    for (int c = 0; c < n; ++c) {
      const float* p = self.grad.data.data() + static_cast<std::size_t>(c) * h * w;
      for (int i = 0; i < h * w; ++i) g.data[static_cast<std::size_t>(i)] += p[i];
    }
  });
}

Var mean_abs_diff(const Var& a, const Tensor& target) {
  if (a->val.shape != target.shape) throw std::invalid_argument("mean_abs_diff shape mismatch");
  const std::size_t n = a->val.numel();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a->val.data[i] - target.data[i]);
  Tensor out({1});
  out.data[0] = static_cast<float>(acc / static_cast<double>(n));
  auto tgt = std::make_shared<Tensor>(target);
  return make_node(std::move(out), {a}, [a, tgt, n](Node& self) {
    auto& g = a->ensure_grad();
    const float s = self.grad.data[0] / static_cast<float>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const float d = a->val.data[i] - tgt->data[i];
      g.data[i] += d > 0.0f ? s : (d < 0.0f ? -s : 0.0f);
    }
  });
}

Var mean_sq(const Var& a) {
  const std::size_t n = a->val.numel();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a->val.data[i]) * a->val.data[i];
  Tensor out({1});
  out.data[0] = static_cast<float>(acc / static_cast<double>(n));
  return make_node(std::move(out), {a}, [a, n](Node& self) {
    auto& g = a->ensure_grad();
    const float s = self.grad.data[0] * 2.0f / static_cast<float>(n);
    for (std::size_t i = 0; i < n; ++i) g.data[i] += s * a->val.data[i];
  });
}

Var mean_sq_diff(const Var& a, const Tensor& target) {
  if (a->val.shape != target.shape) throw std::invalid_argument("mean_sq_diff shape mismatch");
  const std::size_t n = a->val.numel();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a->val.data[i] - target.data[i];
    acc += d * d;
  }
  Tensor out({1});
  out.data[0] = static_cast<float>(acc / static_cast<double>(n));
  auto tgt = std::make_shared<Tensor>(target);
  return make_node(std::move(out), {a}, [a, tgt, n](Node& self) {
    auto& g = a->ensure_grad();
    const float s = self.grad.data[0] * 2.0f / static_cast<float>(n);
    for (std::size_t i = 0; i < n; ++i) g.data[i] += s * (a->val.data[i] - tgt->data[i]);
  });
}

Var add_scalars(const std::vector<Var>& terms, const std::vector<float>& weights) {
  if (terms.size() != weights.size()) throw std::invalid_argument("terms/weights mismatch");
  Tensor out({1});
  double acc = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i)
    acc += static_cast<double>(weights[i]) * terms[i]->val.data.at(0);
  out.data[0] = static_cast<float>(acc);
  return make_node(std::move(out), terms, [terms, weights](Node& self) {
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (terms[i]->requires_grad)
        terms[i]->ensure_grad().data[0] += self.grad.data[0] * weights[i];
  });
}

}  // namespace ganerf::ag
