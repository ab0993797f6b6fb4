#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ganerf/core/tensor.hpp"

namespace ganerf::ag {

// Dynamic reverse-mode tape. Each op returns a new Node holding the
// forward value and a closure that scatters this node's grad into its
// parents' grads.
struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
  Tensor val;
  Tensor grad;
  bool requires_grad = false;
  std::vector<Var> parents;
  std::function<void(Node&)> backward_fn;

  Tensor& ensure_grad() {
    if (grad.shape != val.shape) grad = Tensor::zeros(val.shape);
    return grad;
  }
};

Var constant(Tensor t);
Var param(Tensor t);
Var make_node(Tensor value, std::vector<Var> parents, std::function<void(Node&)> bw);

// Seeds the output grad with ones and propagates through the tape.
void backward(const Var& root);

inline float scalar(const Var& v) { return v->val.data.at(0); }

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, float s);

Var matmul(const Var& a, const Var& b);
Var linear(const Var& x, const Var& w, const Var& b);

Var relu(const Var& x);
Var leaky_relu(const Var& x, float slope = 0.2f);
Var tanh_(const Var& x);
Var sigmoid_(const Var& x);
// log(1+exp(x)), numerically stable
Var softplus_(const Var& x);

Var conv2d(const Var& x, const Var& w, const Var& b, int stride, int pad);
Var upsample2x(const Var& x);
Var instance_norm(const Var& x, const Var& gamma, const Var& beta, float eps = 1e-5f);
Var concat_ch(const std::vector<Var>& xs);
Var slice_ch(const Var& x, int from, int count);
// softmax across channels of a CHW tensor (used for the 2-channel weight map)
Var softmax_ch(const Var& x);

// Bilinear read of a CHW map at fixed texel-space coordinates (x, y per
// row); differentiable w.r.t. the map values only. Coordinates outside
// the map are clamped to the border.
Var grid_sample(const Var& map, const std::vector<float>& coords_xy);

Var add_const(const Var& a, float c);
// concatenate [N, Ci] blocks along the column axis
Var concat_cols(const std::vector<Var>& xs);
Var slice_cols(const Var& x, int from, int count);
// assemble [N, C] rows from two row sources: rows with pick[i] == 0 come
// from a's next row, pick[i] == 1 from b's next row (order-preserving)
Var interleave_rows(const Var& a, const Var& b, const std::vector<std::uint8_t>& pick);
// place rows of x [N, C] into a [C, H, W] image at the given pixel
// indices (row-major), zeros elsewhere
Var scatter_rows_to_image(const Var& x, const std::vector<int>& pixels, int h, int w);

// [count, h, w] image whose channel j is the constant s[from + j]
Var broadcast_ch(const Var& s, int from, int count, int h, int w);
// repeat a [1, H, W] map across n channels
Var repeat_ch(const Var& x, int n);

Var mean_abs_diff(const Var& a, const Tensor& target);
Var mean_sq(const Var& a);
Var mean_sq_diff(const Var& a, const Tensor& target);
Var add_scalars(const std::vector<Var>& terms, const std::vector<float>& weights);

}  // namespace ganerf::ag
