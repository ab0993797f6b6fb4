#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganerf/core/tensor.hpp"

namespace ganerf::data {

// Lossless PNG IO. Images are [3, H, W] float tensors in [0,1]; values
// are quantized to 8 bits on write, so quantize-then-write round-trips
// exactly.
void save_png_rgb(const std::string& path, const Tensor& image);
Tensor load_png_rgb(const std::string& path);

void save_png_gray(const std::string& path, const std::vector<std::uint8_t>& values,
                   int height, int width);
std::vector<std::uint8_t> load_png_gray(const std::string& path, int& height, int& width);

// snap a float image to the 8-bit grid the PNG will store
Tensor quantize8(const Tensor& image);

}  // namespace ganerf::data
