#include "ganerf/data/image_io.hpp"

#include <opencv2/imgcodecs.hpp>
#include <stdexcept>

namespace ganerf::data {

void save_png_rgb(const std::string& path, const Tensor& image) {
  const int H = image.dim(1), W = image.dim(2);
  cv::Mat bgr(H, W, CV_8UC3);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      auto& px = bgr.at<cv::Vec3b>(y, x);
      for (int c = 0; c < 3; ++c) {
        const float v = std::min(std::max(image.at3(c, y, x), 0.0f), 1.0f);
        px[2 - c] = static_cast<std::uint8_t>(v * 255.0f + 0.5f);
      }
    }
  if (!cv::imwrite(path, bgr)) throw std::runtime_error("failed to write " + path);
}

Tensor load_png_rgb(const std::string& path) {
  cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
  if (bgr.empty()) throw std::runtime_error("failed to read " + path);
  Tensor image({3, bgr.rows, bgr.cols});
  for (int y = 0; y < bgr.rows; ++y)
    for (int x = 0; x < bgr.cols; ++x) {
      const auto& px = bgr.at<cv::Vec3b>(y, x);
      for (int c = 0; c < 3; ++c)
        image.at3(c, y, x) = static_cast<float>(px[2 - c]) / 255.0f;
    }
  return image;
}

void save_png_gray(const std::string& path, const std::vector<std::uint8_t>& values,
                   int height, int width) {
  cv::Mat gray(height, width, CV_8UC1);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      gray.at<std::uint8_t>(y, x) = values[static_cast<std::size_t>(y) * width + x];
  if (!cv::imwrite(path, gray)) throw std::runtime_error("failed to write " + path);
}

std::vector<std::uint8_t> load_png_gray(const std::string& path, int& height, int& width) {
  cv::Mat gray = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (gray.empty()) throw std::runtime_error("failed to read " + path);
  height = gray.rows;
  width = gray.cols;
  std::vector<std::uint8_t> values(static_cast<std::size_t>(height) * width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      values[static_cast<std::size_t>(y) * width + x] = gray.at<std::uint8_t>(y, x);
  return values;
}

Tensor quantize8(const Tensor& image) {
  Tensor out = image;
  for (auto& v : out.data) {
    const float c = std::min(std::max(v, 0.0f), 1.0f);
    v = static_cast<float>(static_cast<std::uint8_t>(c * 255.0f + 0.5f)) / 255.0f;
  }
  return out;
}

}  // namespace ganerf::data
