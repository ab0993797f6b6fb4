#include "ganerf/core/tensor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace ganerf {

namespace {
constexpr std::uint32_t kMagic = 0x31544E47;  // 'GNT1'
constexpr std::uint32_t kDtypeF32 = 0;
}  // namespace

bool Tensor::all_finite() const {
  for (float v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

void save_tensor(const std::string& path, const Tensor& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  const std::uint32_t header[4] = {kMagic, kDtypeF32,
                                   static_cast<std::uint32_t>(t.shape.size()), 0};
  f.write(reinterpret_cast<const char*>(header), sizeof(header));
  for (int d : t.shape) {
    const std::uint32_t u = static_cast<std::uint32_t>(d);
    f.write(reinterpret_cast<const char*>(&u), 4);
  }
  f.write(reinterpret_cast<const char*>(t.data.data()),
          static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  if (!f) throw std::runtime_error("write failed: " + path);
}

Tensor load_tensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for read: " + path);
  std::uint32_t header[4];
  f.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!f || header[0] != kMagic) throw std::runtime_error("bad tensor magic: " + path);
  if (header[1] != kDtypeF32) throw std::runtime_error("unsupported dtype: " + path);
  std::vector<int> shape(header[2]);
  for (auto& d : shape) {
    std::uint32_t u;
    f.read(reinterpret_cast<char*>(&u), 4);
    d = static_cast<int>(u);
  }
  Tensor t(shape);
  f.read(reinterpret_cast<char*>(t.data.data()),
         static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  if (!f) throw std::runtime_error("truncated tensor file: " + path);
  return t;
}

}  // namespace ganerf
