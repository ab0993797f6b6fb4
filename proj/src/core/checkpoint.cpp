#include "ganerf/core/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ganerf {

namespace {
constexpr std::uint32_t kMagic = 0x504B4347;  // 'GCKP'

void write_u32(std::ofstream& f, std::uint32_t v) {
  f.write(reinterpret_cast<const char*>(&v), 4);
}
std::uint32_t read_u32(std::ifstream& f) {
  std::uint32_t v = 0;
  f.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
}  // namespace

void Checkpoint::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  write_u32(f, kMagic);
  write_u32(f, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    write_u32(f, static_cast<std::uint32_t>(name.size()));
    f.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(f, static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) write_u32(f, static_cast<std::uint32_t>(d));
    f.write(reinterpret_cast<const char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for read: " + path);
  if (read_u32(f) != kMagic) throw std::runtime_error("bad checkpoint magic: " + path);
  const std::uint32_t count = read_u32(f);
  Checkpoint ckpt;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = read_u32(f);
    std::string name(len, '\0');
    f.read(name.data(), len);
    const std::uint32_t rank = read_u32(f);
    std::vector<int> shape(rank);
    for (auto& d : shape) d = static_cast<int>(read_u32(f));
    Tensor t(shape);
    f.read(reinterpret_cast<char*>(t.data.data()),
           static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    if (!f) throw std::runtime_error("truncated checkpoint: " + path);
    ckpt.tensors.emplace(std::move(name), std::move(t));
  }
  return ckpt;
}

Checkpoint Checkpoint::from_params(const nn::ParamMap& pm) {
  Checkpoint ckpt;
  for (const auto& [name, v] : pm.items) ckpt.tensors[name] = v->val;
  return ckpt;
}

void Checkpoint::into_params(const nn::ParamMap& pm) const {
  for (const auto& [name, v] : pm.items) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw std::runtime_error("checkpoint missing tensor: " + name);
    if (it->second.shape != v->val.shape)
      throw std::runtime_error("checkpoint shape mismatch: " + name);
    v->val.data = it->second.data;
  }
}

std::uint64_t param_checksum(const nn::ParamMap& pm) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& [name, v] : pm.items) {
    mix(name.data(), name.size());
    mix(v->val.data.data(), v->val.data.size() * sizeof(float));
  }
  return h;
}

}  // namespace ganerf
