#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ganerf/core/nn.hpp"
#include "ganerf/core/tensor.hpp"

namespace ganerf {

// Name-indexed tensor container used for all checkpoints.
struct Checkpoint {
  std::map<std::string, Tensor> tensors;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);

  static Checkpoint from_params(const nn::ParamMap& pm);
  // copies stored tensors into matching parameters; throws on missing or
  // shape-mismatched entries
  void into_params(const nn::ParamMap& pm) const;
};

// FNV-1a over the raw bytes of every parameter, in registration order.
std::uint64_t param_checksum(const nn::ParamMap& pm);

}  // namespace ganerf
