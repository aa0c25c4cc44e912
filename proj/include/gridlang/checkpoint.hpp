#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gridlang/tensor.hpp"

namespace gridlang {

// Single-file checkpoint: magic, a JSON manifest (tensor names, shapes and
// byte offsets, plus a free-form header), then raw little-endian 64-bit
// float blocks. Round trips are bit-exact.
void save_tensors(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, const Tensor*>>& tensors,
                  const nlohmann::json& header);

struct LoadedTensors {
  std::map<std::string, Tensor> tensors;
  nlohmann::json header;
};

LoadedTensors load_tensors(const std::filesystem::path& path);  // throws std::runtime_error

}  // namespace gridlang
