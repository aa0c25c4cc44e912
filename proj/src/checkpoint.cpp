#include "gridlang/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gridlang {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

namespace {

constexpr char kMagic[8] = {'G', 'L', 'C', 'K', 'P', 'T', '0', '1'};

void write_u64(std::ostream& out, uint64_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

uint64_t read_u64(std::istream& in) {
  uint64_t value = 0;
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  return value;
}

}  // namespace

void save_tensors(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, const Tensor*>>& tensors,
                  const nlohmann::json& header) {
  nlohmann::json manifest;
  manifest["header"] = header;
  nlohmann::json entries = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, tensor] : tensors) {
    nlohmann::json entry;
    entry["name"] = name;
    entry["shape"] = tensor->shape;
    entry["offset"] = offset;
    entry["count"] = tensor->v.size();
    entries.push_back(std::move(entry));
    offset += tensor->v.size() * sizeof(double);
  }
  manifest["tensors"] = std::move(entries);
  const std::string manifest_text = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, manifest_text.size());
  out.write(manifest_text.data(), static_cast<std::streamsize>(manifest_text.size()));
  for (const auto& [name, tensor] : tensors) {
    out.write(reinterpret_cast<const char*>(tensor->v.data()),
              static_cast<std::streamsize>(tensor->v.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path.string());
}

LoadedTensors load_tensors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path.string());
  }
  const uint64_t manifest_size = read_u64(in);
  std::string manifest_text(manifest_size, '\0');
  in.read(manifest_text.data(), static_cast<std::streamsize>(manifest_size));
  if (!in) throw std::runtime_error("truncated checkpoint manifest: " + path.string());
  const nlohmann::json manifest = nlohmann::json::parse(manifest_text);

  LoadedTensors result;
  result.header = manifest.value("header", nlohmann::json::object());
  const std::streampos data_start = in.tellg();
  for (const auto& entry : manifest.at("tensors")) {
    Tensor t;
    t.shape = entry.at("shape").get<std::vector<int>>();
    const uint64_t count = entry.at("count").get<uint64_t>();
    const uint64_t offset = entry.at("offset").get<uint64_t>();
    t.v.resize(count);
    in.seekg(data_start + static_cast<std::streamoff>(offset));
    in.read(reinterpret_cast<char*>(t.v.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("truncated tensor data: " + path.string());
    result.tensors.emplace(entry.at("name").get<std::string>(), std::move(t));
  }
  return result;
}

}  // namespace gridlang
