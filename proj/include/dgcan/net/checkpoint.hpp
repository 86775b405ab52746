#pragma once

#include <nlohmann/json.hpp>

#include <cstring>
#include <fstream>

#include "dgcan/net/layers.hpp"

namespace dgcan::net {

// Binary archive: magic, version, JSON header (tensor directory + caller
// metadata), then raw little-endian float32 data in directory order.
inline constexpr char kCheckpointMagic[4] = {'D', 'G', 'C', 'K'};

template <class T>
void save_checkpoint(const std::string& path, const ParamList<T>& params,
                     const nlohmann::json& meta) {
  nlohmann::json header;
  header["meta"] = meta;
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& [name, p] : params)
    tensors.push_back({{"name", name}, {"shape", p->value.shape()}});
  header["tensors"] = tensors;
  const std::string htext = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kCheckpointMagic, 4);
  const std::uint32_t version = 1;
  const std::uint64_t hlen = htext.size();
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  std::vector<float> buf;
  for (const auto& [name, p] : params) {
    buf.resize(static_cast<std::size_t>(p->value.size()));
    for (std::int64_t i = 0; i < p->value.size(); ++i)
      buf[static_cast<std::size_t>(i)] = static_cast<float>(p->value[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

// Loads into an existing parameter list; every name and shape must match.
template <class T>
nlohmann::json load_checkpoint(const std::string& path, ParamList<T>& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t hlen = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0 || version != 1)
    throw std::runtime_error("not a checkpoint file: " + path);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  const nlohmann::json header = nlohmann::json::parse(htext);

  const auto& tensors = header.at("tensors");
  if (tensors.size() != params.size())
    throw std::runtime_error("checkpoint: parameter count mismatch");
  std::vector<float> buf;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& entry = tensors[i];
    auto& [name, p] = params[i];
    if (entry.at("name").get<std::string>() != name)
      throw std::runtime_error("checkpoint: parameter name mismatch at " + name);
    const auto shape = entry.at("shape").get<std::vector<int>>();
    if (shape != p->value.shape())
      throw std::runtime_error("checkpoint: shape mismatch for " + name);
    buf.resize(static_cast<std::size_t>(p->value.size()));
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) throw std::runtime_error("checkpoint: truncated data for " + name);
    for (std::int64_t j = 0; j < p->value.size(); ++j)
      p->value[j] = static_cast<T>(buf[static_cast<std::size_t>(j)]);
  }
  return header.at("meta");
}

}  // namespace dgcan::net
