#include "covnav/policy/checkpoint.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace covnav::policy {

namespace {
constexpr char kMagic[] = "COVNAVCKPT1\n";
constexpr size_t kMagicLen = sizeof(kMagic) - 1;
}  // namespace

void save_checkpoint(const std::string& path, const ParamSet& params,
                     const std::string& meta_json) {
  nlohmann::json header;
  header["arch"] = nlohmann::json::parse(params.config().to_json());
  header["version"] = params.version();
  header["param_count"] = params.count();
  header["meta"] = meta_json.empty() ? nlohmann::json::object()
                                     : nlohmann::json::parse(meta_json);
  const std::string h = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, kMagicLen);
  const uint64_t hlen = h.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.write(reinterpret_cast<const char*>(params.values().data()),
            static_cast<std::streamsize>(sizeof(double) * params.count()));
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string h(hlen, '\0');
  in.read(h.data(), static_cast<std::streamsize>(hlen));
  const auto header = nlohmann::json::parse(h);

  const ArchConfig arch = ArchConfig::from_json(header.at("arch").dump());
  ParamSet params(arch);
  const int count = header.at("param_count").get<int>();
  if (count != params.count()) {
    throw std::runtime_error("checkpoint/architecture parameter count mismatch");
  }
  in.read(reinterpret_cast<char*>(params.values().data()),
          static_cast<std::streamsize>(sizeof(double) * count));
  if (!in) throw std::runtime_error("checkpoint truncated: " + path);
  params.set_version(header.at("version").get<int>());
  return {std::move(params), header.at("meta").dump()};
}

}  // namespace covnav::policy
