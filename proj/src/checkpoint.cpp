#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "meqc/ppo.hpp"

namespace meqc {

namespace {

constexpr const char* kMagic = "MEQC-CHECKPOINT";
constexpr int kCheckpointVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint payload is little-endian");

}  // namespace

void save_checkpoint(const std::string& path, std::span<const HybridPolicy> agents) {
  nlohmann::json header;
  header["schema_version"] = kCheckpointVersion;
  header["scalar"] = "f64le";
  nlohmann::json list = nlohmann::json::array();
  for (const auto& agent : agents) {
    nlohmann::json nets = nlohmann::json::array();
    const auto ptrs = agent.networks();
    for (std::size_t k = 0; k < ptrs.size(); ++k) {
      nets.push_back({{"name", kNetworkNames[k]},
                      {"widths", ptrs[k]->widths()},
                      {"activation", ptrs[k]->activation() == Activation::kTanh ? "tanh" : "identity"},
                      {"count", ptrs[k]->num_params()}});
    }
    list.push_back(std::move(nets));
  }
  header["agents"] = std::move(list);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open checkpoint " + path + " for writing");
  out << kMagic << ' ' << kCheckpointVersion << '\n' << header.dump() << '\n';
  for (const auto& agent : agents)
    for (const Net* net : agent.networks())
      out.write(reinterpret_cast<const char*>(net->params().data()),
                static_cast<std::streamsize>(net->num_params() * sizeof(double)));
  if (!out) throw Error("write to checkpoint " + path + " failed");
}

std::vector<HybridPolicy> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path);
  std::string line;
  std::getline(in, line);
  std::istringstream magic(line);
  std::string word;
  int version = 0;
  magic >> word >> version;
  if (word != kMagic) throw ConfigError("checkpoint: bad magic in " + path);
  if (version != kCheckpointVersion)
    throw ConfigError("checkpoint: unsupported version " + std::to_string(version));
  std::getline(in, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: bad header: ") + e.what());
  }

  std::vector<HybridPolicy> agents;
  for (const auto& nets : header.at("agents")) {
    if (nets.size() != 4) throw ConfigError("checkpoint: expected four networks per agent");
    HybridPolicy p;
    auto ptrs = p.networks();
    for (std::size_t k = 0; k < 4; ++k) {
      const auto act = nets[k].at("activation").get<std::string>() == "tanh" ? Activation::kTanh
                                                                             : Activation::kIdentity;
      *ptrs[k] = Net(nets[k].at("widths").get<std::vector<int>>(), act);
      if (ptrs[k]->num_params() != nets[k].at("count").get<Eigen::Index>())
        throw ConfigError("checkpoint: parameter count does not match widths");
    }
    agents.push_back(std::move(p));
  }
  for (auto& agent : agents)
    for (Net* net : agent.networks()) {
      in.read(reinterpret_cast<char*>(net->params().data()),
              static_cast<std::streamsize>(net->num_params() * sizeof(double)));
      if (!in) throw ConfigError("checkpoint: truncated payload in " + path);
    }
  return agents;
}

}  // namespace meqc
