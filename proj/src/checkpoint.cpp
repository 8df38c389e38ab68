#include "covpath/nn/checkpoint.hpp"

#include <fstream>

#include "json.hpp"

namespace covpath::nn {

namespace {

nlohmann::json config_to_json(const NetConfig& c) {
  return {{"arch", to_string(c.arch)},
          {"head", c.head == HeadKind::Actor ? "actor" : "critic"},
          {"scales", c.scales},
          {"grid_size", c.grid_size},
          {"lidar_rays", c.lidar_rays},
          {"conv_channels", c.conv_channels},
          {"fc_units", c.fc_units},
          {"frontier_channel", c.frontier_channel}};
}

NetConfig config_from_json(const nlohmann::json& j) {
  NetConfig c;
  c.arch = arch_from_string(j.at("arch").get<std::string>());
  c.head = j.at("head").get<std::string>() == "critic" ? HeadKind::Critic
                                                       : HeadKind::Actor;
  c.scales = j.at("scales").get<int>();
  c.grid_size = j.at("grid_size").get<int>();
  c.lidar_rays = j.at("lidar_rays").get<int>();
  c.conv_channels = j.at("conv_channels").get<int>();
  c.fc_units = j.at("fc_units").get<int>();
  c.frontier_channel = j.at("frontier_channel").get<bool>();
  return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const SacNet<float>& net,
                     const std::string& kind, std::int64_t step) {
  nlohmann::json header = {{"format", "covpath-checkpoint-v1"},
                           {"kind", kind},
                           {"step", step},
                           {"param_count", net.param_count()},
                           {"net", config_to_json(net.config())}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << header.dump() << "\n";
  out.write(reinterpret_cast<const char*>(net.params().data()),
            static_cast<std::streamsize>(net.param_count() * sizeof(float)));
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

CheckpointHeader read_checkpoint_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("checkpoint header missing: " + path);
  nlohmann::json j = nlohmann::json::parse(line);
  if (j.value("format", "") != "covpath-checkpoint-v1")
    throw std::runtime_error("not a covpath checkpoint: " + path);
  CheckpointHeader h;
  h.kind = j.at("kind").get<std::string>();
  h.step = j.at("step").get<std::int64_t>();
  h.param_count = j.at("param_count").get<Eigen::Index>();
  h.config = config_from_json(j.at("net"));
  return h;
}

SacNet<float> load_checkpoint(const std::string& path, CheckpointHeader* header_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("checkpoint header missing: " + path);
  nlohmann::json j = nlohmann::json::parse(line);
  if (j.value("format", "") != "covpath-checkpoint-v1")
    throw std::runtime_error("not a covpath checkpoint: " + path);

  CheckpointHeader h;
  h.kind = j.at("kind").get<std::string>();
  h.step = j.at("step").get<std::int64_t>();
  h.param_count = j.at("param_count").get<Eigen::Index>();
  h.config = config_from_json(j.at("net"));

  SacNet<float> net(h.config, 0);
  if (net.param_count() != h.param_count)
    throw std::runtime_error("checkpoint parameter count mismatch: " + path);
  in.read(reinterpret_cast<char*>(net.params().data()),
          static_cast<std::streamsize>(h.param_count * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(h.param_count * sizeof(float)))
    throw std::runtime_error("checkpoint truncated: " + path);
  if (header_out) *header_out = h;
  return net;
}

}  // namespace covpath::nn
