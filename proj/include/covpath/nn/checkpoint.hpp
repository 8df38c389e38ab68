#pragma once

#include <string>

#include "covpath/nn/network.hpp"

namespace covpath::nn {

struct CheckpointHeader {
  std::string kind = "actor";
  NetConfig config;
  std::int64_t step = 0;
  Eigen::Index param_count = 0;
};

// File layout: one JSON header line, then the raw little-endian float32
// parameter block.
void save_checkpoint(const std::string& path, const SacNet<float>& net,
                     const std::string& kind, std::int64_t step);

CheckpointHeader read_checkpoint_header(const std::string& path);

// Rebuilds the network recorded in the header and loads its parameters.
SacNet<float> load_checkpoint(const std::string& path,
                              CheckpointHeader* header_out = nullptr);

}  // namespace covpath::nn
