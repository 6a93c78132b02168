#pragma once

#include <string>

#include "covnav/policy/params.hpp"

namespace covnav::policy {

// Single-file checkpoint: JSON header (architecture, version, free-form
// metadata) followed by the flat parameter values as little-endian doubles.
void save_checkpoint(const std::string& path, const ParamSet& params,
                     const std::string& meta_json);

struct LoadedCheckpoint {
  ParamSet params;
  std::string meta_json;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace covnav::policy
