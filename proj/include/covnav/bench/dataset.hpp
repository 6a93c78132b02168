#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "covnav/learn/trainer.hpp"
#include "covnav/scene/episode.hpp"
#include "covnav/scene/generate.hpp"

namespace covnav::bench {

enum class DatasetTask { common, specific, adhoc };
const char* to_string(DatasetTask t);
DatasetTask dataset_task_from_string(const std::string& s);

struct SplitSpec {
  int arenas = 0;
  int episodes_per_arena_per_bin = 0;
};

struct DatasetSpec {
  DatasetTask task = DatasetTask::common;
  int n_train = 2;
  int n_eval = 2;  // differs from n_train only for ad-hoc team-size changes
  SplitSpec train{25, 50};
  SplitSpec val{5, 10};
  SplitSpec test{5, 20};
  uint64_t seed = 1;
  double min_arena_m = 10.0;
  double max_arena_m = 30.0;
  scene::ArenaStyle style;
  int k_rays = 72;
  double max_range = 15.0;

  std::string to_json() const;
  static DatasetSpec from_json(const std::string& text);
};

// Writes arenas/<id>.json, <split>.jsonl and dataset.json under out_dir.
// Byte-identical across runs with the same spec.
void gen_dataset(const DatasetSpec& spec, const std::string& out_dir);

class Dataset {
 public:
  static Dataset load(const std::string& dir);

  const DatasetSpec& spec() const { return spec_; }
  const std::vector<scene::EpisodeSpec>& split(const std::string& name) const;
  std::shared_ptr<const scene::Arena> arena(const std::string& id) const;

  // Episode pool for a split, optionally restricted to one difficulty bin.
  learn::EpisodePool pool(const std::string& split_name,
                          std::optional<scene::Difficulty> bin = std::nullopt) const;

 private:
  DatasetSpec spec_;
  std::map<std::string, std::shared_ptr<const scene::Arena>> arenas_;
  std::vector<scene::EpisodeSpec> train_, val_, test_;
};

}  // namespace covnav::bench
