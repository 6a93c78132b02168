#include "covnav/bench/dataset.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace covnav::bench {

namespace fs = std::filesystem;

const char* to_string(DatasetTask t) {
  switch (t) {
    case DatasetTask::common: return "common";
    case DatasetTask::specific: return "specific";
    default: return "adhoc";
  }
}

DatasetTask dataset_task_from_string(const std::string& s) {
  if (s == "common") return DatasetTask::common;
  if (s == "specific") return DatasetTask::specific;
  if (s == "adhoc") return DatasetTask::adhoc;
  throw std::invalid_argument("unknown dataset task: " + s);
}

std::string DatasetSpec::to_json() const {
  nlohmann::json j;
  j["task"] = bench::to_string(task);
  j["n_train"] = n_train;
  j["n_eval"] = n_eval;
  j["train"] = {{"arenas", train.arenas}, {"episodes_per_arena_per_bin", train.episodes_per_arena_per_bin}};
  j["val"] = {{"arenas", val.arenas}, {"episodes_per_arena_per_bin", val.episodes_per_arena_per_bin}};
  j["test"] = {{"arenas", test.arenas}, {"episodes_per_arena_per_bin", test.episodes_per_arena_per_bin}};
  j["seed"] = seed;
  j["min_arena_m"] = min_arena_m;
  j["max_arena_m"] = max_arena_m;
  j["style"] = {{"internal_walls", style.internal_walls},
                {"min_room_m", style.min_room_m},
                {"door_m", style.door_m},
                {"split_prob", style.split_prob},
                {"clutter_per_m2", style.clutter_per_m2},
                {"clutter_min_m", style.clutter_min_m},
                {"clutter_max_m", style.clutter_max_m},
                {"clutter_wall_clearance_m", style.clutter_wall_clearance_m}};
  j["k_rays"] = k_rays;
  j["max_range"] = max_range;
  return j.dump(2);
}

DatasetSpec DatasetSpec::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DatasetSpec s;
  s.task = dataset_task_from_string(j.at("task").get<std::string>());
  s.n_train = j.at("n_train").get<int>();
  s.n_eval = j.at("n_eval").get<int>();
  s.train = {j.at("train").at("arenas").get<int>(),
             j.at("train").at("episodes_per_arena_per_bin").get<int>()};
  s.val = {j.at("val").at("arenas").get<int>(),
           j.at("val").at("episodes_per_arena_per_bin").get<int>()};
  s.test = {j.at("test").at("arenas").get<int>(),
            j.at("test").at("episodes_per_arena_per_bin").get<int>()};
  s.seed = j.at("seed").get<uint64_t>();
  s.min_arena_m = j.at("min_arena_m").get<double>();
  s.max_arena_m = j.at("max_arena_m").get<double>();
  const auto& st = j.at("style");
  s.style.internal_walls = st.at("internal_walls").get<bool>();
  s.style.min_room_m = st.at("min_room_m").get<double>();
  s.style.door_m = st.at("door_m").get<double>();
  s.style.split_prob = st.at("split_prob").get<double>();
  s.style.clutter_per_m2 = st.at("clutter_per_m2").get<double>();
  s.style.clutter_min_m = st.at("clutter_min_m").get<double>();
  s.style.clutter_max_m = st.at("clutter_max_m").get<double>();
  s.style.clutter_wall_clearance_m = st.at("clutter_wall_clearance_m").get<double>();
  s.k_rays = j.at("k_rays").get<int>();
  s.max_range = j.at("max_range").get<double>();
  return s;
}

namespace {

constexpr scene::Difficulty kBins[3] = {scene::Difficulty::easy,
                                        scene::Difficulty::medium,
                                        scene::Difficulty::hard};

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// One arena plus its full episode block; the arena is re-drawn (derived
// seed) until every episode places, so a hard bin that does not fit a
// cramped layout rejects the whole arena.
struct ArenaBlock {
  scene::Arena arena;
  std::vector<scene::EpisodeSpec> episodes;
};

ArenaBlock build_arena_block(const DatasetSpec& spec, const std::string& split_name,
                             int arena_idx, int episodes_per_bin, int n_agents) {
  const uint64_t split_tag = fnv1a(split_name);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const uint64_t arena_seed =
        Rng::derive(spec.seed, split_tag ^ (0xA0000 + 131 * arena_idx + attempt));
    Rng dims(Rng::derive(arena_seed, 0xD1));
    const double w = dims.uniform(spec.min_arena_m, spec.max_arena_m);
    const double h = dims.uniform(spec.min_arena_m, spec.max_arena_m);
    ArenaBlock block;
    try {
      block.arena = scene::generate_arena(arena_seed, w, h, spec.style);
    } catch (const std::runtime_error&) {
      continue;
    }
    char id[64];
    std::snprintf(id, sizeof(id), "%s_%03d", split_name.c_str(), arena_idx);
    block.arena.id = id;

    const scene::Task task = spec.task == DatasetTask::specific
                                 ? scene::Task::specific_goal
                                 : scene::Task::common_goal;
    bool ok = true;
    for (int b = 0; b < 3 && ok; ++b) {
      for (int e = 0; e < episodes_per_bin && ok; ++e) {
        const uint64_t ep_seed =
            Rng::derive(arena_seed, 0xEE000 + 1009 * b + static_cast<uint64_t>(e));
        try {
          block.episodes.push_back(scene::safe_init(block.arena, n_agents, kBins[b],
                                                    task, ep_seed, spec.k_rays,
                                                    spec.max_range));
        } catch (const std::runtime_error&) {
          ok = false;
        }
      }
    }
    if (ok) return block;
  }
  throw std::runtime_error("dataset generation failed: no arena admits all difficulty bins");
}

void write_split(const DatasetSpec& spec, const std::string& out_dir,
                 const std::string& split_name, const SplitSpec& split, int n_agents) {
  std::ofstream jsonl(fs::path(out_dir) / (split_name + ".jsonl"));
  if (!jsonl) throw std::runtime_error("cannot write split " + split_name);
  for (int a = 0; a < split.arenas; ++a) {
    ArenaBlock block = build_arena_block(spec, split_name, a,
                                         split.episodes_per_arena_per_bin, n_agents);
    std::ofstream af(fs::path(out_dir) / "arenas" / (block.arena.id + ".json"));
    if (!af) throw std::runtime_error("cannot write arena file");
    af << block.arena.to_json() << '\n';
    for (const auto& e : block.episodes) jsonl << e.to_json() << '\n';
  }
}

}  // namespace

void gen_dataset(const DatasetSpec& spec, const std::string& out_dir) {
  fs::create_directories(fs::path(out_dir) / "arenas");
  write_split(spec, out_dir, "train", spec.train, spec.n_train);
  write_split(spec, out_dir, "val", spec.val, spec.n_eval);
  write_split(spec, out_dir, "test", spec.test, spec.n_eval);
  std::ofstream meta(fs::path(out_dir) / "dataset.json");
  meta << spec.to_json() << '\n';
}

Dataset Dataset::load(const std::string& dir) {
  Dataset d;
  {
    std::ifstream meta(fs::path(dir) / "dataset.json");
    if (!meta) throw std::runtime_error("not a dataset directory: " + dir);
    std::string text((std::istreambuf_iterator<char>(meta)),
                     std::istreambuf_iterator<char>());
    d.spec_ = DatasetSpec::from_json(text);
  }
  for (const auto& entry : fs::directory_iterator(fs::path(dir) / "arenas")) {
    std::ifstream af(entry.path());
    std::string text((std::istreambuf_iterator<char>(af)),
                     std::istreambuf_iterator<char>());
    auto arena = std::make_shared<scene::Arena>(scene::Arena::from_json(text));
    d.arenas_[arena->id] = std::move(arena);
  }
  const auto read_split = [&](const char* name, std::vector<scene::EpisodeSpec>* out) {
    std::ifstream in(fs::path(dir) / (std::string(name) + ".jsonl"));
    if (!in) throw std::runtime_error(std::string("missing split: ") + name);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) out->push_back(scene::EpisodeSpec::from_json(line));
    }
  };
  read_split("train", &d.train_);
  read_split("val", &d.val_);
  read_split("test", &d.test_);
  return d;
}

const std::vector<scene::EpisodeSpec>& Dataset::split(const std::string& name) const {
  if (name == "train") return train_;
  if (name == "val") return val_;
  if (name == "test") return test_;
  throw std::invalid_argument("unknown split: " + name);
}

std::shared_ptr<const scene::Arena> Dataset::arena(const std::string& id) const {
  const auto it = arenas_.find(id);
  if (it == arenas_.end()) throw std::invalid_argument("unknown arena: " + id);
  return it->second;
}

learn::EpisodePool Dataset::pool(const std::string& split_name,
                                 std::optional<scene::Difficulty> bin) const {
  learn::EpisodePool pool;
  std::map<std::string, int> arena_index;
  for (const auto& e : split(split_name)) {
    if (bin && e.difficulty != *bin) continue;
    auto it = arena_index.find(e.arena_id);
    if (it == arena_index.end()) {
      it = arena_index.emplace(e.arena_id, static_cast<int>(pool.arenas.size())).first;
      pool.arenas.push_back(arena(e.arena_id));
    }
    pool.episodes.push_back(std::make_shared<scene::EpisodeSpec>(e));
    pool.episode_arena.push_back(it->second);
  }
  return pool;
}

}  // namespace covnav::bench
