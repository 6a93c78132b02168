#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "covnav/bench/baselines.hpp"
#include "covnav/bench/dataset.hpp"
#include "covnav/bench/eval.hpp"
#include "covnav/bench/replay_svg.hpp"
#include "covnav/learn/bc.hpp"
#include "covnav/learn/trainer.hpp"
#include "covnav/policy/checkpoint.hpp"

#include <json.hpp>

namespace fs = std::filesystem;
using namespace covnav;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

policy::ArchConfig default_arch(const mapping::MapConfig& map_cfg, int k_rays) {
  policy::ArchConfig arch;
  arch.k_rays = k_rays;
  arch.goal_dim = k_rays;
  arch.digest_dim = map_cfg.digest_dim();
  return arch;
}

int cmd_gen(const std::string& task, int n, int n_eval, const std::string& out,
            uint64_t seed, std::vector<int> arenas, std::vector<int> episodes,
            bool single_room, double clutter) {
  bench::DatasetSpec spec;
  spec.task = bench::dataset_task_from_string(task);
  spec.n_train = n;
  spec.n_eval = spec.task == bench::DatasetTask::adhoc ? n_eval : n;
  if (spec.task == bench::DatasetTask::adhoc && n_eval == n) {
    throw CLI::ValidationError("--n-eval must differ from --n for the adhoc task");
  }
  spec.seed = seed;
  if (arenas.size() == 3) {
    spec.train.arenas = arenas[0];
    spec.val.arenas = arenas[1];
    spec.test.arenas = arenas[2];
  }
  if (episodes.size() == 3) {
    spec.train.episodes_per_arena_per_bin = episodes[0];
    spec.val.episodes_per_arena_per_bin = episodes[1];
    spec.test.episodes_per_arena_per_bin = episodes[2];
  }
  if (single_room) {
    spec.style = scene::ArenaStyle::single_room();
    spec.min_arena_m = 10.0;
    spec.max_arena_m = 10.0;
  }
  if (clutter >= 0.0) spec.style.clutter_per_m2 = clutter;
  bench::gen_dataset(spec, out);
  std::cout << "dataset written to " << out << "\n";
  return 0;
}

learn::EpisodePool restrict_bin(const bench::Dataset& data, const std::string& split,
                                const std::string& bin) {
  if (bin.empty()) return data.pool(split);
  return data.pool(split, scene::difficulty_from_string(bin));
}

int cmd_train(const std::string& method_s, const std::string& data_dir,
              const std::string& config_file, const std::string& out,
              long budget_updates, double budget_minutes, const std::string& bin,
              uint64_t seed_override) {
  const learn::Method method = learn::method_from_string(method_s);
  learn::TrainConfig cfg;
  if (!config_file.empty()) cfg = learn::TrainConfig::from_json(read_file(config_file));
  if (seed_override != 0) cfg.seed = seed_override;

  const bench::Dataset data = bench::Dataset::load(data_dir);
  const learn::EpisodePool train_pool = restrict_bin(data, "train", bin);
  const learn::EpisodePool val_pool = restrict_bin(data, "val", bin);

  mapping::MapConfig map_cfg;
  map_cfg.sensor_range_m = data.spec().max_range;
  map_cfg.cover_arena(data.spec().max_arena_m);
  const policy::ArchConfig arch = default_arch(map_cfg, data.spec().k_rays);

  learn::TrainBudget budget;
  budget.max_updates = budget_updates;
  budget.max_seconds = budget_minutes * 60.0;

  const learn::TrainResult result = [&]() {
    if (method == learn::Method::il) {
      // one oracle context per live episode, keyed by episode identity
      struct OracleTeacher {
        const scene::EpisodeSpec* last = nullptr;
        std::unique_ptr<bench::OracleContext> ctx;
        Action operator()(const sim::World& world, int agent) {
          if (last != &world.episode()) {
            ctx = std::make_unique<bench::OracleContext>(world.arena(), world.episode());
            last = &world.episode();
          }
          return ctx->act(world, agent);
        }
      };
      auto state = std::make_shared<OracleTeacher>();
      learn::TeamRunner::ActionOverride teacher =
          [state](const sim::World& w, int a) { return (*state)(w, a); };
      return learn::bc_train(teacher, train_pool, val_pool, cfg, arch, map_cfg, budget);
    }
    return learn::train_run(method, train_pool, val_pool, cfg, arch, map_cfg, budget);
  }();

  fs::create_directories(out);
  nlohmann::json meta;
  meta["method"] = learn::to_string(method);
  meta["map_config"] = nlohmann::json::parse(map_cfg.to_json());
  meta["train_config"] = nlohmann::json::parse(cfg.to_json());
  meta["dataset"] = data_dir;
  meta["bin"] = bin;
  policy::save_checkpoint((fs::path(out) / "checkpoint.bin").string(), result.params,
                          meta.dump());
  write_file(fs::path(out) / "curve.csv", learn::curve_to_csv(result.curve));
  std::cout << "updates: " << result.updates_done
            << "  scalars transmitted: " << result.total_scalars_transmitted
            << "  best probe SR: " << result.best_probe_sr << "\n";
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& baseline,
             const std::string& data_dir, const std::string& split,
             const std::string& bin, const std::string& out, uint64_t seed) {
  const bench::Dataset data = bench::Dataset::load(data_dir);
  const learn::EpisodePool pool = restrict_bin(data, split, bin);

  bench::EvalJob job;
  std::optional<policy::LoadedCheckpoint> loaded;
  if (!baseline.empty()) {
    job.baseline = baseline == "random" ? bench::Baseline::random
                                        : bench::Baseline::oracle;
    job.seed = seed;
  } else {
    loaded = policy::load_checkpoint(ckpt);
    const auto meta = nlohmann::json::parse(loaded->meta_json);
    job.params = &loaded->params;
    job.method = learn::method_from_string(meta.at("method").get<std::string>());
    job.map_cfg = mapping::MapConfig::from_json(meta.at("map_config").dump());
  }

  const bench::EvalOutput result = bench::eval_policy(job, pool);
  fs::create_directories(out);
  write_file(fs::path(out) / "report.json", result.report.to_json() + "\n");
  write_file(fs::path(out) / "report.csv", result.report.to_csv());
  bench::write_jsonl(result.logs, (fs::path(out) / "trajectories.jsonl").string());
  std::cout << result.report.to_csv();
  return 0;
}

int cmd_replay(const std::string& log_file, const std::string& data_dir, int index,
               const std::string& svg_out) {
  const auto logs = bench::read_jsonl(log_file);
  if (index < 0 || index >= static_cast<int>(logs.size())) {
    throw CLI::ValidationError("--index out of range");
  }
  const bench::Dataset data = bench::Dataset::load(data_dir);
  const auto arena = data.arena(logs[index].arena_id);
  write_file(svg_out, bench::render_svg(logs[index], *arena));
  std::cout << "figure written to " << svg_out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent collaborative navigation benchmark"};
  app.require_subcommand(0, 1);
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the default train config JSON");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a dataset");
  std::string gen_task = "common", gen_out = "dataset";
  int gen_n = 2, gen_n_eval = 3;
  uint64_t gen_seed = 1;
  std::vector<int> gen_arenas, gen_episodes;
  bool gen_single_room = false;
  double gen_clutter = -1.0;
  gen->add_option("--task", gen_task, "common | specific | adhoc");
  gen->add_option("--n", gen_n, "team size (train split)");
  gen->add_option("--n-eval", gen_n_eval, "eval team size (adhoc only)");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--seed", gen_seed, "dataset seed");
  gen->add_option("--arenas", gen_arenas, "train val test arena counts")->expected(3);
  gen->add_option("--episodes", gen_episodes, "episodes per arena per bin")->expected(3);
  gen->add_flag("--single-room", gen_single_room, "10x10 single-room arenas");
  gen->add_option("--clutter", gen_clutter, "freestanding obstacle density per m^2");

  // train
  auto* train = app.add_subcommand("train", "train a policy");
  std::string tr_method = "ippo", tr_data, tr_config, tr_out = "run", tr_bin;
  long tr_updates = 200;
  double tr_minutes = 0.0;
  uint64_t tr_seed = 0;
  train->add_option("--method", tr_method, "ippo | vanilla | memory | il");
  train->add_option("--data", tr_data, "dataset directory")->required();
  train->add_option("--config", tr_config, "train config JSON file");
  train->add_option("--out", tr_out, "output directory");
  train->add_option("--budget-updates", tr_updates, "update budget (0 = none)");
  train->add_option("--budget-minutes", tr_minutes, "wall-clock budget (0 = none)");
  train->add_option("--bin", tr_bin, "restrict to one difficulty bin");
  train->add_option("--seed", tr_seed, "override config seed");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint or baseline");
  std::string ev_ckpt, ev_baseline, ev_data, ev_split = "test", ev_bin, ev_out = "eval";
  uint64_t ev_seed = 1;
  eval->add_option("--ckpt", ev_ckpt, "checkpoint file");
  eval->add_option("--baseline", ev_baseline, "random | oracle");
  eval->add_option("--data", ev_data, "dataset directory")->required();
  eval->add_option("--split", ev_split, "train | val | test");
  eval->add_option("--bin", ev_bin, "restrict to one difficulty bin");
  eval->add_option("--out", ev_out, "output directory");
  eval->add_option("--seed", ev_seed, "random-baseline seed");

  // replay
  auto* replay = app.add_subcommand("replay", "render a trajectory figure");
  std::string rp_log, rp_data, rp_svg = "replay.svg";
  int rp_index = 0;
  replay->add_option("--log", rp_log, "trajectories.jsonl file")->required();
  replay->add_option("--data", rp_data, "dataset directory (for the arena)")->required();
  replay->add_option("--index", rp_index, "episode index within the log file");
  replay->add_option("--svg", rp_svg, "output SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (print_config) {
      std::cout << learn::TrainConfig{}.to_json() << "\n";
      return 0;
    }
    if (gen->parsed()) {
      return cmd_gen(gen_task, gen_n, gen_n_eval, gen_out, gen_seed, gen_arenas,
                     gen_episodes, gen_single_room, gen_clutter);
    }
    if (train->parsed()) {
      return cmd_train(tr_method, tr_data, tr_config, tr_out, tr_updates, tr_minutes,
                       tr_bin, tr_seed);
    }
    if (eval->parsed()) {
      if (ev_ckpt.empty() == ev_baseline.empty()) {
        throw CLI::ValidationError("pass exactly one of --ckpt / --baseline");
      }
      return cmd_eval(ev_ckpt, ev_baseline, ev_data, ev_split, ev_bin, ev_out, ev_seed);
    }
    if (replay->parsed()) {
      return cmd_replay(rp_log, rp_data, rp_index, rp_svg);
    }
    std::cout << app.help();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
