#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "covnav/core/geometry.hpp"
#include "covnav/core/robot.hpp"
#include "covnav/sim/world.hpp"

namespace covnav::mapping {

struct MapConfig {
  double extent_m = 38.4;      // square map side, agent start at the center
  double fine_cell_m = 0.1;
  double coarse_cell_m = 3.0;
  int feature_channels = 8;    // per-sector mean depths
  double sensor_range_m = kMaxSensorRange;
  double obstacle_alpha = 0.3; // exponential belief update rate

  int fine_cells() const {
    return static_cast<int>(std::round(extent_m / fine_cell_m));  // 384
  }
  int coarse_cells() const {
    return static_cast<int>(std::ceil(extent_m / coarse_cell_m));  // 13
  }
  // 5x5 coarse feature window + pooled statistics
  int digest_dim() const { return 25 * feature_channels + 4; }

  // Extent covering any pose offset inside an arena of the given longest
  // side (the map is anchored at the episode start, which can sit in a
  // corner). Keeps the stock default when it already suffices.
  void cover_arena(double max_side_m) {
    extent_m = std::max(extent_m, 2.0 * max_side_m + 2.0 * coarse_cell_m);
  }

  std::string to_json() const;
  static MapConfig from_json(const std::string& text);
};

// Per-agent spatial memory accumulated in the frame of the agent's start
// pose (start = map center, heading = +x). Mutated only by its owner.
class EgoMap {
 public:
  explicit EgoMap(MapConfig cfg = {});

  void update(const sim::Observation& obs, const Pose& pose_prev,
              const Pose& pose_cur);

  // Fixed-length digest: 5x5 coarse feature window centered on the pose
  // plus [explored fraction, mean obstacle prob over explored cells,
  // trajectory fraction, obstacle prob at the pose cell].
  Eigen::VectorXd summary(const Pose& pose) const;

  const MapConfig& config() const { return cfg_; }
  bool anchored() const { return anchored_; }
  const Pose& origin() const { return origin_; }

  double obstacle_prob(int ix, int iy) const { return obstacle_[index(ix, iy)]; }
  bool explored(int ix, int iy) const { return explored_[index(ix, iy)] != 0; }
  bool trajectory(int ix, int iy) const { return trajectory_[index(ix, iy)] != 0; }
  bool current_loc(int ix, int iy) const { return current_[index(ix, iy)] != 0; }
  double feature(int channel, int cx, int cy) const;
  long explored_count() const { return explored_count_; }
  long trajectory_count() const { return trajectory_count_; }
  double channel_sum() const;  // diagnostic: total mass across all channels

  // Map-frame cell of a world pose.
  bool to_cell(const Pose& world, int* ix, int* iy) const;

  std::string dump_json() const;

 private:
  size_t index(int ix, int iy) const {
    return static_cast<size_t>(iy) * cfg_.fine_cells() + ix;
  }
  void set_explored(int ix, int iy);
  void update_obstacle(int ix, int iy, double target);
  // World pose -> map-frame coordinates in meters (origin at map center).
  void to_map_frame(double wx, double wy, double* mx, double* my) const;
  // Map-frame meters -> grid coordinates from the map corner. The start
  // anchors to the center of the middle cell, not a cell corner, so the
  // grid walk never starts on a boundary.
  double to_px(double m) const {
    return m + cfg_.extent_m / 2.0 + 0.5 * cfg_.fine_cell_m;
  }

  MapConfig cfg_;
  bool anchored_ = false;
  Pose origin_;
  std::vector<double> obstacle_;
  std::vector<uint8_t> explored_;
  std::vector<uint8_t> trajectory_;
  std::vector<uint8_t> current_;
  std::vector<int> current_cells_;
  std::vector<double> features_;  // [channel][cy][cx]
  long explored_count_ = 0;
  long trajectory_count_ = 0;
  double explored_obstacle_sum_ = 0.0;
};

}  // namespace covnav::mapping
