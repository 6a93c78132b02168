#pragma once

#include "covnav/learn/trainer.hpp"

namespace covnav::learn {

// Behavior cloning against a teacher action source: squared error between
// the policy's pre-squash action mean and atanh of the teacher action,
// over teacher-driven trajectories. One policy is trained; evaluation
// deploys N copies with no communication.
TrainResult bc_train(const TeamRunner::ActionOverride& teacher,
                     const EpisodePool& train_pool, const EpisodePool& probe_pool,
                     const TrainConfig& cfg, const policy::ArchConfig& arch,
                     const mapping::MapConfig& map_cfg, const TrainBudget& budget);

}  // namespace covnav::learn
