// Copyright 2026 The armreach Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The reaching game: distance-change rewards, the three-reward termination
// rule, success latching and the 84x84 grayscale frame-stack observation.

#ifndef ARMREACH_REWARDENV_HPP
#define ARMREACH_REWARDENV_HPP

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>

#include "armreach/armsim.hpp"
#include "armreach/binary_io.hpp"
#include "armreach/tensor.hpp"

namespace armreach {

inline constexpr int kObservationSize = 84;
inline constexpr int kStackDepth = 4;
inline constexpr int kDefaultStepCap = 500;

/// +1 if the end-effector got closer, -1 if further, 0 on an exact tie.
int compute_reward(double previous_distance, double current_distance);

/// Terminal iff the sum of the latest three rewards is below -1. Fewer than
/// three rewards are padded with zeros.
bool check_terminal(std::span<const int> latest_rewards);

/// Ring of the three most recent rewards.
class RewardWindow {
 public:
  void push(int reward) {
    values_[next_] = reward;
    next_ = (next_ + 1) % values_.size();
    if (count_ < values_.size()) ++count_;
  }
  void clear() { *this = RewardWindow{}; }
  std::size_t size() const { return count_; }
  /// Most recent first.
  std::array<int, 3> latest() const {
    std::array<int, 3> out{0, 0, 0};
    for (std::size_t i = 0; i < count_; ++i) out[i] = values_[(next_ + values_.size() - 1 - i) % values_.size()];
    return out;
  }
  int sum() const { return values_[0] + values_[1] + values_[2]; }
  bool terminal() const {
    const auto l = latest();
    return check_terminal(std::span<const int>(l.data(), count_));
  }

  void save(BinaryWriter& w) const;
  void load(BinaryReader& r);

 private:
  std::array<int, 3> values_{0, 0, 0};
  std::size_t next_ = 0;
  std::size_t count_ = 0;
};

/// Luminance grayscale then exact area-average resampling to 84x84.
Frame preprocess(const Frame& native);

using FramePtr = std::shared_ptr<const Frame>;

/// The four most recent preprocessed frames, oldest first.
struct Observation {
  std::array<FramePtr, kStackDepth> frames;

  static Observation filled(const FramePtr& frame);
  /// Drops the oldest frame and appends `frame` as the newest.
  void push(FramePtr frame);
  bool valid() const;
  /// [4, 84, 84] network input.
  Tensor<float> to_tensor() const;
  friend bool operator==(const Observation& a, const Observation& b);
};

struct RoundState {
  ArmState sim;
  double previous_distance = 0.0;
  RewardWindow last_rewards;
  int step_count = 0;
  bool succeeded = false;
  bool terminal = false;
  double initial_distance = 0.0;
  double min_distance = 0.0;
  int cumulative_reward = 0;
};

struct StepResult {
  Observation observation;
  int reward = 0;
  bool terminal = false;
  bool success = false;
  double distance = 0.0;
};

struct EnvOptions {
  int step_cap = kDefaultStepCap;
  /// Policies that never look at pixels may skip rendering entirely.
  bool render = true;
};

class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ReachingEnv {
 public:
  ReachingEnv(ArmConfig arm, SettingSpec setting, std::uint64_t seed, EnvOptions options = {});

  /// Samples fresh round parameters for the active setting.
  const Observation& reset();
  /// Starts a round from explicit parameters.
  const Observation& reset_to(const ArmState& params);
  StepResult step(int action);

  const RoundState& round() const { return round_; }
  const Observation& observation() const { return observation_; }
  bool in_round() const { return started_ && !round_.terminal; }
  double current_distance() const;

  const ArmConfig& arm() const { return arm_; }
  const SettingSpec& setting() const { return setting_; }
  const EnvOptions& options() const { return options_; }

  /// Native frame of the current pose, noise included. Empty when rendering
  /// is disabled.
  const Frame& last_native_frame() const { return native_; }

  void save(BinaryWriter& w) const;
  void load(BinaryReader& r);

 private:
  void observe();

  ArmConfig arm_;
  SettingSpec setting_;
  EnvOptions options_;
  Rng round_rng_;
  Rng noise_rng_;
  RoundState round_;
  Observation observation_;
  Frame native_;
  bool started_ = false;
};

}  // namespace armreach

#endif  // ARMREACH_REWARDENV_HPP
