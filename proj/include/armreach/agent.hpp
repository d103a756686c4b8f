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

#ifndef ARMREACH_AGENT_HPP
#define ARMREACH_AGENT_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "armreach/armsim.hpp"
#include "armreach/config.hpp"
#include "armreach/qnetwork.hpp"
#include "armreach/replay.hpp"

namespace armreach {

/// Linear anneal from `start` to `end` over `anneal_steps`, then constant.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.1;
  std::uint64_t anneal_steps = 75'000;

  double at(std::uint64_t step) const {
    if (anneal_steps == 0 || step >= anneal_steps) return end;
    return start + (end - start) * static_cast<double>(step) / static_cast<double>(anneal_steps);
  }
};

struct AgentConfig {
  NetworkArchitecture architecture = NetworkArchitecture::atari();
  double gamma = 0.99;
  EpsilonSchedule epsilon;
  std::size_t replay_capacity = 100'000;
  std::size_t learn_start = 5'000;
  std::size_t minibatch = 32;
  std::uint64_t target_sync_period = 2'500;
  /// Environment steps per gradient step.
  std::uint64_t train_every = 4;
  RmsPropOptions rmsprop;
  double eval_epsilon = 0.05;
  bool training = true;

  void validate() const;
  /// Reads `agent.*` and `net.*` keys over the defaults.
  static AgentConfig from_config(const KeyValueConfig& kv);
  KeyValueConfig to_config() const;
};

struct ActionChoice {
  int action = 0;
  std::array<float, kActionCount> q_values{};
  bool explored = false;
};

/// Index of the largest value; ties go to the lowest index.
int argmax_lowest(std::span<const float> values);

/// One uniform draw decides exploration; a second picks the random action.
ActionChoice select_action(const QNetwork& network, const Tensor<float>& input, double epsilon, Rng& rng);
ActionChoice select_action(const QNetwork& network, const Observation& obs, double epsilon, Rng& rng);

struct TrainStepResult {
  double loss = 0.0;
  bool applied = false;
  /// Forward passes of the target network; zero for all-terminal batches.
  std::size_t target_evaluations = 0;
  std::vector<std::size_t> indices;
  std::vector<float> td_targets;
};

/// Samples a minibatch, regresses Q(s,a) toward r + gamma * max Q_target(s')
/// (r alone for terminal transitions) and applies one RMSProp step. A
/// non-finite loss or gradient leaves the network untouched and reports
/// `applied == false`.
TrainStepResult train_step(QNetwork& network, const QNetwork& target_network, const ReplayMemory& memory,
                           const AgentConfig& config, Rng& rng);

/// Bit-exact parameter copy; throws ShapeError on architecture mismatch.
void sync_target(const QNetwork& network, QNetwork& target_network);

/// Online and target networks, replay memory and the bookkeeping that ties
/// them to the environment step counter.
class DqnAgent {
 public:
  DqnAgent(AgentConfig config, std::uint64_t seed);

  /// Epsilon-greedy under the schedule in training mode, `eval_epsilon`
  /// otherwise.
  ActionChoice act(const Observation& obs);
  double current_epsilon() const;

  struct ObserveResult {
    bool trained = false;
    bool rejected = false;
    bool synced = false;
    double loss = 0.0;
  };
  /// Stores the transition and advances the step counter, training and
  /// syncing the target network when due.
  ObserveResult observe(const Transition& t);

  const AgentConfig& config() const { return config_; }
  AgentConfig& mutable_config() { return config_; }
  QNetwork& network() { return online_; }
  const QNetwork& network() const { return online_; }
  const QNetwork& target_network() const { return target_; }
  const ReplayMemory& memory() const { return memory_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }
  std::uint64_t step() const { return step_; }
  std::uint64_t sync_count() const { return syncs_; }
  std::uint64_t train_count() const { return trains_; }

  /// Full state, optimizer and replay included, for bit-exact resumption.
  void save_state(BinaryWriter& w) const;
  void load_state(BinaryReader& r);
  /// See ReplayMemory::adopt_latest.
  void adopt_observation(const Observation& obs) { memory_.adopt_latest(obs); }

 private:
  AgentConfig config_;
  QNetwork online_;
  QNetwork target_;
  ReplayMemory memory_;
  Rng rng_;
  std::uint64_t step_ = 0;
  std::uint64_t syncs_ = 0;
  std::uint64_t trains_ = 0;
};

/// One min-max normalised image per layer output. Feature maps are tiled in
/// a near-square grid; vector layers are laid out as matrices.
struct ActivationImage {
  std::string layer;
  std::size_t maps = 0;
  Frame image;
};

std::vector<ActivationImage> dump_activations(const QNetwork& network, const Observation& obs);
std::vector<ActivationImage> dump_activations(const QNetwork& network, const Tensor<float>& input);
/// Writes `<dir>/<layer>.pgm` for every image.
void write_activation_images(const std::filesystem::path& dir, const std::vector<ActivationImage>& images);

}  // namespace armreach

#endif  // ARMREACH_AGENT_HPP
