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

// Experiment orchestration: training runs, validation-Q curves, success-rate
// evaluation, random baselines and the agent-by-setting matrix.

#ifndef ARMREACH_HARNESS_HPP
#define ARMREACH_HARNESS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "armreach/agent.hpp"
#include "armreach/checkpoint.hpp"
#include "armreach/rewardenv.hpp"

namespace armreach {

/// Deterministic seed derivation for independent streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

/// Worker threads for evaluation: ARMREACH_THREADS, else hardware concurrency.
unsigned evaluation_threads();

struct TrainRunSpec {
  SettingSpec setting = SettingSpec::from_id(SettingId::A);
  std::uint64_t total_steps = 300'000;
  std::uint64_t epoch_length = 50'000;
  std::vector<std::uint64_t> checkpoint_steps;
  std::uint64_t seed = 1;
  std::string run_id = "run";
  ArmConfig arm;
  AgentConfig agent;
  EnvOptions env;
  std::size_t validation_size = 500;
  /// Rounds of success-rate evaluation at each epoch boundary.
  std::size_t epoch_eval_rounds = 20;
  /// Write train_state.bin at every checkpoint rather than only at the end.
  bool resume_state_at_checkpoints = false;

  void validate() const;
  /// `run.*` keys plus the `arm.*`, `net.*` and `agent.*` sections.
  static TrainRunSpec from_config(const KeyValueConfig& kv);
  KeyValueConfig to_config() const;
};

struct EpochRecord {
  std::uint64_t step = 0;
  std::uint64_t epoch = 0;
  double avg_max_q = 0.0;
  double success_rate = 0.0;
  std::size_t eval_rounds = 0;
  double epsilon = 0.0;
  double mean_loss = 0.0;
  std::uint64_t syncs = 0;
  std::uint64_t train_steps = 0;
  std::uint64_t rounds_finished = 0;
};

inline constexpr const char* kMetricsHeader =
    "run_id,seed,step,epoch,avg_max_q,success_rate,eval_rounds,epsilon,mean_loss,syncs,train_steps,rounds_finished";

/// Mean over the set of max_a Q(s, a). Throws on an empty set.
double validate_q(const QNetwork& network, const std::vector<Tensor<float>>& validation_set);

/// Observations gathered by a uniform-random policy in `setting`.
std::vector<Tensor<float>> collect_validation_set(const ArmConfig& arm, const SettingSpec& setting, std::size_t count,
                                                  std::uint64_t seed, const EnvOptions& env = {});

class TrainingAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs the environment/agent loop and owns the run directory:
///
///   manifest.txt     run configuration
///   metrics.csv      one row per epoch boundary
///   checkpoints/     step_<n>.rdqn files on the checkpoint schedule
///   final.rdqn       parameters at the last completed step
///   train_state.bin  everything needed to resume bit-exactly
class Trainer {
 public:
  Trainer(TrainRunSpec spec, std::filesystem::path run_dir);

  /// Reopens a run directory from its manifest and train_state.bin.
  static Trainer resume(const std::filesystem::path& run_dir);

  void run_until(std::uint64_t step);
  void run() { run_until(spec_.total_steps); }

  void save_state(const std::filesystem::path& path) const;
  void load_state(const std::filesystem::path& path);
  /// Writes a checkpoint of the online network at the current step.
  void write_checkpoint(const std::filesystem::path& path) const;

  std::uint64_t step() const { return agent_.step(); }
  const DqnAgent& agent() const { return agent_; }
  const TrainRunSpec& spec() const { return spec_; }
  TrainRunSpec& mutable_spec() { return spec_; }
  const std::vector<EpochRecord>& epochs() const { return epochs_; }
  const std::vector<Tensor<float>>& validation_set() const { return validation_set_; }
  const std::filesystem::path& run_dir() const { return run_dir_; }

 private:
  struct Resume {};
  Trainer(TrainRunSpec spec, std::filesystem::path run_dir, Resume);

  void record_epoch();
  void write_metrics_row(std::ostream& out, const EpochRecord& rec) const;
  bool is_checkpoint_step(std::uint64_t step) const;
  std::filesystem::path state_path() const { return run_dir_ / "train_state.bin"; }

  TrainRunSpec spec_;
  std::filesystem::path run_dir_;
  ReachingEnv env_;
  DqnAgent agent_;
  std::vector<Tensor<float>> validation_set_;
  std::vector<EpochRecord> epochs_;
  double loss_sum_ = 0.0;
  std::uint64_t loss_count_ = 0;
  std::uint64_t rounds_finished_ = 0;
  std::uint64_t rejected_streak_ = 0;
};

/// Convenience wrapper: a fresh Trainer run to `spec.total_steps`.
void train(const TrainRunSpec& spec, const std::filesystem::path& run_dir);

struct RoundReport {
  bool success = false;
  int steps = 0;
  double final_distance = 0.0;
  double min_distance = 0.0;
  int cumulative_reward = 0;
};

struct WilsonInterval {
  double low = 0.0;   // percent
  double high = 0.0;  // percent
};

/// 95% Wilson score interval for `successes` out of `trials`, in percent.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct EvalResult {
  double success_rate = 0.0;  // percent
  std::size_t successes = 0;
  std::size_t rounds = 0;
  WilsonInterval interval;
  std::vector<RoundReport> reports;
};

/// Chooses an action for the env's current state. May use the rng.
using Policy = std::function<int(const ReachingEnv& env, Rng& rng)>;

/// Round `r` uses environment seed derive_seed(seed, 1, r) and policy seed
/// derive_seed(seed, 2, r), so results do not depend on the thread count.
EvalResult evaluate_policy(const Policy& policy, const ArmConfig& arm, const SettingSpec& setting, std::size_t rounds,
                           std::uint64_t seed, const EnvOptions& env = {}, unsigned threads = 1,
                           std::ostream* trajectory_log = nullptr);

EvalResult evaluate(const QNetwork& network, const ArmConfig& arm, const SettingSpec& setting, std::size_t rounds,
                    std::uint64_t seed, double epsilon, unsigned threads = 1, const EnvOptions& env = {},
                    std::ostream* trajectory_log = nullptr);
EvalResult evaluate(const std::filesystem::path& checkpoint, const SettingSpec& setting, std::size_t rounds = 200,
                    std::uint64_t seed = 7, std::optional<double> epsilon = std::nullopt, unsigned threads = 1,
                    const ArmConfig& arm = {}, std::ostream* trajectory_log = nullptr);

/// Distance-greedy scripted controller with privileged state. It picks the
/// in-limit inverse-kinematics pose nearest the current joints and, among the
/// joint moves heading toward it, takes the one leaving the end-effector
/// closest to the target. Plain one-step distance greedy (which stalls at
/// joint limits and on a straight arm) when the target has no IK pose.
Policy scripted_greedy_policy();
/// The action whose resulting pose is closest to the target, lowest index on
/// ties; may hold forever in a local minimum.
Policy one_step_greedy_policy();
Policy random_policy();
/// Holds every joint forever.
Policy hold_policy();

EvalResult random_baseline(const ArmConfig& arm, const SettingSpec& setting, std::size_t rounds, std::uint64_t seed,
                           unsigned threads = 1);

struct EvalMatrix {
  /// Rows are agents (training setting), columns evaluation settings, percent.
  std::array<std::array<std::optional<double>, 5>, 5> rates{};
  std::size_t rounds_per_cell = 0;

  static bool diagonal(std::size_t agent, std::size_t setting) { return agent == setting; }
  std::string to_csv() const;
  /// Agent rows by setting columns with the diagonal in brackets.
  std::string to_table() const;
};

/// Success rates reported for the five agents after full training, same layout.
EvalMatrix reference_matrix();

/// `checkpoints[i]` is the agent trained in setting i; missing ones leave
/// their row absent.
EvalMatrix cross_matrix(const std::array<std::optional<std::filesystem::path>, 5>& checkpoints, std::size_t rounds,
                        std::uint64_t seed, unsigned threads = 1, const ArmConfig& arm = {});
/// Looks in `dir` for X.rdqn, agent_X.rdqn, or the final.rdqn of an X, full_X
/// or desk_X run directory, in that order, for X in A..E.
std::array<std::optional<std::filesystem::path>, 5> find_matrix_checkpoints(const std::filesystem::path& dir);

struct ProgressionPoint {
  std::uint64_t step = 0;
  EvalResult result;
};
/// Every checkpoint of a run, evaluated in the setting it was trained in.
std::vector<ProgressionPoint> evaluate_progression(const std::filesystem::path& run_dir, std::size_t rounds,
                                                   std::uint64_t seed, unsigned threads = 1);

/// Epoch, step and average max Q columns of a run's metrics.
std::string q_curve_csv(const std::filesystem::path& run_dir);
std::vector<EpochRecord> read_metrics(const std::filesystem::path& metrics_csv);

inline constexpr const char* kTrajectoryHeader = "round,step,action,reward,distance,terminal,success";

/// Per-step CSV rows under kTrajectoryHeader.
class TrajectoryLog {
 public:
  explicit TrajectoryLog(std::ostream& out, bool header = true);
  void row(std::size_t round, int step, int action, int reward, double distance, bool terminal, bool success);

 private:
  std::ostream& out_;
};

}  // namespace armreach

#endif  // ARMREACH_HARNESS_HPP
