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

// Kinematic 2D simulator of a planar arm with a fixed mount link followed by
// three revolute joints (S1, E1, W1), rendered into a 160 wide x 320 tall
// frame.
//
// Screen coordinates: u grows to the right (column), v grows downward (row).
// A link at cumulative angle theta points along (sin theta, cos theta), so the
// zero pose hangs straight down from the anchor and positive angles swing the
// arm toward +u.

#ifndef ARMREACH_ARMSIM_HPP
#define ARMREACH_ARMSIM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "armreach/config.hpp"
#include "armreach/frame.hpp"

namespace armreach {

using Rng = std::mt19937_64;

inline constexpr int kActionCount = 9;
inline constexpr int kJointCount = 3;
using JointVector = std::array<double, kJointCount>;

struct Vec2 {
  double u = 0.0;
  double v = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.u - b.u, a.v - b.v); }

struct JointLimits {
  double min;
  double max;
};

struct ArmConfig {
  std::array<JointLimits, kJointCount> joint_limits{{{-2.147, 1.047}, {-0.05, 2.618}, {-1.571, 2.094}}};
  // Mount, upper arm, forearm, wrist-to-tip.
  std::array<double, 4> base_link_lengths_cm{27.0, 36.0, 37.0, 23.0};
  Vec2 base_anchor{80.0, 70.0};
  double cm_to_px = 15.0 / 16.0;
  double link_thickness_px = 8.0;
  double target_radius_px = 7.0;
  double effector_marker_radius_px = 4.0;
  int frame_width = 160;
  int frame_height = 320;

  double joint_step_rad = 0.02;
  double completion_radius_px = 15.0;

  double noise_amplitude = 0.1;
  std::array<int, 2> offset_u_range{-23, 7};
  std::array<int, 2> offset_v_range{-40, 20};
  std::array<double, 2> link_scale_range{0.958, 1.125};
  /// When false one shared factor scales every link.
  bool per_link_scale = true;
  /// Minimum clearance between a target centre and the frame border.
  double target_margin_px = 9.0;

  /// Throws ConfigError on a violated invariant.
  void validate() const;

  /// Reads `arm.*` keys over the defaults.
  static ArmConfig from_config(const KeyValueConfig& kv);
  KeyValueConfig to_config() const;
};

enum class SettingId { A, B, C, D, E };

/// Cumulative perturbations: B adds pixel noise, C random initial pose,
/// D random image offset, E random link lengths.
struct SettingSpec {
  SettingId id = SettingId::A;
  bool noise_enabled = false;
  bool random_initial_pose = false;
  bool random_offset = false;
  bool random_link_length = false;

  static SettingSpec from_id(SettingId id);
  /// Accepts "A".."E" (case-insensitive).
  static SettingSpec parse(const std::string& name);
  char letter() const { return static_cast<char>('A' + static_cast<int>(id)); }
};

struct ArmState {
  JointVector joints{0.0, 0.0, 0.0};
  std::array<double, 4> link_scale{1.0, 1.0, 1.0, 1.0};
  /// (du, dv) applied to the whole scene when rendering.
  std::array<int, 2> image_offset{0, 0};
  /// Target centre in scene coordinates (before the image offset).
  Vec2 target{};
  /// Drawn from the round-parameter stream; seeds the round's noise stream.
  std::uint64_t round_seed = 0;

  friend bool operator==(const ArmState&, const ArmState&) = default;
};

/// Scaled link lengths in pixels.
std::array<double, 4> link_lengths_px(const ArmConfig& config, const ArmState& state);

/// S1 joint, E1 joint, W1 joint, end-effector, in scene pixels.
std::array<Vec2, 4> forward_kinematics(const ArmConfig& config, const ArmState& state);

inline Vec2 end_effector(const ArmConfig& config, const ArmState& state) {
  return forward_kinematics(config, state)[3];
}

/// action = 3 * joint + {0: increase, 1: decrease, 2: hold}. Presses past a
/// limit clamp to it.
ArmState step_joints(const ArmConfig& config, ArmState state, int action);

ArmState clamp_joints(const ArmConfig& config, ArmState state);
bool joints_within_limits(const ArmConfig& config, const ArmState& state);

/// White background, gray links, blue target, red end-effector marker.
Frame render_frame(const ArmConfig& config, const ArmState& state);

/// Adds i.i.d. uniform(-amplitude, amplitude) to every sample, then clamps.
void apply_noise(Frame& frame, Rng& rng, double amplitude);

/// Annulus of this round's chain around the S1 joint.
struct Reach {
  double min;
  double max;
};
Reach reach_bounds(const ArmConfig& config, const ArmState& state);

/// In-limit poses that put the end-effector on `point`, one per solved end-link
/// angle on a fine grid (closed-form two-link solve for the rest). Empty when
/// the point is out of reach.
std::vector<JointVector> inverse_kinematics(const ArmConfig& config, const ArmState& state, Vec2 point,
                                           int grid = 1440);
bool is_reachable(const ArmConfig& config, const ArmState& state, Vec2 point);

Vec2 sample_target(const ArmConfig& config, const ArmState& state, Rng& rng);

ArmState sample_round_params(const ArmConfig& config, const SettingSpec& spec, Rng& rng);

}  // namespace armreach

#endif  // ARMREACH_ARMSIM_HPP
