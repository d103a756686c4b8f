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

// Network bridge: an external controller streams joint angles, the bridge
// renders the matching synthetic frame, runs the Q-network on the frame stack
// and answers with an action and the pose that action implies.
//
// Wire format is one JSON object per line:
//
//   -> {"kind":"hello","version":1}
//   <- {"kind":"hello","version":1}
//   -> {"kind":"reset","target":[u,v]}
//   <- {"kind":"reset","target":[u,v]}
//   -> {"kind":"joints","joints":[s1,e1,w1]}
//   <- {"kind":"action","action":a,"q_values":[...9],"clamped":false}
//   <- {"kind":"pose_update","joints":[s1',e1',w1']}
//
// Any bad line is answered with {"kind":"error","field":...,"message":...}
// and the session carries on.

#ifndef ARMREACH_BRIDGE_HPP
#define ARMREACH_BRIDGE_HPP

#include <array>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "armreach/agent.hpp"
#include "armreach/rewardenv.hpp"

namespace armreach::bridge {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxLineBytes = 1 << 16;

enum class MessageKind { hello, reset, joints, action, pose_update, error };

const char* kind_name(MessageKind kind);

struct Message {
  MessageKind kind = MessageKind::hello;
  int version = kProtocolVersion;               // hello
  Vec2 target;                                  // reset
  JointVector joints{};                         // joints, pose_update
  int action = 0;                               // action
  std::array<double, kActionCount> q_values{};  // action
  bool clamped = false;                         // action
  std::string field;                            // error: offending field, may be empty
  std::string text;                             // error: human-readable message

  friend bool operator==(const Message&, const Message&) = default;
};

/// Decode failure; `field()` names the offending field ("line" when the text
/// is not a JSON object at all).
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string field, const std::string& what) : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// One line, no trailing newline. Doubles keep round-trip precision.
std::string encode(const Message& m);
Message decode(const std::string& line);

Message make_error(std::string field, std::string text);

struct BridgeOptions {
  ArmConfig arm;
  SettingSpec setting = SettingSpec::from_id(SettingId::A);
  /// Pixel noise follows the setting only when this is set.
  bool noise = false;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::optional<std::filesystem::path> record_dir;
};

/// Writes every synthetic frame as a lossless PFM plus a manifest row
/// (index, timestamp, joints, action, q_values).
class FrameRecorder {
 public:
  /// Disabled, with a warning on stderr, if `dir` cannot be created.
  explicit FrameRecorder(const std::filesystem::path& dir);

  bool enabled() const { return enabled_; }
  void record(const JointVector& joints, const Frame& native, const ActionChoice& choice);
  std::size_t count() const { return count_; }
  const std::filesystem::path& dir() const { return dir_; }

  static std::filesystem::path frame_path(const std::filesystem::path& dir, std::size_t index);

 private:
  std::filesystem::path dir_;
  std::ofstream manifest_;
  std::chrono::steady_clock::time_point start_;
  std::size_t count_ = 0;
  bool enabled_ = false;
};

struct ManifestRow {
  std::size_t index = 0;
  double timestamp = 0.0;
  JointVector joints{};
  int action = 0;
  std::array<float, kActionCount> q_values{};
};
std::vector<ManifestRow> read_manifest(const std::filesystem::path& dir);

/// Protocol state machine for one client. Never modifies the network.
class Session {
 public:
  enum class State { await_hello, await_reset, running };

  Session(const QNetwork& network, const BridgeOptions& options,
          std::optional<std::filesystem::path> record_dir = std::nullopt);

  /// Replies to one incoming line, in order.
  std::vector<Message> handle(const std::string& line);
  std::vector<Message> handle(const Message& m);

  State state() const { return state_; }
  const ArmState& arm_state() const { return sim_; }
  const Observation& observation() const { return observation_; }
  const Frame& last_native_frame() const { return native_; }
  std::size_t frames_rendered() const { return frames_; }
  const FrameRecorder* recorder() const { return recorder_ ? &*recorder_ : nullptr; }

 private:
  std::vector<Message> on_joints(const JointVector& joints);

  const QNetwork& network_;
  BridgeOptions options_;
  State state_ = State::await_hello;
  ArmState sim_;
  Observation observation_;
  Frame native_;
  Rng noise_rng_;
  Rng policy_rng_;
  std::size_t frames_ = 0;
  std::optional<FrameRecorder> recorder_;
};

struct ServeControl {
  std::atomic<bool> stop{false};
  /// Called once the socket is listening, with the bound port.
  std::function<void(int port)> on_listening;
  /// 0 = serve forever.
  std::size_t max_sessions = 0;
};

/// Blocking accept loop, one client at a time. `address` is HOST:PORT; port 0
/// binds an ephemeral port. With a record dir, session k records into
/// `<dir>/session_<k>`.
void serve(const QNetwork& network, const BridgeOptions& options, const std::string& address, ServeControl& control);

/// Minimal blocking line client, used by tests and tools.
class LineClient {
 public:
  LineClient(const std::string& host, int port);
  ~LineClient();
  LineClient(const LineClient&) = delete;
  LineClient& operator=(const LineClient&) = delete;

  void send_line(const std::string& line);
  /// Empty optional on orderly shutdown by the peer.
  std::optional<std::string> read_line();

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace armreach::bridge

#endif  // ARMREACH_BRIDGE_HPP
