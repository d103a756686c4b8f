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

#ifndef ARMREACH_REPLAY_HPP
#define ARMREACH_REPLAY_HPP

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

#include "armreach/armsim.hpp"
#include "armreach/binary_io.hpp"
#include "armreach/rewardenv.hpp"

namespace armreach {

struct Transition {
  Observation observation;
  int action = 0;
  float reward = 0.0f;
  Observation next_observation;
  bool terminal = false;
};

/// An 84x84 frame stored as round(value * 255).
using QuantizedFrame = std::vector<std::uint8_t>;
using QuantizedFramePtr = std::shared_ptr<const QuantizedFrame>;

/// Fixed-capacity FIFO of transitions with uniform sampling.
///
/// Frames are quantized to 8 bits on insertion. Consecutive transitions share
/// most of their stacked frames, so each source frame is quantized once and
/// the result is shared by every stack that refers to it.
class ReplayMemory {
 public:
  struct Stored {
    std::array<QuantizedFramePtr, kStackDepth> observation;
    std::array<QuantizedFramePtr, kStackDepth> next_observation;
    int action = 0;
    float reward = 0.0f;
    bool terminal = false;
  };

  explicit ReplayMemory(std::size_t capacity);

  void remember(const Transition& t);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return ring_.size(); }
  bool empty() const { return size_ == 0; }

  /// 0 is the oldest retained transition.
  const Stored& at(std::size_t i) const;
  /// Dequantized copy of transition `i`.
  Transition transition(std::size_t i) const;

  /// Uniform with replacement over the current contents.
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

  Tensor<float> observation_tensor(std::size_t i) const;
  Tensor<float> next_observation_tensor(std::size_t i) const;

  void save(BinaryWriter& w) const;
  void load(BinaryReader& r);
  /// After load(): lets the frames of `obs` share storage with the newest
  /// transition's next observation when they hold the same pixels, as they
  /// would have without the reload.
  void adopt_latest(const Observation& obs);

 private:
  std::array<QuantizedFramePtr, kStackDepth> quantize_stack(const Observation& obs);
  QuantizedFramePtr quantize(const FramePtr& frame);

  std::vector<Stored> ring_;
  std::size_t cursor_ = 0;
  std::size_t size_ = 0;
  // Recently seen source frames; holding the source keeps the pointer key
  // from being reused while cached.
  std::deque<std::pair<FramePtr, QuantizedFramePtr>> recent_;
};

std::uint8_t quantize_pixel(float v);
inline float dequantize_pixel(std::uint8_t q) { return static_cast<float>(q) / 255.0f; }

}  // namespace armreach

#endif  // ARMREACH_REPLAY_HPP
