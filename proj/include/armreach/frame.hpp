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

#ifndef ARMREACH_FRAME_HPP
#define ARMREACH_FRAME_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace armreach {

/// Interleaved float image, values in [0, 1].
struct Frame {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> pixels;

  Frame() = default;
  Frame(int w, int h, int c, float fill = 0.0f)
      : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w) * h * c, fill) {}

  float& at(int x, int y, int c = 0) { return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
  float at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary PGM (1 channel) or PPM (3 channels), 8 bits per sample.
void write_pnm(const std::filesystem::path& path, const Frame& frame);
Frame read_pnm(const std::filesystem::path& path);
std::string encode_pnm(const Frame& frame);

/// Portable float map; lossless for float frames.
void write_pfm(const std::filesystem::path& path, const Frame& frame);
Frame read_pfm(const std::filesystem::path& path);

}  // namespace armreach

#endif  // ARMREACH_FRAME_HPP
