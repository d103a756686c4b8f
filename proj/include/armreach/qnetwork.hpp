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

#ifndef ARMREACH_QNETWORK_HPP
#define ARMREACH_QNETWORK_HPP

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "armreach/layers.hpp"
#include "armreach/rmsprop.hpp"

namespace armreach {

struct ConvLayerSpec {
  std::size_t filters;
  std::size_t kernel;
  std::size_t stride;
  friend bool operator==(const ConvLayerSpec&, const ConvLayerSpec&) = default;
};

/// Three valid convolutions with ReLU, a ReLU hidden layer, and a linear
/// Q-value head.
struct NetworkArchitecture {
  std::size_t input_channels = 4;
  std::size_t input_height = 84;
  std::size_t input_width = 84;
  std::array<ConvLayerSpec, 3> conv{{{32, 8, 4}, {64, 4, 2}, {64, 3, 1}}};
  std::size_t hidden = 512;
  std::size_t actions = 9;

  static NetworkArchitecture atari() { return {}; }
  /// 16/32/32 filters and 256 hidden units, for single-machine runs.
  static NetworkArchitecture reduced() {
    NetworkArchitecture a;
    a.conv = {{{16, 8, 4}, {32, 4, 2}, {32, 3, 1}}};
    a.hidden = 256;
    return a;
  }

  /// Spatial size after each convolution, as {height, width}.
  std::array<std::array<std::size_t, 2>, 3> conv_output_sizes() const {
    std::array<std::array<std::size_t, 2>, 3> out{};
    std::size_t h = input_height, w = input_width;
    for (std::size_t i = 0; i < 3; ++i) {
      if (h < conv[i].kernel || w < conv[i].kernel || conv[i].stride == 0) {
        throw ShapeError("architecture: conv" + std::to_string(i + 1) + " does not fit its input");
      }
      h = (h - conv[i].kernel) / conv[i].stride + 1;
      w = (w - conv[i].kernel) / conv[i].stride + 1;
      out[i] = {h, w};
    }
    return out;
  }

  std::size_t flattened() const {
    const auto sizes = conv_output_sizes();
    return conv[2].filters * sizes[2][0] * sizes[2][1];
  }

  std::string describe() const {
    std::ostringstream os;
    os << "input=" << input_channels << 'x' << input_height << 'x' << input_width;
    for (std::size_t i = 0; i < 3; ++i) {
      os << " conv" << i + 1 << '=' << conv[i].filters << ':' << conv[i].kernel << ':' << conv[i].stride;
    }
    os << " hidden=" << hidden << " actions=" << actions;
    return os.str();
  }

  friend bool operator==(const NetworkArchitecture&, const NetworkArchitecture&) = default;
};

template <typename Scalar>
class BasicQNetwork {
 public:
  static constexpr std::size_t kLayers = 5;

  /// Post-ReLU outputs of each hidden layer plus the Q head.
  struct Activations {
    Tensor<Scalar> input;
    std::array<Tensor<Scalar>, 3> conv;
    Tensor<Scalar> hidden;
    Tensor<Scalar> q;
  };

  BasicQNetwork() : BasicQNetwork(NetworkArchitecture{}) {}

  explicit BasicQNetwork(NetworkArchitecture arch) : arch_(arch) {
    std::size_t channels = arch_.input_channels;
    layers_.reserve(kLayers);
    for (const auto& c : arch_.conv) {
      layers_.emplace_back(Shape{c.filters, channels, c.kernel, c.kernel}, c.filters);
      channels = c.filters;
    }
    layers_.emplace_back(Shape{arch_.hidden, arch_.flattened()}, arch_.hidden);
    layers_.emplace_back(Shape{arch_.actions, arch_.hidden}, arch_.actions);
  }

  template <typename Rng>
  void init(Rng& rng) {
    for (auto& layer : layers_) layer.init_uniform(rng);
  }

  const NetworkArchitecture& architecture() const { return arch_; }
  std::vector<LayerParams<Scalar>>& layers() { return layers_; }
  const std::vector<LayerParams<Scalar>>& layers() const { return layers_; }

  Shape input_shape() const { return {arch_.input_channels, arch_.input_height, arch_.input_width}; }

  Tensor<Scalar> forward(const Tensor<Scalar>& input) const { return forward_cached(input).q; }

  Activations forward_cached(const Tensor<Scalar>& input) const {
    if (input.shape() != input_shape()) {
      throw ShapeError("network expects input " + shape_string(input_shape()) + ", got " +
                       shape_string(input.shape()));
    }
    Activations act;
    act.input = input;
    const Tensor<Scalar>* x = &act.input;
    for (std::size_t i = 0; i < 3; ++i) {
      act.conv[i] = relu(conv2d(*x, layers_[i], arch_.conv[i].stride));
      x = &act.conv[i];
    }
    act.hidden = relu(linear(act.conv[2], layers_[3]));
    act.q = linear(act.hidden, layers_[4]);
    return act;
  }

  /// Accumulates parameter gradients for d loss / d q = `grad_q`.
  void backward(const Activations& act, const Tensor<Scalar>& grad_q) {
    Tensor<Scalar> g;
    linear_backward(act.hidden, grad_q, layers_[4], &g);
    g = relu_backward(act.hidden, g);
    Tensor<Scalar> g_flat;
    linear_backward(act.conv[2], g, layers_[3], &g_flat);
    g_flat.reshape(act.conv[2].shape());
    g = relu_backward(act.conv[2], g_flat);
    for (std::size_t i = 2; i > 0; --i) {
      Tensor<Scalar> g_in;
      conv2d_backward(act.conv[i - 1], g, layers_[i], arch_.conv[i].stride, &g_in);
      g = relu_backward(act.conv[i - 1], g_in);
    }
    conv2d_backward<Scalar>(act.input, g, layers_[0], arch_.conv[0].stride, nullptr);
  }

  void zero_grad() {
    for (auto& layer : layers_) layer.zero_grad();
  }

  bool gradients_finite() const {
    for (const auto& layer : layers_) {
      if (!layer.grad_weights.all_finite() || !layer.grad_biases.all_finite()) return false;
    }
    return true;
  }

  /// All-or-nothing: throws NumericError before touching any layer if a
  /// gradient is non-finite.
  void apply_rmsprop(const RmsPropOptions& opt) {
    if (!gradients_finite()) throw NumericError("network gradients contain NaN or Inf");
    for (auto& layer : layers_) rmsprop_step(layer, opt);
  }

  /// Parameters only; optimizer state of `this` is preserved.
  void copy_parameters_from(const BasicQNetwork& other) {
    if (!(other.arch_ == arch_)) throw ShapeError("cannot copy parameters between different architectures");
    for (std::size_t i = 0; i < kLayers; ++i) {
      layers_[i].weights = other.layers_[i].weights;
      layers_[i].biases = other.layers_[i].biases;
    }
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.weights.size() + layer.biases.size();
    return n;
  }

  /// FNV-1a over raw parameter bytes.
  std::uint64_t parameter_checksum() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const Tensor<Scalar>& t) {
      const auto* bytes = reinterpret_cast<const unsigned char*>(t.data());
      for (std::size_t i = 0; i < t.size() * sizeof(Scalar); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
      }
    };
    for (const auto& layer : layers_) {
      mix(layer.weights);
      mix(layer.biases);
    }
    return h;
  }

  template <typename Other>
  BasicQNetwork<Other> cast() const {
    BasicQNetwork<Other> out(arch_);
    for (std::size_t i = 0; i < kLayers; ++i) out.layers()[i] = layers_[i].template cast<Other>();
    return out;
  }

 private:
  NetworkArchitecture arch_;
  std::vector<LayerParams<Scalar>> layers_;
};

using QNetwork = BasicQNetwork<float>;

}  // namespace armreach

#endif  // ARMREACH_QNETWORK_HPP
