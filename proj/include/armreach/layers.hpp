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

// Forward and backward passes for the small fixed layer menu used by the
// Q-network: valid 2D convolution, fully connected, and ReLU. Convolution is
// lowered to a matrix product over an unrolled patch matrix.

#ifndef ARMREACH_LAYERS_HPP
#define ARMREACH_LAYERS_HPP

#include <Eigen/Core>

#include <cmath>
#include <random>
#include <string>

#include "armreach/tensor.hpp"

namespace armreach {

template <typename Scalar>
struct LayerParams {
  Tensor<Scalar> weights;
  Tensor<Scalar> biases;
  Tensor<Scalar> grad_weights;
  Tensor<Scalar> grad_biases;
  // RMSProp running averages of squared gradients.
  Tensor<Scalar> sq_avg_weights;
  Tensor<Scalar> sq_avg_biases;

  LayerParams() = default;
  LayerParams(Shape weight_shape, std::size_t outputs)
      : weights(weight_shape),
        biases(Shape{outputs}),
        grad_weights(weight_shape),
        grad_biases(Shape{outputs}),
        sq_avg_weights(weight_shape),
        sq_avg_biases(Shape{outputs}) {}

  /// Fan-in of one output unit: every weight dimension but the first.
  std::size_t fan_in() const { return weights.size() / weights.dim(0); }

  /// Uniform in +-1/sqrt(fan_in) for weights and biases.
  template <typename Rng>
  void init_uniform(Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& w : weights.values()) w = static_cast<Scalar>(dist(rng));
    for (auto& b : biases.values()) b = static_cast<Scalar>(dist(rng));
  }

  void zero_grad() {
    grad_weights.fill(Scalar(0));
    grad_biases.fill(Scalar(0));
  }

  template <typename Other>
  LayerParams<Other> cast() const {
    LayerParams<Other> out;
    out.weights = weights.template cast<Other>();
    out.biases = biases.template cast<Other>();
    out.grad_weights = grad_weights.template cast<Other>();
    out.grad_biases = grad_biases.template cast<Other>();
    out.sq_avg_weights = sq_avg_weights.template cast<Other>();
    out.sq_avg_biases = sq_avg_biases.template cast<Other>();
    return out;
  }
};

namespace detail {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using MatrixMap = Eigen::Map<RowMatrix<Scalar>>;
template <typename Scalar>
using ConstMatrixMap = Eigen::Map<const RowMatrix<Scalar>>;

struct ConvGeometry {
  std::size_t in_channels, height, width;
  std::size_t out_channels, kernel, stride;
  std::size_t out_height, out_width;

  std::size_t patch() const { return in_channels * kernel * kernel; }
  std::size_t positions() const { return out_height * out_width; }
};

template <typename Scalar>
ConvGeometry conv_geometry(const Tensor<Scalar>& input, const LayerParams<Scalar>& params, std::size_t stride) {
  if (input.rank() != 3) throw ShapeError("conv2d expects input [C,H,W], got " + shape_string(input.shape()));
  const auto& w = params.weights;
  if (w.rank() != 4 || w.dim(2) != w.dim(3)) {
    throw ShapeError("conv2d expects square weights [Cout,Cin,K,K], got " + shape_string(w.shape()));
  }
  if (w.dim(1) != input.dim(0)) {
    throw ShapeError("conv2d channel mismatch: input " + shape_string(input.shape()) + " vs weights " +
                     shape_string(w.shape()));
  }
  if (params.biases.size() != w.dim(0)) {
    throw ShapeError("conv2d bias length " + std::to_string(params.biases.size()) + " vs " +
                     std::to_string(w.dim(0)) + " filters");
  }
  if (stride == 0) throw ShapeError("conv2d stride must be positive");
  const std::size_t k = w.dim(2);
  if (input.dim(1) < k || input.dim(2) < k) {
    throw ShapeError("conv2d input " + shape_string(input.shape()) + " smaller than kernel " + std::to_string(k));
  }
  ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), w.dim(0), k, stride, 0, 0};
  g.out_height = (g.height - k) / stride + 1;
  g.out_width = (g.width - k) / stride + 1;
  return g;
}

// Patch matrix of shape [Cin*K*K, H'*W'], row-major.
template <typename Scalar>
void im2col(const Tensor<Scalar>& input, const ConvGeometry& g, AlignedVector<Scalar>& cols) {
  cols.resize(g.patch() * g.positions());
  Scalar* out = cols.data();
  for (std::size_t c = 0; c < g.in_channels; ++c) {
    for (std::size_t ky = 0; ky < g.kernel; ++ky) {
      for (std::size_t kx = 0; kx < g.kernel; ++kx) {
        for (std::size_t oy = 0; oy < g.out_height; ++oy) {
          const Scalar* row = &input.at(c, oy * g.stride + ky, kx);
          for (std::size_t ox = 0; ox < g.out_width; ++ox) *out++ = row[ox * g.stride];
        }
      }
    }
  }
}

template <typename Scalar>
void col2im_add(const AlignedVector<Scalar>& cols, const ConvGeometry& g, Tensor<Scalar>& grad_input) {
  const Scalar* in = cols.data();
  for (std::size_t c = 0; c < g.in_channels; ++c) {
    for (std::size_t ky = 0; ky < g.kernel; ++ky) {
      for (std::size_t kx = 0; kx < g.kernel; ++kx) {
        for (std::size_t oy = 0; oy < g.out_height; ++oy) {
          Scalar* row = &grad_input.at(c, oy * g.stride + ky, kx);
          for (std::size_t ox = 0; ox < g.out_width; ++ox) row[ox * g.stride] += *in++;
        }
      }
    }
  }
}

}  // namespace detail

/// Valid (unpadded) convolution. Weights are [Cout, Cin, K, K].
template <typename Scalar>
Tensor<Scalar> conv2d(const Tensor<Scalar>& input, const LayerParams<Scalar>& params, std::size_t stride) {
  const auto g = detail::conv_geometry(input, params, stride);
  AlignedVector<Scalar> cols;
  detail::im2col(input, g, cols);
  Tensor<Scalar> out(Shape{g.out_channels, g.out_height, g.out_width});
  detail::ConstMatrixMap<Scalar> w(params.weights.data(), g.out_channels, g.patch());
  detail::ConstMatrixMap<Scalar> x(cols.data(), g.patch(), g.positions());
  detail::MatrixMap<Scalar> y(out.data(), g.out_channels, g.positions());
  y.noalias() = w * x;
  for (std::size_t o = 0; o < g.out_channels; ++o) y.row(o).array() += params.biases[o];
  return out;
}

/// Accumulates weight and bias gradients; writes the input gradient when
/// `grad_input` is non-null.
template <typename Scalar>
void conv2d_backward(const Tensor<Scalar>& input, const Tensor<Scalar>& grad_output, LayerParams<Scalar>& params,
                     std::size_t stride, Tensor<Scalar>* grad_input) {
  const auto g = detail::conv_geometry(input, params, stride);
  if (grad_output.shape() != Shape{g.out_channels, g.out_height, g.out_width}) {
    throw ShapeError("conv2d backward: upstream gradient " + shape_string(grad_output.shape()) +
                     " does not match output shape");
  }
  AlignedVector<Scalar> cols;
  detail::im2col(input, g, cols);
  detail::ConstMatrixMap<Scalar> x(cols.data(), g.patch(), g.positions());
  detail::ConstMatrixMap<Scalar> gy(grad_output.data(), g.out_channels, g.positions());
  detail::MatrixMap<Scalar> gw(params.grad_weights.data(), g.out_channels, g.patch());
  gw.noalias() += gy * x.transpose();
  for (std::size_t o = 0; o < g.out_channels; ++o) params.grad_biases[o] += gy.row(o).sum();

  if (grad_input != nullptr) {
    detail::ConstMatrixMap<Scalar> w(params.weights.data(), g.out_channels, g.patch());
    AlignedVector<Scalar> gcols(cols.size());
    detail::MatrixMap<Scalar> gx(gcols.data(), g.patch(), g.positions());
    gx.noalias() = w.transpose() * gy;
    *grad_input = Tensor<Scalar>(input.shape());
    detail::col2im_add(gcols, g, *grad_input);
  }
}

/// Fully connected layer, weights [M, N]. Input of any shape with N elements.
template <typename Scalar>
Tensor<Scalar> linear(const Tensor<Scalar>& input, const LayerParams<Scalar>& params) {
  const auto& w = params.weights;
  if (w.rank() != 2 || w.dim(1) != input.size() || params.biases.size() != w.dim(0)) {
    throw ShapeError("linear expects weights [M," + std::to_string(input.size()) + "] and bias [M], got " +
                     shape_string(w.shape()) + " and " + shape_string(params.biases.shape()));
  }
  Tensor<Scalar> out(Shape{w.dim(0)});
  detail::ConstMatrixMap<Scalar> wm(w.data(), w.dim(0), w.dim(1));
  Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> x(input.data(), input.size());
  Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> b(params.biases.data(), w.dim(0));
  Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> y(out.data(), w.dim(0));
  y.noalias() = wm * x;
  y += b;
  return out;
}

template <typename Scalar>
void linear_backward(const Tensor<Scalar>& input, const Tensor<Scalar>& grad_output, LayerParams<Scalar>& params,
                     Tensor<Scalar>* grad_input) {
  const auto& w = params.weights;
  if (w.rank() != 2 || w.dim(1) != input.size() || grad_output.size() != w.dim(0)) {
    throw ShapeError("linear backward: weights " + shape_string(w.shape()) + ", input " +
                     shape_string(input.shape()) + ", upstream " + shape_string(grad_output.shape()));
  }
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Eigen::Map<const Vec> x(input.data(), input.size());
  Eigen::Map<const Vec> gy(grad_output.data(), grad_output.size());
  detail::MatrixMap<Scalar> gw(params.grad_weights.data(), w.dim(0), w.dim(1));
  gw.noalias() += gy * x.transpose();
  Eigen::Map<Vec>(params.grad_biases.data(), w.dim(0)) += gy;
  if (grad_input != nullptr) {
    *grad_input = Tensor<Scalar>(input.shape());
    detail::ConstMatrixMap<Scalar> wm(w.data(), w.dim(0), w.dim(1));
    Eigen::Map<Vec>(grad_input->data(), input.size()).noalias() = wm.transpose() * gy;
  }
}

template <typename Scalar>
Tensor<Scalar> relu(const Tensor<Scalar>& input) {
  Tensor<Scalar> out = input;
  for (auto& v : out.values()) v = v > Scalar(0) ? v : Scalar(0);
  return out;
}

/// Gradient passes only where the forward input was strictly positive.
template <typename Scalar>
Tensor<Scalar> relu_backward(const Tensor<Scalar>& input, const Tensor<Scalar>& grad_output) {
  if (input.size() != grad_output.size()) {
    throw ShapeError("relu backward: input " + shape_string(input.shape()) + " vs upstream " +
                     shape_string(grad_output.shape()));
  }
  Tensor<Scalar> out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > Scalar(0) ? grad_output[i] : Scalar(0);
  return out;
}

}  // namespace armreach

#endif  // ARMREACH_LAYERS_HPP
