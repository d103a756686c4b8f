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

#ifndef ARMREACH_RMSPROP_HPP
#define ARMREACH_RMSPROP_HPP

#include <cmath>

#include "armreach/layers.hpp"

namespace armreach {

struct RmsPropOptions {
  double learning_rate = 2.5e-4;
  double decay = 0.95;
  double epsilon = 0.01;
};

namespace detail {

template <typename Scalar>
void rmsprop_update(Tensor<Scalar>& param, Tensor<Scalar>& grad, Tensor<Scalar>& sq_avg, const RmsPropOptions& opt) {
  const Scalar decay = static_cast<Scalar>(opt.decay);
  const Scalar keep = static_cast<Scalar>(1.0 - opt.decay);
  const Scalar lr = static_cast<Scalar>(opt.learning_rate);
  const Scalar eps = static_cast<Scalar>(opt.epsilon);
  for (std::size_t i = 0; i < param.size(); ++i) {
    const Scalar g = grad[i];
    sq_avg[i] = decay * sq_avg[i] + keep * g * g;
    param[i] -= lr * g / std::sqrt(sq_avg[i] + eps);
  }
  grad.fill(Scalar(0));
}

}  // namespace detail

/// One uncentred RMSProp step; gradients are zeroed afterwards. Throws
/// NumericError and leaves the layer untouched if any gradient is non-finite.
template <typename Scalar>
void rmsprop_step(LayerParams<Scalar>& params, const RmsPropOptions& opt) {
  if (!params.grad_weights.all_finite() || !params.grad_biases.all_finite()) {
    throw NumericError("rmsprop_step: non-finite gradient");
  }
  detail::rmsprop_update(params.weights, params.grad_weights, params.sq_avg_weights, opt);
  detail::rmsprop_update(params.biases, params.grad_biases, params.sq_avg_biases, opt);
}

}  // namespace armreach

#endif  // ARMREACH_RMSPROP_HPP
