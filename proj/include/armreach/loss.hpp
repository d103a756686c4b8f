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

#ifndef ARMREACH_LOSS_HPP
#define ARMREACH_LOSS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "armreach/tensor.hpp"

namespace armreach {

template <typename Scalar>
struct QLoss {
  Scalar loss;
  Tensor<Scalar> grad;  // d loss / d predicted_q, nonzero only at the chosen action
};

/// Huber error with unit clip on the chosen action's TD error.
template <typename Scalar>
QLoss<Scalar> q_loss(const Tensor<Scalar>& predicted_q, std::size_t action, Scalar target_value) {
  if (action >= predicted_q.size()) {
    throw std::out_of_range("q_loss: action " + std::to_string(action) + " outside [0," +
                            std::to_string(predicted_q.size()) + ")");
  }
  const Scalar delta = predicted_q[action] - target_value;
  const Scalar magnitude = std::abs(delta);
  QLoss<Scalar> out{Scalar(0), Tensor<Scalar>(predicted_q.shape())};
  if (magnitude <= Scalar(1)) {
    out.loss = Scalar(0.5) * delta * delta;
    out.grad[action] = delta;
  } else {
    out.loss = magnitude - Scalar(0.5);
    out.grad[action] = delta > Scalar(0) ? Scalar(1) : Scalar(-1);
  }
  return out;
}

}  // namespace armreach

#endif  // ARMREACH_LOSS_HPP
