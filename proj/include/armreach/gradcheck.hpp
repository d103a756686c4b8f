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

// Central-difference gradient checking in double precision.

#ifndef ARMREACH_GRADCHECK_HPP
#define ARMREACH_GRADCHECK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "armreach/loss.hpp"
#include "armreach/qnetwork.hpp"

namespace armreach {

struct GradCheckOptions {
  /// Perturbation is relative_step * max(|theta|, min_scale).
  double relative_step = 1e-4;
  double min_scale = 1e-2;
  std::size_t samples_per_tensor = 16;
  std::uint64_t seed = 1;
  /// Gradients below this magnitude are compared absolutely.
  double magnitude_floor = 1e-6;
  /// Flips the sign of every analytic gradient, to prove the checker bites.
  bool flip_analytic_sign = false;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::vector<std::string> names;
  std::vector<double> per_tensor;
  std::size_t checked = 0;
};

struct GradientView {
  std::string name;
  std::span<double> value;
  std::span<const double> analytic;
};

inline double gradient_relative_error(double analytic, double numeric, double floor) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

/// Perturbs a random sample of entries of every view and compares central
/// differences of `loss` against the analytic gradients.
inline GradCheckReport check_gradients(const std::vector<GradientView>& views, const std::function<double()>& loss,
                                       const GradCheckOptions& opt) {
  GradCheckReport report;
  std::mt19937_64 rng(opt.seed);
  for (const auto& view : views) {
    std::vector<std::size_t> idx(view.value.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(idx.size(), opt.samples_per_tensor));
    double worst = 0.0;
    for (std::size_t i : idx) {
      double& theta = view.value[i];
      const double saved = theta;
      const double h = opt.relative_step * std::max(std::abs(saved), opt.min_scale);
      theta = saved + h;
      const double up = loss();
      theta = saved - h;
      const double down = loss();
      theta = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = opt.flip_analytic_sign ? -view.analytic[i] : view.analytic[i];
      worst = std::max(worst, gradient_relative_error(analytic, numeric, opt.magnitude_floor));
      ++report.checked;
    }
    report.names.push_back(view.name);
    report.per_tensor.push_back(worst);
    report.max_relative_error = std::max(report.max_relative_error, worst);
  }
  return report;
}

/// Gradient check of the full network under q_loss on a single transition.
/// The network is evaluated in double precision regardless of `Scalar`.
template <typename Scalar>
GradCheckReport finite_diff_check(const BasicQNetwork<Scalar>& network, const Tensor<Scalar>& input,
                                  std::size_t action, double target, const GradCheckOptions& opt = {}) {
  auto net = network.template cast<double>();
  const auto x = input.template cast<double>();
  net.zero_grad();
  const auto act = net.forward_cached(x);
  const auto ql = q_loss(act.q, action, target);
  net.backward(act, ql.grad);

  std::vector<GradientView> views;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    auto& layer = net.layers()[i];
    const std::string name = "layer" + std::to_string(i);
    views.push_back({name + ".weights", layer.weights.values(), layer.grad_weights.values()});
    views.push_back({name + ".biases", layer.biases.values(), layer.grad_biases.values()});
  }
  return check_gradients(views, [&] { return q_loss(net.forward(x), action, target).loss; }, opt);
}

}  // namespace armreach

#endif  // ARMREACH_GRADCHECK_HPP
