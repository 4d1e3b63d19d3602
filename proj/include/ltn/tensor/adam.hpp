#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ltn/tensor/parameters.hpp"

namespace ltn {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias-corrected moment estimates. Moments are created lazily
/// the first time a parameter receives a gradient.
class Adam {
 public:
  explicit Adam(AdamConfig config = {});

  /// Applies one update to every parameter in `grads`. Parameters without
  /// a gradient entry are left untouched.
  void step(ParameterStore& params, const Gradients& grads);

  std::uint64_t steps() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::uint64_t step_ = 0;
  std::map<std::string, Array> m_;
  std::map<std::string, Array> v_;
};

}  // namespace ltn
