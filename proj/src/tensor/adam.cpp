#include "ltn/tensor/adam.hpp"

#include <cmath>

#include "ltn/error.hpp"

namespace ltn {

Adam::Adam(AdamConfig config) : config_(config) {
  if (!(config_.beta1 >= 0 && config_.beta1 < 1) || !(config_.beta2 >= 0 && config_.beta2 < 1)) {
    throw Error("adam: betas must lie in [0, 1)");
  }
  if (!(config_.epsilon > 0)) throw Error("adam: epsilon must be positive");
  if (!(config_.learning_rate > 0)) throw Error("adam: learning rate must be positive");
}

void Adam::step(ParameterStore& params, const Gradients& grads) {
  for (const auto& [name, g] : grads) {
    if (params.get(name).shape() != g.shape()) {
      throw ShapeError("adam: gradient for '" + name + "' has shape " + shape_string(g.shape()) +
                       ", parameter has " + shape_string(params.get(name).shape()));
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (const auto& [name, g] : grads) {
    Array& p = params.get_mutable(name);
    auto [mit, _m] = m_.try_emplace(name, g.shape());
    auto [vit, _v] = v_.try_emplace(name, g.shape());
    auto m = mit->second.mutable_data();
    auto v = vit->second.mutable_data();
    auto pd = p.mutable_data();
    for (std::size_t i = 0; i < pd.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      pd[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace ltn
