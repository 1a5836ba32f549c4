// SPDX-License-Identifier: Apache-2.0
#include "prunelab/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace prunelab {

AdamW::AdamW(const ModelState& shape_ref, AdamWConfig cfg) : cfg_(cfg) {
  m_.reserve(shape_ref.params.size());
  v_.reserve(shape_ref.params.size());
  for (const auto& p : shape_ref.params) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void AdamW::step(ModelState& state, const GradientSet& grads, double lr) {
  if (!grads.matches(state))
    throw std::invalid_argument("AdamW::step: gradient keys do not match state");
  if (m_.size() != state.params.size())
    throw std::invalid_argument("AdamW::step: optimizer built for a different model");

  ++step_count_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, step_count_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, step_count_);

  for (std::size_t i = 0; i < state.params.size(); ++i) {
    auto& p = state.params[i];
    const auto& g = grads[i];
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < p.values.size(); ++j) {
      const double gj = g[j];
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * gj;
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * gj * gj;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      const double w = double(p.values[j]);
      p.values[j] =
          float(w - lr * (mhat / (std::sqrt(vhat) + cfg_.eps) +
                          cfg_.weight_decay * w));
    }
  }
}

}  // namespace prunelab
