#pragma once

// Adam with bias correction over the parameter arrays, plus the step-decay
// learning-rate schedule (constant initial rate, single drop to the final
// rate).

#include <cmath>
#include <cstdint>

#include "simlpe/error.hpp"
#include "simlpe/model.hpp"

namespace simlpe {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename S>
struct AdamState {
  int64_t step = 0;
  AdamConfig cfg;
  SiMlpeParams<S> m;   // first moments, shapes mirror the parameters
  SiMlpeParams<S> v;   // second moments
};

template <typename S>
AdamState<S> make_adam_state(const SiMlpeParams<S>& params, AdamConfig cfg = {}) {
  AdamState<S> st;
  st.cfg = cfg;
  st.m = zeros_like(params);
  st.v = zeros_like(params);
  return st;
}

// m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;
// theta <- theta - lr * mhat / (sqrt(vhat) + eps).
template <typename S>
void adam_step(AdamState<S>& st, SiMlpeParams<S>& params,
               const SiMlpeParams<S>& grads, double lr) {
  auto p_refs = tensor_refs(params);
  auto g_refs = tensor_refs(grads);
  auto m_refs = tensor_refs(st.m);
  auto v_refs = tensor_refs(st.v);
  if (p_refs.size() != g_refs.size() || p_refs.size() != m_refs.size())
    throw ShapeError("adam: parameter and gradient structures differ");

  st.step += 1;
  const S b1 = static_cast<S>(st.cfg.beta1);
  const S b2 = static_cast<S>(st.cfg.beta2);
  const S eps = static_cast<S>(st.cfg.eps);
  const S inv_bc1 =
      static_cast<S>(1.0 / (1.0 - std::pow(st.cfg.beta1, static_cast<double>(st.step))));
  const S inv_bc2 =
      static_cast<S>(1.0 / (1.0 - std::pow(st.cfg.beta2, static_cast<double>(st.step))));
  const S step_size = static_cast<S>(lr);

  for (size_t t = 0; t < p_refs.size(); ++t) {
    auto& p = *p_refs[t];
    const auto& g = *g_refs[t];
    auto& m = *m_refs[t];
    auto& v = *v_refs[t];
    if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size())
      throw ShapeError("adam: array " + std::to_string(t) + " size mismatch (" +
                       std::to_string(p.size()) + " params, " +
                       std::to_string(g.size()) + " grads)");
    for (size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (S(1) - b1) * g[i];
      v[i] = b2 * v[i] + (S(1) - b2) * g[i] * g[i];
      const S mhat = m[i] * inv_bc1;
      const S vhat = v[i] * inv_bc2;
      p[i] -= step_size * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

struct LrSchedule {
  double initial_lr = 3e-4;
  double final_lr = 1e-5;
  int64_t drop_step = 30000;
  int64_t total_steps = 35000;
};

inline double lr_at(const LrSchedule& s, int64_t step) {
  return step < s.drop_step ? s.initial_lr : s.final_lr;
}

}  // namespace simlpe
