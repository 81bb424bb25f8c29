#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "simlpe/data.hpp"
#include "simlpe/dct.hpp"
#include "simlpe/loss.hpp"
#include "simlpe/model.hpp"
#include "simlpe/optim.hpp"
#include "simlpe/rng.hpp"

namespace simlpe {

struct LossRecord {
  int64_t step = 0;
  double lr = 0.0;
  double total = 0.0;
  double re = 0.0;
  double v = 0.0;
};

struct TrainOptions {
  int64_t total_steps = 35000;
  int batch_size = 256;
  int log_every = 100;
  LrSchedule schedule;
  LossWeights weights;
  uint64_t seed = 0;
  // Invoked for every appended loss record; useful for live progress output.
  std::function<void(const LossRecord&)> on_record;
};

template <typename S>
struct TrainResult {
  SiMlpeParams<S> params;
  std::vector<LossRecord> trace;
};

namespace detail {

template <typename S>
void accumulate_grads(SiMlpeParams<S>& acc, const SiMlpeParams<S>& g) {
  auto dst = tensor_refs(acc);
  auto src = tensor_refs(g);
  for (size_t i = 0; i < dst.size(); ++i) {
    auto& d = *dst[i];
    const auto& s = *src[i];
    for (size_t k = 0; k < d.size(); ++k) d[k] += s[k];
  }
}

template <typename S>
void scale_grads(SiMlpeParams<S>& acc, S factor) {
  for (auto* arr : tensor_refs(acc))
    for (auto& v : *arr) v *= factor;
}

}  // namespace detail

// Seeded mini-batch training loop: each step draws `batch_size` samples
// uniformly with replacement, averages the loss and its gradient over the
// batch, and applies one Adam update at the scheduled learning rate. The
// trace holds a record for step 0, every `log_every` steps, and the final
// step. Identical seed, config, and data give bitwise-identical parameters.
template <typename S>
TrainResult<S> train(const ModelConfig& cfg, const std::vector<TrainSample<S>>& data,
                     const TrainOptions& opts) {
  cfg.validate();
  if (data.empty()) throw ConfigError("train: no training samples");
  if (opts.total_steps < 1) throw ConfigError("train: total_steps must be >= 1");
  if (opts.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  for (const auto& s : data) {
    if (s.input.rows() != cfg.input_len || s.input.cols() != cfg.channels ||
        s.target.rows() != cfg.output_len || s.target.cols() != cfg.channels)
      throw ShapeError("train: sample " + s.input.shape_str() + "->" +
                       s.target.shape_str() + " does not match config " +
                       std::to_string(cfg.input_len) + "x" +
                       std::to_string(cfg.channels) + "->" +
                       std::to_string(cfg.output_len) + "x" +
                       std::to_string(cfg.channels));
  }

  const DctBasis<S> dct = build_dct_basis<S>(cfg.input_len);
  TrainResult<S> result;
  result.params = init_params<S>(cfg, derive_seed(opts.seed, 0));
  AdamState<S> adam = make_adam_state<S>(result.params);
  Rng batch_rng(derive_seed(opts.seed, 1));

  SiMlpeParams<S> grad_acc = zeros_like(result.params);
  for (int64_t step = 0; step < opts.total_steps; ++step) {
    const double lr = lr_at(opts.schedule, step);
    for (auto* arr : tensor_refs(grad_acc))
      for (auto& v : *arr) v = S(0);
    double total = 0.0, re = 0.0, v = 0.0;
    for (int b = 0; b < opts.batch_size; ++b) {
      const TrainSample<S>& sample = data[batch_rng.index(data.size())];
      ForwardCache<S> cache;
      Prediction<S> pred = forward(result.params, cfg, dct, sample.input, &cache);
      LossValue<S> loss = total_loss(opts.weights, pred.absolute, sample.target);
      total += loss.total;
      re += loss.re;
      v += loss.v;
      SiMlpeParams<S> g = backward(result.params, cfg, dct, cache, loss.grad);
      detail::accumulate_grads(grad_acc, g);
    }
    detail::scale_grads(grad_acc, S(1) / static_cast<S>(opts.batch_size));

    if (step % opts.log_every == 0 || step == opts.total_steps - 1) {
      LossRecord rec;
      rec.step = step;
      rec.lr = lr;
      rec.total = total / opts.batch_size;
      rec.re = re / opts.batch_size;
      rec.v = v / opts.batch_size;
      if (!std::isfinite(rec.total))
        throw NumericError("train: loss diverged at step " + std::to_string(step));
      result.trace.push_back(rec);
      if (opts.on_record) opts.on_record(rec);
    }
    adam_step(adam, result.params, grad_acc, lr);
  }
  return result;
}

// CSV with header "step,lr,loss_total,loss_re,loss_v".
void write_loss_trace(const std::string& path, const std::vector<LossRecord>& trace);

}  // namespace simlpe
