#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "simlpe/data.hpp"
#include "simlpe/dct.hpp"
#include "simlpe/error.hpp"
#include "simlpe/matrix.hpp"
#include "simlpe/model.hpp"

namespace simlpe {

// Maps a T x C input window to an N x C prediction. Both the trained model
// and the last-frame baseline are evaluated through this signature so they
// share the rollout and metric code exactly.
template <typename S>
using Predictor = std::function<Matrix<S>(const Matrix<S>&)>;

template <typename S>
Predictor<S> model_predictor(const SiMlpeParams<S>& params, const ModelConfig& cfg,
                             const DctBasis<S>& dct) {
  return [&params, &cfg, &dct](const Matrix<S>& x) {
    return forward(params, cfg, dct, x).absolute;
  };
}

template <typename S>
Predictor<S> baseline_predictor(int output_len) {
  return [output_len](const Matrix<S>& x) {
    return last_frame_baseline(x, output_len);
  };
}

// Auto-regressive rollout: predict N frames, slide the T-frame window
// forward by N, repeat until at least `horizon_frames` frames exist, then
// return the first `horizon_frames` of them (ceil(H/N) predictor calls).
template <typename S>
Matrix<S> rollout(const Predictor<S>& predict, const Matrix<S>& input,
                  int step_len, int horizon_frames) {
  if (step_len < 1) throw ConfigError("rollout: step length must be positive");
  if (horizon_frames < 1)
    throw ConfigError("rollout: horizon must be at least one frame");
  const int t = input.rows();
  const int c = input.cols();
  Matrix<S> window = input;
  Matrix<S> out(horizon_frames, c);
  int produced = 0;
  while (produced < horizon_frames) {
    Matrix<S> pred = predict(window);
    if (pred.rows() != step_len || pred.cols() != c)
      throw ShapeError("rollout: predictor returned " + pred.shape_str() +
                       ", expected " + std::to_string(step_len) + "x" +
                       std::to_string(c));
    const int take = std::min(step_len, horizon_frames - produced);
    for (int i = 0; i < take; ++i) {
      const S* src = pred.row(i);
      S* dst = out.row(produced + i);
      for (int j = 0; j < c; ++j) dst[j] = src[j];
    }
    produced += take;
    if (produced >= horizon_frames) break;
    // Slide: keep the last T - N window rows, append the N predicted rows.
    Matrix<S> next(t, c);
    for (int i = 0; i < t - step_len; ++i) {
      const S* src = window.row(i + step_len);
      S* dst = next.row(i);
      for (int j = 0; j < c; ++j) dst[j] = src[j];
    }
    for (int i = 0; i < step_len; ++i) {
      const S* src = pred.row(i);
      S* dst = next.row(t - step_len + i);
      for (int j = 0; j < c; ++j) dst[j] = src[j];
    }
    window = std::move(next);
  }
  return out;
}

// Mean per-joint position error at one frame: the average over joints of the
// Euclidean distance between predicted and true 3-D positions.
template <typename S>
double mpjpe(const Matrix<S>& pred, const Matrix<S>& gt, int frame_index) {
  if (!pred.same_shape(gt))
    throw ShapeError("mpjpe: " + pred.shape_str() + " vs " + gt.shape_str());
  if (pred.cols() % 3 != 0)
    throw ShapeError("mpjpe: channel count " + std::to_string(pred.cols()) +
                     " is not a multiple of 3");
  if (frame_index < 0 || frame_index >= pred.rows())
    throw ConfigError("mpjpe: frame index " + std::to_string(frame_index) +
                      " out of range [0, " + std::to_string(pred.rows()) + ")");
  const S* p = pred.row(frame_index);
  const S* g = gt.row(frame_index);
  const int joints = pred.cols() / 3;
  double sum = 0.0;
  for (int j = 0; j < joints; ++j) {
    const double dx = double(p[3 * j]) - double(g[3 * j]);
    const double dy = double(p[3 * j + 1]) - double(g[3 * j + 1]);
    const double dz = double(p[3 * j + 2]) - double(g[3 * j + 2]);
    sum += std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return sum / joints;
}

// Converts a horizon in milliseconds to a 0-based frame index. The horizon
// must land exactly on a frame boundary: 80 ms at 25 fps is index 1,
// 1000 ms is index 24.
inline int horizon_to_frame(int horizon_ms, double frame_rate) {
  if (horizon_ms <= 0) throw ConfigError("horizon must be positive milliseconds");
  const double frames = horizon_ms * frame_rate / 1000.0;
  const double rounded = std::round(frames);
  if (std::abs(frames - rounded) > 1e-9 || rounded < 1.0) {
    const int interval = static_cast<int>(std::round(1000.0 / frame_rate));
    throw ConfigError("horizon " + std::to_string(horizon_ms) +
                      " ms does not align with the frame grid at " +
                      std::to_string(frame_rate) + " fps; use multiples of " +
                      std::to_string(interval) + " ms");
  }
  return static_cast<int>(rounded) - 1;
}

inline std::vector<int> default_horizons() {
  return {80, 160, 320, 400, 560, 720, 880, 1000};
}

struct EvalReport {
  std::vector<int> horizons_ms;
  std::vector<double> mpjpe_mm;  // averaged over windows, one entry per horizon
  int num_samples = 0;
  int64_t param_count = 0;
  std::string model_tag;
  double frame_rate = 0.0;
};

// Evaluates a predictor over every window of each test sequence, taken at
// `stride`-frame offsets: each window feeds input_len frames in and measures
// MPJPE at the requested horizons of a single rollout.
template <typename S>
EvalReport evaluate(const Predictor<S>& predict,
                    const std::vector<MotionSequence>& test_set, int input_len,
                    int step_len, const std::vector<int>& horizons_ms, int stride,
                    const std::string& model_tag, int64_t param_count = 0) {
  if (test_set.empty()) throw ConfigError("evaluate: empty test set");
  if (horizons_ms.empty()) throw ConfigError("evaluate: no horizons given");
  if (stride < 1) throw ConfigError("evaluate: stride must be positive");
  const double frame_rate = test_set.front().frame_rate;
  const int c = test_set.front().channels();
  std::vector<int> frame_idx;
  int max_frames = 0;
  for (int h : horizons_ms) {
    const int idx = horizon_to_frame(h, frame_rate);
    frame_idx.push_back(idx);
    max_frames = std::max(max_frames, idx + 1);
  }
  const int window_span = input_len + max_frames;

  EvalReport report;
  report.horizons_ms = horizons_ms;
  report.frame_rate = frame_rate;
  report.model_tag = model_tag;
  report.param_count = param_count;
  report.mpjpe_mm.assign(horizons_ms.size(), 0.0);

  Matrix<S> input(input_len, c);
  Matrix<S> gt(max_frames, c);
  for (const MotionSequence& seq : test_set) {
    if (seq.channels() != c || seq.frame_rate != frame_rate)
      throw ShapeError("evaluate: test sequences disagree on layout");
    for (int start = 0; start + window_span <= seq.num_frames; start += stride) {
      for (int i = 0; i < input_len; ++i) {
        const float* src = seq.frame(start + i);
        S* dst = input.row(i);
        for (int j = 0; j < c; ++j) dst[j] = static_cast<S>(src[j]);
      }
      for (int i = 0; i < max_frames; ++i) {
        const float* src = seq.frame(start + input_len + i);
        S* dst = gt.row(i);
        for (int j = 0; j < c; ++j) dst[j] = static_cast<S>(src[j]);
      }
      Matrix<S> pred = rollout(predict, input, step_len, max_frames);
      for (size_t k = 0; k < frame_idx.size(); ++k)
        report.mpjpe_mm[k] += mpjpe(pred, gt, frame_idx[k]);
      ++report.num_samples;
    }
  }
  if (report.num_samples == 0)
    throw ConfigError("evaluate: no window of " + std::to_string(window_span) +
                      " frames fits any test sequence");
  for (double& v : report.mpjpe_mm) v /= report.num_samples;
  return report;
}

// Renders the report as a two-line table: horizons as columns, errors in
// millimeters, the model tag as the row label.
std::string format_report(const EvalReport& report);

// CSV with a "horizon_ms,mpjpe_mm" header and one row per horizon.
void write_report_csv(const std::string& path, const EvalReport& report);

}  // namespace simlpe
