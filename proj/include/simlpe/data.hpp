#pragma once

// Motion sequences (3D joint coordinates in millimeters at a fixed frame
// rate), the canonical binary file format, CSV import, root centering, window
// extraction and the synthetic generator used for desk-scale experiments.
// Sequences are stored as 32-bit floats — the precision of the on-disk
// format — regardless of the precision the model runs at.

#include <cstdint>
#include <string>
#include <vector>

#include "simlpe/error.hpp"
#include "simlpe/matrix.hpp"

namespace simlpe {

struct MotionSequence {
  float frame_rate = 25.0f;
  int num_frames = 0;   // L
  int num_joints = 0;   // K
  std::vector<float> coords;   // L x 3K row-major, (x,y,z) per joint, mm

  int channels() const { return 3 * num_joints; }
  float* frame(int t) { return coords.data() + static_cast<size_t>(t) * channels(); }
  const float* frame(int t) const {
    return coords.data() + static_cast<size_t>(t) * channels();
  }
};

// Canonical motion file: magic "MOTN", version u16 LE (= 1), frame_rate f32
// LE, num_frames u32 LE, num_joints u32 LE, payload of num_frames * num_joints
// * 3 f32 LE values in frame-major, joint-major, (x,y,z) order, then a 64-bit
// FNV-1a checksum of every preceding byte. Roundtrips are bit-exact.
MotionSequence read_motion(const std::string& path);
void write_motion(const MotionSequence& seq, const std::string& path);

// Lines of 3K comma-separated reals, '#' lines and blank lines skipped.
// Values are millimeters. Malformed lines are reported with their line number.
MotionSequence import_csv(const std::string& path, float frame_rate,
                          int num_joints);

// Subtracts the root joint from every joint per frame; the root becomes the
// origin in all frames. Idempotent, and invariant to rigid per-frame
// translations of the input.
MotionSequence center_on_root(const MotionSequence& seq, int root_joint);

// Integer-stride frame subsampling (e.g. 50 -> 25 FPS with stride 2).
MotionSequence subsample(const MotionSequence& seq, int stride);

struct SyntheticSpec {
  int num_joints = 22;
  int num_frames = 500;
  int harmonics = 3;          // sinusoids per coordinate
  double freq_min = 0.2;      // Hz
  double freq_max = 1.0;
  double amp_min = 10.0;      // mm
  double amp_max = 60.0;
  double drift_min = -1.0;    // mm per frame
  double drift_max = 1.0;
  double frame_rate = 25.0;
  uint64_t seed = 0;
};

// Each coordinate is a sum of `harmonics` sinusoids with seeded random
// frequency, phase and amplitude, plus a linear drift. Deterministic per seed:
// draws happen coordinate-major (joint, axis), per coordinate first the
// harmonics' (frequency, amplitude, phase) triples and then the drift.
MotionSequence generate_synthetic(const SyntheticSpec& spec);

template <typename S>
struct TrainSample {
  Matrix<S> input;    // T x C
  Matrix<S> target;   // N x C, the frames immediately after the input
};

// Windows start at 0, stride, 2*stride, ...; a sequence shorter than
// input_len + target_len yields none.
template <typename S>
std::vector<TrainSample<S>> make_windows(const MotionSequence& seq, int input_len,
                                         int target_len, int stride) {
  if (stride < 1)
    throw ConfigError("make_windows: stride must be >= 1, got " +
                      std::to_string(stride));
  if (input_len < 1 || target_len < 1)
    throw ConfigError("make_windows: window lengths must be >= 1");
  std::vector<TrainSample<S>> out;
  const int span = input_len + target_len;
  if (seq.num_frames < span) return out;
  const int c = seq.channels();
  for (int start = 0; start + span <= seq.num_frames; start += stride) {
    TrainSample<S> s;
    s.input = Matrix<S>(input_len, c);
    s.target = Matrix<S>(target_len, c);
    for (int t = 0; t < input_len; ++t) {
      const float* src = seq.frame(start + t);
      S* dst = s.input.row(t);
      for (int j = 0; j < c; ++j) dst[j] = static_cast<S>(src[j]);
    }
    for (int t = 0; t < target_len; ++t) {
      const float* src = seq.frame(start + input_len + t);
      S* dst = s.target.row(t);
      for (int j = 0; j < c; ++j) dst[j] = static_cast<S>(src[j]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace simlpe
