#pragma once

// Run configuration for the CLI: one flat key=value namespace covering the
// model, losses, schedule, synthetic data and file paths. Config files are
// plain text with '#' comments; command-line flags use the same keys and
// override file values. Unknown keys are rejected up front.

#include <cstdint>
#include <string>
#include <vector>

#include "simlpe/data.hpp"
#include "simlpe/eval.hpp"
#include "simlpe/loss.hpp"
#include "simlpe/model.hpp"
#include "simlpe/optim.hpp"

namespace simlpe {

enum class Precision { kF32, kF64 };

struct RunConfig {
  ModelConfig model;
  LossWeights weights;
  LrSchedule schedule;
  SyntheticSpec synthetic;   // waveform shape; per-sequence seeds come from `seed`

  bool use_synthetic = false;
  int train_sequences = 20;
  int test_sequences = 10;

  std::string data_path;
  std::string test_data_path;
  std::string checkpoint_path;
  std::string input_path;
  std::string out_dir = ".";

  uint64_t seed = 0;
  Precision precision = Precision::kF32;
  int batch_size = 256;
  int log_every = 100;
  int window_stride = 1;     // training window extraction
  int eval_stride = 0;       // 0: input_len + output_len
  int predict_frames = 25;
  int64_t baseline_steps = 2000;
  std::vector<int> horizons = default_horizons();

  // Applies one key=value pair; throws ConfigError on unknown keys or
  // malformed values. See config_keys() for the accepted keys.
  void set(const std::string& key, const std::string& value);

  int resolved_eval_stride() const {
    return eval_stride > 0 ? eval_stride : model.input_len + model.output_len;
  }
};

// Every accepted key with its documented default, for --help and error
// messages.
std::string config_keys();

// Parses `# comment` / `key = value` lines into cfg; errors carry line numbers.
void load_config_file(const std::string& path, RunConfig& cfg);

}  // namespace simlpe
