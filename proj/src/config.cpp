#include "simlpe/config.hpp"

#include <cstdlib>

#include "simlpe/error.hpp"
#include "simlpe/wire.hpp"

namespace simlpe {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int64_t parse_int(const std::string& key, const std::string& value) {
  size_t used = 0;
  int64_t v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty())
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  return v;
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
  size_t used = 0;
  uint64_t v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty() || value[0] == '-')
    throw ConfigError(key + ": expected an unsigned integer, got '" + value + "'");
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty())
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes")
    return true;
  if (value == "false" || value == "0" || value == "off" || value == "no")
    return false;
  throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos <= value.size()) {
    size_t comma = value.find(',', pos);
    if (comma == std::string::npos) comma = value.size();
    out.push_back(
        static_cast<int>(parse_int(key, trim(value.substr(pos, comma - pos)))));
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "arch") {
    if (value == "simlpe")
      model.arch = ModelArch::kSiMlpe;
    else if (value == "one_fc")
      model.arch = ModelArch::kOneFc;
    else
      throw ConfigError("arch: expected 'simlpe' or 'one_fc', got '" + value + "'");
  } else if (key == "input_len") {
    model.input_len = static_cast<int>(parse_int(key, value));
  } else if (key == "output_len") {
    model.output_len = static_cast<int>(parse_int(key, value));
  } else if (key == "channels") {
    model.channels = static_cast<int>(parse_int(key, value));
  } else if (key == "num_blocks") {
    model.num_blocks = static_cast<int>(parse_int(key, value));
  } else if (key == "use_transpose") {
    model.use_transpose = parse_bool(key, value);
  } else if (key == "use_layernorm") {
    model.use_layernorm = parse_bool(key, value);
  } else if (key == "use_dct") {
    model.use_dct = parse_bool(key, value);
  } else if (key == "w_re") {
    weights.w_re = parse_real(key, value);
  } else if (key == "w_v") {
    weights.w_v = parse_real(key, value);
  } else if (key == "initial_lr") {
    schedule.initial_lr = parse_real(key, value);
  } else if (key == "final_lr") {
    schedule.final_lr = parse_real(key, value);
  } else if (key == "drop_step") {
    schedule.drop_step = parse_int(key, value);
  } else if (key == "total_steps") {
    schedule.total_steps = parse_int(key, value);
  } else if (key == "batch_size") {
    batch_size = static_cast<int>(parse_int(key, value));
  } else if (key == "log_every") {
    log_every = static_cast<int>(parse_int(key, value));
  } else if (key == "synthetic") {
    use_synthetic = parse_bool(key, value);
  } else if (key == "train_sequences") {
    train_sequences = static_cast<int>(parse_int(key, value));
  } else if (key == "test_sequences") {
    test_sequences = static_cast<int>(parse_int(key, value));
  } else if (key == "synthetic_joints") {
    synthetic.num_joints = static_cast<int>(parse_int(key, value));
  } else if (key == "synthetic_frames") {
    synthetic.num_frames = static_cast<int>(parse_int(key, value));
  } else if (key == "harmonics") {
    synthetic.harmonics = static_cast<int>(parse_int(key, value));
  } else if (key == "freq_min") {
    synthetic.freq_min = parse_real(key, value);
  } else if (key == "freq_max") {
    synthetic.freq_max = parse_real(key, value);
  } else if (key == "amp_min") {
    synthetic.amp_min = parse_real(key, value);
  } else if (key == "amp_max") {
    synthetic.amp_max = parse_real(key, value);
  } else if (key == "drift_min") {
    synthetic.drift_min = parse_real(key, value);
  } else if (key == "drift_max") {
    synthetic.drift_max = parse_real(key, value);
  } else if (key == "frame_rate") {
    synthetic.frame_rate = parse_real(key, value);
  } else if (key == "data") {
    data_path = value;
  } else if (key == "test_data") {
    test_data_path = value;
  } else if (key == "checkpoint") {
    checkpoint_path = value;
  } else if (key == "input") {
    input_path = value;
  } else if (key == "out") {
    out_dir = value;
  } else if (key == "seed") {
    seed = parse_u64(key, value);
  } else if (key == "precision") {
    if (value == "f32")
      precision = Precision::kF32;
    else if (value == "f64")
      precision = Precision::kF64;
    else
      throw ConfigError("precision: expected 'f32' or 'f64', got '" + value + "'");
  } else if (key == "window_stride") {
    window_stride = static_cast<int>(parse_int(key, value));
  } else if (key == "eval_stride") {
    eval_stride = static_cast<int>(parse_int(key, value));
  } else if (key == "frames") {
    predict_frames = static_cast<int>(parse_int(key, value));
  } else if (key == "baseline_steps") {
    baseline_steps = parse_int(key, value);
  } else if (key == "horizons") {
    horizons = parse_int_list(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'; accepted keys:\n" +
                      config_keys());
  }
}

std::string config_keys() {
  return
      "  arch             simlpe | one_fc (default simlpe)\n"
      "  input_len        observed frames T (default 50)\n"
      "  output_len       predicted frames N (default 10)\n"
      "  channels         coordinate count C = 3*joints (default 66)\n"
      "  num_blocks       MLP blocks n (default 48)\n"
      "  use_transpose    blocks mix time, not channels (default true)\n"
      "  use_layernorm    layer norm inside blocks (default true)\n"
      "  use_dct          DCT encode/decode around the net (default true)\n"
      "  w_re             position loss weight (default 1)\n"
      "  w_v              velocity loss weight (default 1)\n"
      "  initial_lr       learning rate before the drop (default 3e-4)\n"
      "  final_lr         learning rate after the drop (default 1e-5)\n"
      "  drop_step        step of the single lr drop (default 30000)\n"
      "  total_steps      training steps (default 35000)\n"
      "  batch_size       windows per step (default 256)\n"
      "  log_every        steps between loss records (default 100)\n"
      "  synthetic        generate data instead of reading files (default false)\n"
      "  train_sequences  synthetic training sequences (default 20)\n"
      "  test_sequences   synthetic test sequences (default 10)\n"
      "  synthetic_joints joints per synthetic sequence (default 22)\n"
      "  synthetic_frames frames per synthetic sequence (default 500)\n"
      "  harmonics        sinusoids per coordinate (default 3)\n"
      "  freq_min         lowest sinusoid frequency, Hz (default 0.2)\n"
      "  freq_max         highest sinusoid frequency, Hz (default 1.0)\n"
      "  amp_min          smallest amplitude, mm (default 10)\n"
      "  amp_max          largest amplitude, mm (default 60)\n"
      "  drift_min        smallest drift, mm/frame (default -1)\n"
      "  drift_max        largest drift, mm/frame (default 1)\n"
      "  frame_rate       synthetic frame rate, fps (default 25)\n"
      "  data             training motion file (canonical format)\n"
      "  test_data        evaluation motion file\n"
      "  checkpoint       checkpoint path (input for eval/predict)\n"
      "  input            input motion file for predict\n"
      "  out              output directory (default .)\n"
      "  seed             run seed (default 0)\n"
      "  precision        f32 | f64 (default f32)\n"
      "  window_stride    training window stride (default 1)\n"
      "  eval_stride      evaluation window stride (default input_len+output_len)\n"
      "  frames           frames to predict with `predict` (default 25)\n"
      "  baseline_steps   One-FC training steps in `baseline` (default 2000)\n"
      "  horizons         comma-separated ms (default 80,...,1000)\n";
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  const std::string text = wire::read_file(path);
  size_t line_start = 0;
  int line_no = 0;
  while (line_start <= text.size()) {
    size_t nl = text.find('\n', line_start);
    if (nl == std::string::npos) nl = text.size();
    ++line_no;
    std::string line = trim(text.substr(line_start, nl - line_start));
    line_start = nl + 1;
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    try {
      cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace simlpe
