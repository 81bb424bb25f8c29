// Command-line driver: train, eval, predict, baseline, gradcheck.
// Flags use the config-file keys (--key value or --key=value); --config loads
// a file first and later flags override it. Exit codes: 0 success, 1 config
// error, 2 I/O error, 3 verification failure.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "simlpe/checkpoint.hpp"
#include "simlpe/config.hpp"
#include "simlpe/data.hpp"
#include "simlpe/eval.hpp"
#include "simlpe/gradcheck.hpp"
#include "simlpe/model.hpp"
#include "simlpe/train.hpp"

namespace {

using namespace simlpe;

constexpr uint64_t kTrainSeqStream = 2;         // streams 2 .. 2+n-1
constexpr uint64_t kTestSeqStream = 1000000;    // streams 1000000 .. +m-1

void usage() {
  std::printf(
      "usage: simlpe <command> [--key value | --key=value] ...\n"
      "\n"
      "commands:\n"
      "  train      fit a model, write checkpoint + loss trace CSV\n"
      "  eval       evaluate a checkpoint, write MPJPE report CSVs\n"
      "  predict    roll a checkpoint forward, write a motion file\n"
      "  baseline   evaluate Last-Frame and a freshly trained One-FC\n"
      "  gradcheck  verify analytic gradients against finite differences\n"
      "\n"
      "common flags: --config PATH, --seed U64, --precision {f32,f64}, --out DIR\n"
      "aliases: --blocks=num_blocks --steps=total_steps --lr=initial_lr\n"
      "         --joints=synthetic_joints\n"
      "gradcheck only: --inject-fault (corrupt one gradient; must then fail)\n"
      "\n"
      "config keys (= defaults):\n%s",
      config_keys().c_str());
}

std::string resolve_alias(const std::string& key) {
  if (key == "blocks") return "num_blocks";
  if (key == "steps") return "total_steps";
  if (key == "lr") return "initial_lr";
  if (key == "joints") return "synthetic_joints";
  return key;
}

bool is_bool_key(const std::string& key) {
  return key == "synthetic" || key == "use_transpose" || key == "use_layernorm" ||
         key == "use_dct";
}

struct CliRequest {
  RunConfig cfg;
  bool inject_fault = false;
};

CliRequest parse_args(int argc, char** argv) {
  CliRequest req;
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 2; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.rfind("--", 0) != 0)
      throw ConfigError("expected a --flag, got '" + arg + "'");
    arg = arg.substr(2);
    std::string key, value;
    const size_t eq = arg.find('=');
    if (eq != std::string::npos) {
      key = arg.substr(0, eq);
      value = arg.substr(eq + 1);
    } else {
      key = arg;
      if (key == "inject-fault") {
        value = "true";
      } else if (is_bool_key(resolve_alias(key)) &&
                 (i + 1 >= argc ||
                  std::string(argv[i + 1]).rfind("--", 0) == 0)) {
        value = "true";
      } else {
        if (i + 1 >= argc) throw ConfigError("--" + key + ": missing value");
        value = argv[++i];
      }
    }
    pairs.emplace_back(resolve_alias(key), value);
  }
  // Config files first, then the remaining flags in order, so flags win.
  for (const auto& [key, value] : pairs)
    if (key == "config") load_config_file(value, req.cfg);
  for (const auto& [key, value] : pairs) {
    if (key == "config") continue;
    if (key == "inject-fault") {
      req.inject_fault = true;
      continue;
    }
    req.cfg.set(key, value);
  }
  return req;
}

SyntheticSpec spec_for(const RunConfig& cfg, uint64_t stream) {
  SyntheticSpec spec = cfg.synthetic;
  spec.seed = derive_seed(cfg.seed, stream);
  return spec;
}

std::vector<MotionSequence> load_train_set(const RunConfig& cfg) {
  std::vector<MotionSequence> set;
  if (cfg.use_synthetic) {
    for (int i = 0; i < cfg.train_sequences; ++i)
      set.push_back(generate_synthetic(spec_for(cfg, kTrainSeqStream + i)));
  } else if (!cfg.data_path.empty()) {
    set.push_back(read_motion(cfg.data_path));
  } else {
    throw ConfigError("no training data: give data=PATH or synthetic=true");
  }
  return set;
}

std::vector<MotionSequence> load_test_set(const RunConfig& cfg) {
  std::vector<MotionSequence> set;
  if (cfg.use_synthetic) {
    for (int j = 0; j < cfg.test_sequences; ++j)
      set.push_back(generate_synthetic(spec_for(cfg, kTestSeqStream + j)));
  } else if (!cfg.test_data_path.empty()) {
    set.push_back(read_motion(cfg.test_data_path));
  } else if (!cfg.data_path.empty()) {
    set.push_back(read_motion(cfg.data_path));
  } else {
    throw ConfigError("no test data: give test_data=PATH or synthetic=true");
  }
  return set;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

template <typename S>
std::vector<TrainSample<S>> collect_windows(const RunConfig& cfg,
                                            const std::vector<MotionSequence>& set) {
  std::vector<TrainSample<S>> samples;
  for (const auto& seq : set) {
    auto w = make_windows<S>(seq, cfg.model.input_len, cfg.model.output_len,
                             cfg.window_stride);
    for (auto& s : w) samples.push_back(std::move(s));
  }
  if (samples.empty())
    throw ConfigError("no training windows: sequences shorter than " +
                      std::to_string(cfg.model.input_len + cfg.model.output_len) +
                      " frames");
  return samples;
}

template <typename S>
int cmd_train_impl(const RunConfig& cfg) {
  cfg.model.validate();
  const auto samples = collect_windows<S>(cfg, load_train_set(cfg));
  std::printf("training %s: %lld parameters, %zu windows, %lld steps\n",
              cfg.model.arch == ModelArch::kOneFc ? "one_fc" : "simlpe",
              static_cast<long long>(param_count(cfg.model)), samples.size(),
              static_cast<long long>(cfg.schedule.total_steps));

  TrainOptions opts;
  opts.total_steps = cfg.schedule.total_steps;
  opts.batch_size = cfg.batch_size;
  opts.log_every = cfg.log_every;
  opts.schedule = cfg.schedule;
  opts.weights = cfg.weights;
  opts.seed = cfg.seed;
  opts.on_record = [](const LossRecord& r) {
    std::printf("step %6lld  lr %.1e  loss %.5f  (re %.5f, v %.5f)\n",
                static_cast<long long>(r.step), r.lr, r.total, r.re, r.v);
  };
  TrainResult<S> result = train<S>(cfg.model, samples, opts);

  const std::string ckpt = cfg.checkpoint_path.empty()
                               ? out_path(cfg, "checkpoint.bin")
                               : cfg.checkpoint_path;
  save_checkpoint(ckpt, cfg.model, result.params);
  const std::string trace = out_path(cfg, "loss_trace.csv");
  write_loss_trace(trace, result.trace);
  std::printf("wrote %s and %s\n", ckpt.c_str(), trace.c_str());
  return 0;
}

template <typename S>
int cmd_eval_impl(const RunConfig& cfg) {
  if (cfg.checkpoint_path.empty())
    throw ConfigError("eval needs checkpoint=PATH");
  Checkpoint<S> ckpt = load_checkpoint<S>(cfg.checkpoint_path);
  const auto test_set = load_test_set(cfg);
  const DctBasis<S> dct = build_dct_basis<S>(ckpt.config.input_len);

  EvalReport model_report = evaluate<S>(
      model_predictor<S>(ckpt.params, ckpt.config, dct), test_set,
      ckpt.config.input_len, ckpt.config.output_len, cfg.horizons,
      cfg.resolved_eval_stride(),
      ckpt.config.arch == ModelArch::kOneFc ? "one_fc" : "simlpe",
      param_count(ckpt.config));
  EvalReport base_report = evaluate<S>(
      baseline_predictor<S>(ckpt.config.output_len), test_set,
      ckpt.config.input_len, ckpt.config.output_len, cfg.horizons,
      cfg.resolved_eval_stride(), "last_frame");

  std::printf("%d windows, %lld parameters\n%s%s", model_report.num_samples,
              static_cast<long long>(model_report.param_count),
              format_report(model_report).c_str(),
              format_report(base_report).c_str());
  write_report_csv(out_path(cfg, "eval_model.csv"), model_report);
  write_report_csv(out_path(cfg, "eval_last_frame.csv"), base_report);
  return 0;
}

template <typename S>
int cmd_predict_impl(const RunConfig& cfg) {
  if (cfg.checkpoint_path.empty())
    throw ConfigError("predict needs checkpoint=PATH");
  if (cfg.input_path.empty()) throw ConfigError("predict needs input=PATH");
  if (cfg.predict_frames < 1)
    throw ConfigError("frames must be >= 1, got " +
                      std::to_string(cfg.predict_frames));
  Checkpoint<S> ckpt = load_checkpoint<S>(cfg.checkpoint_path);
  const MotionSequence seq = read_motion(cfg.input_path);
  const int t = ckpt.config.input_len;
  if (seq.num_frames < t)
    throw ConfigError("input has " + std::to_string(seq.num_frames) +
                      " frames, the model needs at least " + std::to_string(t));
  if (seq.channels() != ckpt.config.channels)
    throw ShapeError("input has " + std::to_string(seq.channels()) +
                     " channels, checkpoint expects " +
                     std::to_string(ckpt.config.channels));

  Matrix<S> window(t, seq.channels());
  for (int i = 0; i < t; ++i) {
    const float* src = seq.frame(seq.num_frames - t + i);
    S* dst = window.row(i);
    for (int j = 0; j < seq.channels(); ++j) dst[j] = static_cast<S>(src[j]);
  }
  const DctBasis<S> dct = build_dct_basis<S>(t);
  Matrix<S> pred = rollout(model_predictor<S>(ckpt.params, ckpt.config, dct),
                           window, ckpt.config.output_len, cfg.predict_frames);

  MotionSequence out;
  out.frame_rate = seq.frame_rate;
  out.num_frames = cfg.predict_frames;
  out.num_joints = seq.num_joints;
  out.coords.resize(static_cast<size_t>(out.num_frames) * out.channels());
  for (int i = 0; i < out.num_frames; ++i) {
    const S* src = pred.row(i);
    float* dst = out.frame(i);
    for (int j = 0; j < out.channels(); ++j) dst[j] = static_cast<float>(src[j]);
  }
  const std::string path = out_path(cfg, "prediction.motn");
  write_motion(out, path);
  std::printf("wrote %d predicted frames to %s\n", out.num_frames, path.c_str());
  return 0;
}

template <typename S>
int cmd_baseline_impl(const RunConfig& cfg) {
  const auto test_set = load_test_set(cfg);
  const int t = cfg.model.input_len;
  const int n = cfg.model.output_len;

  EvalReport last_frame = evaluate<S>(baseline_predictor<S>(n), test_set, t, n,
                                      cfg.horizons, cfg.resolved_eval_stride(),
                                      "last_frame");
  std::printf("%s", format_report(last_frame).c_str());
  write_report_csv(out_path(cfg, "baseline_last_frame.csv"), last_frame);

  ModelConfig one_fc = one_fc_config(t, n, cfg.model.channels, cfg.model.use_dct);
  TrainOptions opts;
  opts.total_steps = cfg.baseline_steps;
  opts.batch_size = cfg.batch_size;
  opts.log_every = cfg.log_every;
  opts.schedule = cfg.schedule;
  opts.weights = cfg.weights;
  opts.seed = cfg.seed;
  const auto samples = collect_windows<S>(cfg, load_train_set(cfg));
  TrainResult<S> result = train<S>(one_fc, samples, opts);

  const DctBasis<S> dct = build_dct_basis<S>(t);
  EvalReport one_fc_report = evaluate<S>(
      model_predictor<S>(result.params, one_fc, dct), test_set, t, n,
      cfg.horizons, cfg.resolved_eval_stride(), "one_fc", param_count(one_fc));
  std::printf("%s", format_report(one_fc_report).c_str());
  write_report_csv(out_path(cfg, "baseline_one_fc.csv"), one_fc_report);
  return 0;
}

int cmd_gradcheck(const CliRequest& req) {
  GradCheckOptions opts;
  opts.inject_fault = req.inject_fault;
  if (req.cfg.seed != 0) opts.base_seed = req.cfg.seed;
  GradCheckReport report = run_gradcheck(opts);
  std::printf("%s", format_gradcheck(report).c_str());
  return report.all_pass() ? 0 : 3;
}

template <int (*F32)(const RunConfig&), int (*F64)(const RunConfig&)>
int dispatch(const RunConfig& cfg) {
  return cfg.precision == Precision::kF32 ? F32(cfg) : F64(cfg);
}

int run(int argc, char** argv) {
  if (argc < 2) {
    usage();
    return 1;
  }
  const std::string command = argv[1];
  if (command == "help" || command == "--help" || command == "-h") {
    usage();
    return 0;
  }
  CliRequest req = parse_args(argc, argv);
  if (command == "train")
    return dispatch<cmd_train_impl<float>, cmd_train_impl<double>>(req.cfg);
  if (command == "eval")
    return dispatch<cmd_eval_impl<float>, cmd_eval_impl<double>>(req.cfg);
  if (command == "predict")
    return dispatch<cmd_predict_impl<float>, cmd_predict_impl<double>>(req.cfg);
  if (command == "baseline")
    return dispatch<cmd_baseline_impl<float>, cmd_baseline_impl<double>>(req.cfg);
  if (command == "gradcheck") return cmd_gradcheck(req);
  throw ConfigError("unknown command '" + command +
                    "'; expected train, eval, predict, baseline or gradcheck");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const ShapeError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "verification failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
