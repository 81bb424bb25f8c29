// End-to-end checks of the command-line binary: every command is spawned as a
// child process and judged on exit code, emitted files, and printed text.
// The binary's path arrives via the SIMLPE_BIN compile definition.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "simlpe/data.hpp"
#include "simlpe/wire.hpp"

using namespace simlpe;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

fs::path work_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "simlpe_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli_output.txt";
  const std::string cmd =
      std::string(SIMLPE_BIN) + " " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.output = wire::read_file(log.string());
  return r;
}

// Small enough to train in milliseconds, large enough for real windows.
const std::string kTinyData =
    "--synthetic --joints 4 --channels 12 --synthetic_frames 80 "
    "--train_sequences 2 --test_sequences 2";
const std::string kTinyTrain =
    kTinyData + " --blocks 1 --steps 5 --batch_size 4 --log_every 2";

}  // namespace

TEST_CASE("no arguments: usage on stdout, nonzero exit") {
  const fs::path dir = work_dir("usage");
  RunResult r = run_cli("", dir);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("usage:") != std::string::npos);
}

TEST_CASE("help exits zero and lists the config keys") {
  const fs::path dir = work_dir("help");
  RunResult r = run_cli("help", dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("usage:") != std::string::npos);
  CHECK(r.output.find("initial_lr") != std::string::npos);
}

TEST_CASE("unknown commands and flags are config errors") {
  const fs::path dir = work_dir("unknown");
  RunResult r = run_cli("visualize", dir);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("unknown command") != std::string::npos);

  CHECK(run_cli("train --bogus 3", dir).exit_code == 1);
  CHECK(run_cli("train " + kTinyTrain + " --steps 5x", dir).exit_code == 1);
  CHECK(run_cli("train --steps", dir).exit_code == 1);  // missing value
}

TEST_CASE("train needs a data source") {
  const fs::path dir = work_dir("nodata");
  RunResult r = run_cli("train --steps 1", dir);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("no training data") != std::string::npos);
}

TEST_CASE("train writes a checkpoint and loss trace, deterministically") {
  const fs::path a = work_dir("train_a");
  RunResult r = run_cli("train " + kTinyTrain + " --out \"" + a.string() + "\"", a);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("training simlpe:") != std::string::npos);
  CHECK(r.output.find("5 steps") != std::string::npos);
  REQUIRE(fs::exists(a / "checkpoint.bin"));
  REQUIRE(fs::exists(a / "loss_trace.csv"));

  const std::string trace = wire::read_file((a / "loss_trace.csv").string());
  CHECK(trace.rfind("step,lr,loss_total,loss_re,loss_v\n", 0) == 0);
  // Records at steps 0, 2, 4 (log_every 2; 4 is also the final step).
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 4);

  const fs::path b = work_dir("train_b");
  CHECK(run_cli("train " + kTinyTrain + " --out \"" + b.string() + "\"", b)
            .exit_code == 0);
  CHECK(wire::read_file((a / "checkpoint.bin").string()) ==
        wire::read_file((b / "checkpoint.bin").string()));
  CHECK(wire::read_file((a / "loss_trace.csv").string()) ==
        wire::read_file((b / "loss_trace.csv").string()));

  // A different seed must land on different parameters.
  const fs::path c = work_dir("train_c");
  CHECK(run_cli("train " + kTinyTrain + " --seed 9 --out \"" + c.string() + "\"",
                c).exit_code == 0);
  CHECK(wire::read_file((a / "checkpoint.bin").string()) !=
        wire::read_file((c / "checkpoint.bin").string()));
}

TEST_CASE("eval reads a checkpoint and writes both reports") {
  const fs::path dir = work_dir("eval");
  REQUIRE(run_cli("train " + kTinyTrain + " --out \"" + dir.string() + "\"", dir)
              .exit_code == 0);
  const std::string ckpt = (dir / "checkpoint.bin").string();

  RunResult r = run_cli("eval " + kTinyData + " --checkpoint \"" + ckpt +
                            "\" --horizons 80,160 --out \"" + dir.string() + "\"",
                        dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("simlpe") != std::string::npos);
  CHECK(r.output.find("last_frame") != std::string::npos);

  const std::string model = wire::read_file((dir / "eval_model.csv").string());
  CHECK(model.rfind("horizon_ms,mpjpe_mm\n80,", 0) == 0);
  CHECK(model.find("\n160,") != std::string::npos);
  CHECK(fs::exists(dir / "eval_last_frame.csv"));

  // A horizon off the 25 fps frame grid is rejected.
  CHECK(run_cli("eval " + kTinyData + " --checkpoint \"" + ckpt +
                    "\" --horizons 100 --out \"" + dir.string() + "\"",
                dir).exit_code == 1);
  // Missing checkpoint flag vs missing checkpoint file vs corrupt file.
  CHECK(run_cli("eval " + kTinyData, dir).exit_code == 1);
  CHECK(run_cli("eval " + kTinyData + " --checkpoint \"" +
                    (dir / "nope.bin").string() + "\"",
                dir).exit_code == 2);
  std::string bytes = wire::read_file(ckpt);
  bytes[bytes.size() / 2] = static_cast<char>(bytes[bytes.size() / 2] ^ 0x20);
  const std::string bad = (dir / "bad.bin").string();
  wire::write_file(bad, bytes);
  RunResult corrupt = run_cli("eval " + kTinyData + " --checkpoint \"" + bad +
                                  "\" --out \"" + dir.string() + "\"",
                              dir);
  CHECK(corrupt.exit_code == 2);
  CHECK(corrupt.output.find("io error") != std::string::npos);
}

TEST_CASE("predict extends an input file and writes a motion file") {
  const fs::path dir = work_dir("predict");
  REQUIRE(run_cli("train " + kTinyTrain + " --out \"" + dir.string() + "\"", dir)
              .exit_code == 0);
  const std::string ckpt = (dir / "checkpoint.bin").string();

  SyntheticSpec spec;
  spec.num_joints = 4;
  spec.num_frames = 60;
  spec.seed = 321;
  const std::string input = (dir / "input.motn").string();
  write_motion(generate_synthetic(spec), input);

  RunResult r = run_cli("predict --checkpoint \"" + ckpt + "\" --input \"" +
                            input + "\" --frames 7 --out \"" + dir.string() + "\"",
                        dir);
  CHECK(r.exit_code == 0);
  MotionSequence pred = read_motion((dir / "prediction.motn").string());
  CHECK(pred.num_frames == 7);
  CHECK(pred.num_joints == 4);
  CHECK(pred.frame_rate == 25.0f);
  for (float v : pred.coords) CHECK(std::isfinite(v));

  // Fewer frames than the model's input window is a config error.
  spec.num_frames = 20;
  write_motion(generate_synthetic(spec), input);
  RunResult short_input = run_cli(
      "predict --checkpoint \"" + ckpt + "\" --input \"" + input +
          "\" --out \"" + dir.string() + "\"",
      dir);
  CHECK(short_input.exit_code == 1);
  CHECK(short_input.output.find("needs at least") != std::string::npos);

  CHECK(run_cli("predict --checkpoint \"" + ckpt + "\"", dir).exit_code == 1);
  CHECK(run_cli("predict --input \"" + input + "\"", dir).exit_code == 1);
}

TEST_CASE("baseline evaluates last-frame and a fresh one_fc") {
  const fs::path dir = work_dir("baseline");
  RunResult r = run_cli("baseline " + kTinyData +
                            " --baseline_steps 5 --batch_size 4 --out \"" +
                            dir.string() + "\"",
                        dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("last_frame") != std::string::npos);
  CHECK(r.output.find("one_fc") != std::string::npos);
  CHECK(fs::exists(dir / "baseline_last_frame.csv"));
  CHECK(fs::exists(dir / "baseline_one_fc.csv"));
  const std::string csv =
      wire::read_file((dir / "baseline_one_fc.csv").string());
  CHECK(csv.rfind("horizon_ms,mpjpe_mm\n80,", 0) == 0);
}

TEST_CASE("gradcheck passes clean and fails with an injected fault") {
  const fs::path dir = work_dir("gradcheck");
  RunResult clean = run_cli("gradcheck", dir);
  CHECK(clean.exit_code == 0);
  for (const char* name : {"affine", "layernorm", "dct_path", "full_model"})
    CHECK(clean.output.find(name) != std::string::npos);
  CHECK(clean.output.find("all components pass") != std::string::npos);
  CHECK(clean.output.find("FAIL") == std::string::npos);

  RunResult faulty = run_cli("gradcheck --inject-fault", dir);
  CHECK(faulty.exit_code == 3);
  CHECK(faulty.output.find("FAIL") != std::string::npos);
}

TEST_CASE("config files load first; flags override") {
  const fs::path dir = work_dir("config");
  const std::string cfg = (dir / "run.cfg").string();
  wire::write_file(cfg,
                   "# tiny run\n"
                   "synthetic = true\n"
                   "synthetic_joints = 4\n"
                   "channels = 12\n"
                   "synthetic_frames = 80\n"
                   "train_sequences = 2\n"
                   "test_sequences = 2\n"
                   "num_blocks = 1\n"
                   "total_steps = 7\n"
                   "batch_size = 4\n"
                   "log_every = 2\n");
  RunResult file_only = run_cli(
      "train --config \"" + cfg + "\" --out \"" + dir.string() + "\"", dir);
  CHECK(file_only.exit_code == 0);
  CHECK(file_only.output.find("7 steps") != std::string::npos);

  RunResult overridden = run_cli("train --config \"" + cfg +
                                     "\" --steps 5 --out \"" + dir.string() + "\"",
                                 dir);
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.output.find("5 steps") != std::string::npos);

  CHECK(run_cli("train --config \"" + (dir / "nope.cfg").string() + "\"", dir)
            .exit_code == 2);

  wire::write_file(cfg, "garbage without equals\n");
  RunResult bad = run_cli("train --config \"" + cfg + "\"", dir);
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find(":1:") != std::string::npos);
}

TEST_CASE("both precisions run end to end") {
  const fs::path dir = work_dir("precision");
  CHECK(run_cli("train " + kTinyTrain + " --precision f64 --out \"" +
                    dir.string() + "\"",
                dir).exit_code == 0);
  const std::string ckpt = (dir / "checkpoint.bin").string();
  CHECK(run_cli("eval " + kTinyData + " --precision f64 --checkpoint \"" + ckpt +
                    "\" --horizons 80 --out \"" + dir.string() + "\"",
                dir).exit_code == 0);
}
