#pragma once

// Gradient verification entry point shared by the CLI command and the test
// suites: every differentiable component is checked against the
// central-difference oracle over a set of seeded random instances, in 64-bit
// arithmetic. The fault-injection switch deliberately corrupts one analytic
// gradient entry per component so tests can confirm the check actually fails
// on wrong gradients.

#include <cstdint>
#include <string>
#include <vector>

namespace simlpe {

struct GradCheckOptions {
  int num_seeds = 20;
  uint64_t base_seed = 1789;
  double threshold = 1e-4;
  double fd_step = 1e-5;
  bool inject_fault = false;
};

struct GradCheckComponent {
  std::string name;
  double max_rel_err = 0.0;
  bool pass = false;
};

struct GradCheckReport {
  std::vector<GradCheckComponent> components;
  double threshold = 0.0;

  bool all_pass() const {
    for (const auto& c : components)
      if (!c.pass) return false;
    return !components.empty();
  }
};

// Checks, in order: the affine layer (input, weight and bias gradients),
// layer normalization (input, gamma, beta), the DCT/IDCT pair, and the full
// model (all parameters plus the input) at input_len 8, channels 6, 2 blocks.
GradCheckReport run_gradcheck(const GradCheckOptions& opts = {});

// One line per component: name, max relative error, pass/fail.
std::string format_gradcheck(const GradCheckReport& report);

}  // namespace simlpe
