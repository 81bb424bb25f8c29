#include "simlpe/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <utility>

#include "simlpe/dct.hpp"
#include "simlpe/matrix.hpp"
#include "simlpe/model.hpp"
#include "simlpe/rng.hpp"

namespace simlpe {
namespace {

using Vec = std::vector<double>;
using Mat = Matrix<double>;

void append(Vec& dst, const Vec& src) { dst.insert(dst.end(), src.begin(), src.end()); }

size_t unpack(const Vec& theta, size_t pos, Vec& dst) {
  std::copy(theta.begin() + pos, theta.begin() + pos + dst.size(), dst.begin());
  return pos + dst.size();
}

double weighted_sum(const Mat& weights, const Mat& values) {
  double s = 0.0;
  for (size_t i = 0; i < values.size(); ++i)
    s += weights.data()[i] * values.data()[i];
  return s;
}

Vec random_vec(int n, double lo, double hi, Rng& rng) {
  Vec v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

// One seeded random instance of a component: a parameter vector, the analytic
// gradient at it, and the scalar function the oracle differentiates.
struct Instance {
  Vec theta;
  Vec analytic;
  std::function<double(const Vec&)> f;
};

Instance affine_instance(uint64_t seed) {
  Rng rng(seed);
  const int m = 5, d = 4;
  const Mat x = Mat::random_uniform(m, d, -1.0, 1.0, rng);
  AffineLayer<double> layer;
  layer.weight = Mat::random_uniform(d, d, -1.0, 1.0, rng);
  layer.bias = random_vec(d, -1.0, 1.0, rng);
  const Mat probe = Mat::random_uniform(m, d, -1.0, 1.0, rng);

  Instance inst;
  append(inst.theta, x.data());
  append(inst.theta, layer.weight.data());
  append(inst.theta, layer.bias);

  AffineGrads<double> g = affine_backward(layer, x, probe);
  append(inst.analytic, g.x.data());
  append(inst.analytic, g.weight.data());
  append(inst.analytic, g.bias);

  inst.f = [m, d, probe](const Vec& theta) {
    Mat x2(m, d);
    AffineLayer<double> l2;
    l2.weight = Mat(d, d);
    l2.bias.assign(d, 0.0);
    size_t pos = unpack(theta, 0, x2.data());
    pos = unpack(theta, pos, l2.weight.data());
    unpack(theta, pos, l2.bias);
    return weighted_sum(probe, affine_forward(l2, x2));
  };
  return inst;
}

Instance layernorm_instance(uint64_t seed) {
  Rng rng(seed);
  const int m = 5, d = 6;
  const Mat x = Mat::random_uniform(m, d, -1.0, 1.0, rng);
  LayerNormParams<double> p;
  p.gamma = random_vec(d, 0.5, 1.5, rng);
  p.beta = random_vec(d, -1.0, 1.0, rng);
  const Mat probe = Mat::random_uniform(m, d, -1.0, 1.0, rng);

  Instance inst;
  append(inst.theta, x.data());
  append(inst.theta, p.gamma);
  append(inst.theta, p.beta);

  LayerNormCache<double> cache;
  layernorm_forward(p, x, &cache);
  LayerNormGrads<double> g = layernorm_backward(p, cache, probe);
  append(inst.analytic, g.x.data());
  append(inst.analytic, g.gamma);
  append(inst.analytic, g.beta);

  inst.f = [m, d, probe](const Vec& theta) {
    Mat x2(m, d);
    LayerNormParams<double> p2;
    p2.gamma.assign(d, 0.0);
    p2.beta.assign(d, 0.0);
    size_t pos = unpack(theta, 0, x2.data());
    pos = unpack(theta, pos, p2.gamma);
    unpack(theta, pos, p2.beta);
    return weighted_sum(probe, layernorm_forward(p2, x2));
  };
  return inst;
}

// Both transform directions at once: f = <R1, DCT(x)> + <R2, IDCT(x)>, whose
// gradient is IDCT(R1) + DCT(R2) by the adjoint property.
Instance dct_instance(uint64_t seed) {
  Rng rng(seed);
  const int t = 8, c = 3;
  const DctBasis<double> basis = build_dct_basis<double>(t);
  const Mat x = Mat::random_uniform(t, c, -1.0, 1.0, rng);
  const Mat probe_fwd = Mat::random_uniform(t, c, -1.0, 1.0, rng);
  const Mat probe_inv = Mat::random_uniform(t, c, -1.0, 1.0, rng);

  Instance inst;
  inst.theta = x.data();
  const Mat grad = add(apply_idct(basis, probe_fwd), apply_dct(basis, probe_inv));
  inst.analytic = grad.data();
  inst.f = [t, c, basis, probe_fwd, probe_inv](const Vec& theta) {
    Mat x2(t, c);
    unpack(theta, 0, x2.data());
    return weighted_sum(probe_fwd, apply_dct(basis, x2)) +
           weighted_sum(probe_inv, apply_idct(basis, x2));
  };
  return inst;
}

Instance full_model_instance(uint64_t seed) {
  Rng rng(seed);
  ModelConfig cfg;
  cfg.input_len = 8;
  cfg.output_len = 4;
  cfg.channels = 6;
  cfg.num_blocks = 2;

  const DctBasis<double> basis = build_dct_basis<double>(cfg.input_len);
  SiMlpeParams<double> params = init_params<double>(cfg, derive_seed(seed, 1));
  // The zero-initialized output layer would keep parameter gradients upstream
  // of it at exactly zero, which checks nothing; perturb every array so the
  // chain is exercised at a generic point.
  for (auto* arr : tensor_refs(params))
    for (auto& v : *arr) v += rng.uniform(-0.5, 0.5);

  const Mat x = Mat::random_uniform(cfg.input_len, cfg.channels, -1.0, 1.0, rng);
  const Mat probe =
      Mat::random_uniform(cfg.output_len, cfg.channels, -1.0, 1.0, rng);

  Instance inst;
  for (const auto* arr : tensor_refs(std::as_const(params)))
    append(inst.theta, *arr);
  append(inst.theta, x.data());

  ForwardCache<double> cache;
  forward(params, cfg, basis, x, &cache);
  Mat grad_x;
  SiMlpeParams<double> grads = backward(params, cfg, basis, cache, probe, &grad_x);
  for (const auto* arr : tensor_refs(std::as_const(grads)))
    append(inst.analytic, *arr);
  append(inst.analytic, grad_x.data());

  inst.f = [cfg, basis, probe, params](const Vec& theta) {
    SiMlpeParams<double> p2 = params;
    size_t pos = 0;
    for (auto* arr : tensor_refs(p2)) pos = unpack(theta, pos, *arr);
    Mat x2(cfg.input_len, cfg.channels);
    unpack(theta, pos, x2.data());
    return weighted_sum(probe, forward(p2, cfg, basis, x2).absolute);
  };
  return inst;
}

// Corrupts the largest-magnitude analytic entry; the relative error there
// becomes about 1/3, far above any sane threshold.
void inject_fault(Vec& analytic) {
  size_t worst = 0;
  for (size_t i = 1; i < analytic.size(); ++i)
    if (std::abs(analytic[i]) > std::abs(analytic[worst])) worst = i;
  analytic[worst] *= 2.0;
}

GradCheckComponent check_component(const std::string& name,
                                   Instance (*make)(uint64_t seed),
                                   const GradCheckOptions& opts) {
  GradCheckComponent comp;
  comp.name = name;
  for (int s = 0; s < opts.num_seeds; ++s) {
    Instance inst = make(derive_seed(opts.base_seed, s));
    if (opts.inject_fault) inject_fault(inst.analytic);
    comp.max_rel_err = std::max(
        comp.max_rel_err, fd_check(inst.f, inst.theta, inst.analytic, opts.fd_step));
  }
  comp.pass = comp.max_rel_err < opts.threshold;
  return comp;
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckOptions& opts) {
  GradCheckReport report;
  report.threshold = opts.threshold;
  report.components.push_back(check_component("affine", affine_instance, opts));
  report.components.push_back(
      check_component("layernorm", layernorm_instance, opts));
  report.components.push_back(check_component("dct_path", dct_instance, opts));
  report.components.push_back(
      check_component("full_model", full_model_instance, opts));
  return report;
}

std::string format_gradcheck(const GradCheckReport& report) {
  std::string out;
  char line[128];
  for (const auto& c : report.components) {
    std::snprintf(line, sizeof(line), "%-12s max rel err %.3e  %s\n",
                  c.name.c_str(), c.max_rel_err, c.pass ? "pass" : "FAIL");
    out += line;
  }
  std::snprintf(line, sizeof(line), "threshold %.1e: %s\n", report.threshold,
                report.all_pass() ? "all components pass" : "FAILED");
  out += line;
  return out;
}

}  // namespace simlpe
