#pragma once

// The siMLPe network: DCT -> spatial FC -> transpose -> n x [temporal FC +
// LayerNorm + skip] -> transpose -> spatial FC -> IDCT, predicting the
// displacement of each future frame from the last observed frame. Forward and
// backward are composed by hand from the primitives in matrix.hpp; there is no
// tape. The one_fc arch is the degenerate single-layer baseline trained and
// evaluated through the same interfaces.

#include <cstdint>
#include <string>
#include <vector>

#include "simlpe/dct.hpp"
#include "simlpe/error.hpp"
#include "simlpe/matrix.hpp"
#include "simlpe/rng.hpp"

namespace simlpe {

enum class ModelArch { kSiMlpe, kOneFc };

struct ModelConfig {
  ModelArch arch = ModelArch::kSiMlpe;
  int input_len = 50;    // T, observed frames
  int output_len = 10;   // N, supervised future frames
  int channels = 66;     // C = 3 * joints
  int num_blocks = 48;   // n, ignored for one_fc
  bool use_transpose = true;   // off: blocks act along channels instead of time
  bool use_layernorm = true;   // off: block is FC + skip only
  bool use_dct = true;

  // Dimension the block FCs (and their layer norms) act along.
  int block_dim() const {
    if (arch == ModelArch::kOneFc) return input_len;
    return use_transpose ? input_len : channels;
  }

  void validate() const {
    if (input_len < 1)
      throw ConfigError("model: input_len must be >= 1, got " +
                        std::to_string(input_len));
    if (output_len < 1 || output_len > input_len)
      throw ConfigError("model: output_len must be in [1, input_len], got " +
                        std::to_string(output_len));
    if (channels < 3 || channels % 3 != 0)
      throw ConfigError("model: channels must be a positive multiple of 3, got " +
                        std::to_string(channels));
    if (arch == ModelArch::kSiMlpe && num_blocks < 1)
      throw ConfigError("model: num_blocks must be >= 1, got " +
                        std::to_string(num_blocks));
  }
};

template <typename S>
struct MlpBlock {
  AffineLayer<S> fc;        // block_dim x block_dim
  LayerNormParams<S> ln;    // dim block_dim; empty when layer norm is off
};

template <typename S>
struct SiMlpeParams {
  AffineLayer<S> fc_in;     // C x C, spatial (empty for one_fc)
  AffineLayer<S> fc_out;    // C x C, spatial (empty for one_fc)
  std::vector<MlpBlock<S>> blocks;
};

// Visits every learnable array in declaration order: fc_in, fc_out, then each
// block's weight, bias, gamma, beta. This single ordering is shared by the
// optimizer, the checkpoint format and the parameter tally.
template <typename S>
std::vector<std::vector<S>*> tensor_refs(SiMlpeParams<S>& p) {
  std::vector<std::vector<S>*> refs;
  refs.push_back(&p.fc_in.weight.data());
  refs.push_back(&p.fc_in.bias);
  refs.push_back(&p.fc_out.weight.data());
  refs.push_back(&p.fc_out.bias);
  for (auto& b : p.blocks) {
    refs.push_back(&b.fc.weight.data());
    refs.push_back(&b.fc.bias);
    refs.push_back(&b.ln.gamma);
    refs.push_back(&b.ln.beta);
  }
  return refs;
}

template <typename S>
std::vector<const std::vector<S>*> tensor_refs(const SiMlpeParams<S>& p) {
  std::vector<const std::vector<S>*> refs;
  refs.push_back(&p.fc_in.weight.data());
  refs.push_back(&p.fc_in.bias);
  refs.push_back(&p.fc_out.weight.data());
  refs.push_back(&p.fc_out.bias);
  for (const auto& b : p.blocks) {
    refs.push_back(&b.fc.weight.data());
    refs.push_back(&b.fc.bias);
    refs.push_back(&b.ln.gamma);
    refs.push_back(&b.ln.beta);
  }
  return refs;
}

template <typename S>
int64_t tally_params(const SiMlpeParams<S>& p) {
  int64_t n = 0;
  for (const auto* t : tensor_refs(p)) n += static_cast<int64_t>(t->size());
  return n;
}

// Closed form; block FCs carry B^2 + B scalars and each layer norm 2B more,
// with B the block dimension.
inline int64_t param_count(const ModelConfig& cfg) {
  cfg.validate();
  const int64_t t = cfg.input_len;
  if (cfg.arch == ModelArch::kOneFc) return t * t + t;
  const int64_t c = cfg.channels;
  const int64_t b = cfg.block_dim();
  const int64_t per_block = b * b + b + (cfg.use_layernorm ? 2 * b : 0);
  return 2 * (c * c + c) + cfg.num_blocks * per_block;
}

template <typename S>
AffineLayer<S> make_affine(int dim) {
  AffineLayer<S> l;
  l.weight = Matrix<S>(dim, dim);
  l.bias.assign(dim, S(0));
  return l;
}

// Deterministic per seed. FC weights (except fc_out) draw from the scaled
// uniform [-a, a], a = sqrt(6 / (fan_in + fan_out)); biases start at zero and
// layer norms at gamma = 1, beta = 0. fc_out is exactly zero so the untrained
// model predicts a zero displacement, i.e. repeats the last observed frame.
// Draw order: fc_in weight row-major, then each block's weight row-major.
template <typename S>
SiMlpeParams<S> init_params(const ModelConfig& cfg, uint64_t seed) {
  cfg.validate();
  SiMlpeParams<S> p;
  Rng rng(seed);
  const int bd = cfg.block_dim();
  if (cfg.arch == ModelArch::kOneFc) {
    MlpBlock<S> blk;
    blk.fc = make_affine<S>(bd);  // zero weight and bias
    p.blocks.push_back(std::move(blk));
    return p;
  }
  const int c = cfg.channels;
  const double bound_in = std::sqrt(6.0 / (c + c));
  p.fc_in = make_affine<S>(c);
  p.fc_in.weight = Matrix<S>::random_uniform(c, c, S(-bound_in), S(bound_in), rng);
  p.fc_out = make_affine<S>(c);
  const double bound_blk = std::sqrt(6.0 / (bd + bd));
  p.blocks.reserve(cfg.num_blocks);
  for (int i = 0; i < cfg.num_blocks; ++i) {
    MlpBlock<S> blk;
    blk.fc = make_affine<S>(bd);
    blk.fc.weight =
        Matrix<S>::random_uniform(bd, bd, S(-bound_blk), S(bound_blk), rng);
    if (cfg.use_layernorm) blk.ln = LayerNormParams<S>::identity(bd);
    p.blocks.push_back(std::move(blk));
  }
  return p;
}

template <typename S>
SiMlpeParams<S> zeros_like(const SiMlpeParams<S>& p) {
  SiMlpeParams<S> z = p;
  for (auto* t : tensor_refs(z)) t->assign(t->size(), S(0));
  return z;
}

template <typename S>
struct Prediction {
  Matrix<S> absolute;   // N x C future poses
  Matrix<S> residual;   // N x C network output before adding the last frame
};

template <typename S>
struct BlockCache {
  Matrix<S> input;          // block input (skip source, FC input)
  LayerNormCache<S> ln;
};

template <typename S>
struct ForwardCache {
  Matrix<S> fc_in_input;
  std::vector<BlockCache<S>> blocks;
  Matrix<S> fc_out_input;
};

template <typename S>
Prediction<S> forward(const SiMlpeParams<S>& params, const ModelConfig& cfg,
                      const DctBasis<S>& dct, const Matrix<S>& x,
                      ForwardCache<S>* cache = nullptr) {
  if (x.rows() != cfg.input_len || x.cols() != cfg.channels)
    throw ShapeError("forward: input is " + x.shape_str() + ", expected " +
                     std::to_string(cfg.input_len) + "x" +
                     std::to_string(cfg.channels));
  if (cfg.use_dct && dct.size != cfg.input_len)
    throw ShapeError("forward: dct basis size " + std::to_string(dct.size) +
                     " != input_len " + std::to_string(cfg.input_len));
  if (!x.all_finite()) throw NumericError("forward: input contains non-finite values");

  if (cache) {
    cache->blocks.clear();
    cache->blocks.reserve(params.blocks.size());
  }

  Matrix<S> y = cfg.use_dct ? apply_dct(dct, x) : x;
  if (cfg.arch == ModelArch::kSiMlpe) {
    if (cache) cache->fc_in_input = y;
    y = affine_forward(params.fc_in, y);
    if (cfg.use_transpose) y = transpose(y);
    for (const auto& blk : params.blocks) {
      BlockCache<S> bc;
      if (cache) bc.input = y;
      Matrix<S> h = affine_forward(blk.fc, y);
      if (cfg.use_layernorm)
        h = layernorm_forward(blk.ln, h, cache ? &bc.ln : nullptr);
      y = add(y, h);
      if (cache) cache->blocks.push_back(std::move(bc));
    }
    if (cfg.use_transpose) y = transpose(y);
    if (cache) cache->fc_out_input = y;
    y = affine_forward(params.fc_out, y);
  } else {
    y = transpose(y);
    BlockCache<S> bc;
    if (cache) bc.input = y;
    y = affine_forward(params.blocks.at(0).fc, y);
    y = transpose(y);
    if (cache) cache->blocks.push_back(std::move(bc));
  }
  Matrix<S> z = cfg.use_dct ? apply_idct(dct, y) : y;

  Prediction<S> pred;
  pred.residual = Matrix<S>(cfg.output_len, cfg.channels);
  pred.absolute = Matrix<S>(cfg.output_len, cfg.channels);
  const S* last = x.row(cfg.input_len - 1);
  for (int t = 0; t < cfg.output_len; ++t) {
    const S* zrow = z.row(t);
    S* rrow = pred.residual.row(t);
    S* arow = pred.absolute.row(t);
    for (int c = 0; c < cfg.channels; ++c) {
      rrow[c] = zrow[c];
      arow[c] = zrow[c] + last[c];
    }
  }
  return pred;
}

// Exact analytic gradients for every learnable array, composed from the
// primitive backward ops. grad_prediction is taken with respect to the
// absolute prediction (identical to the residual gradient, since the added
// last frame does not depend on the parameters). The gradient through DCT and
// IDCT is multiplication by the transposed basis, i.e. the opposite transform.
// Returns gradients in a params-shaped container; optionally also the gradient
// with respect to the input sequence.
template <typename S>
SiMlpeParams<S> backward(const SiMlpeParams<S>& params, const ModelConfig& cfg,
                         const DctBasis<S>& dct, const ForwardCache<S>& cache,
                         const Matrix<S>& grad_prediction,
                         Matrix<S>* grad_input = nullptr) {
  if (grad_prediction.rows() != cfg.output_len ||
      grad_prediction.cols() != cfg.channels)
    throw ShapeError("backward: grad is " + grad_prediction.shape_str() +
                     ", expected " + std::to_string(cfg.output_len) + "x" +
                     std::to_string(cfg.channels));
  if (cache.blocks.size() != params.blocks.size())
    throw ShapeError("backward: cache holds " +
                     std::to_string(cache.blocks.size()) + " blocks, model has " +
                     std::to_string(params.blocks.size()));

  SiMlpeParams<S> grads = zeros_like(params);

  // Rows N..T-1 of the raw output are not supervised.
  Matrix<S> gz(cfg.input_len, cfg.channels);
  for (int t = 0; t < cfg.output_len; ++t) {
    const S* grow = grad_prediction.row(t);
    S* zrow = gz.row(t);
    for (int c = 0; c < cfg.channels; ++c) zrow[c] = grow[c];
  }

  Matrix<S> gy = cfg.use_dct ? apply_dct(dct, gz) : gz;
  if (cfg.arch == ModelArch::kSiMlpe) {
    AffineGrads<S> ag = affine_backward(params.fc_out, cache.fc_out_input, gy);
    grads.fc_out.weight = std::move(ag.weight);
    grads.fc_out.bias = std::move(ag.bias);
    gy = std::move(ag.x);
    if (cfg.use_transpose) gy = transpose(gy);
    for (int i = static_cast<int>(params.blocks.size()) - 1; i >= 0; --i) {
      const auto& blk = params.blocks[i];
      const auto& bc = cache.blocks[i];
      Matrix<S> gh = gy;
      if (cfg.use_layernorm) {
        LayerNormGrads<S> lg = layernorm_backward(blk.ln, bc.ln, gy);
        grads.blocks[i].ln.gamma = std::move(lg.gamma);
        grads.blocks[i].ln.beta = std::move(lg.beta);
        gh = std::move(lg.x);
      }
      AffineGrads<S> bg = affine_backward(blk.fc, bc.input, gh);
      grads.blocks[i].fc.weight = std::move(bg.weight);
      grads.blocks[i].fc.bias = std::move(bg.bias);
      gy = add(gy, bg.x);  // skip connection
    }
    if (cfg.use_transpose) gy = transpose(gy);
    AffineGrads<S> ig = affine_backward(params.fc_in, cache.fc_in_input, gy);
    grads.fc_in.weight = std::move(ig.weight);
    grads.fc_in.bias = std::move(ig.bias);
    gy = std::move(ig.x);
  } else {
    gy = transpose(gy);
    AffineGrads<S> bg =
        affine_backward(params.blocks.at(0).fc, cache.blocks.at(0).input, gy);
    grads.blocks[0].fc.weight = std::move(bg.weight);
    grads.blocks[0].fc.bias = std::move(bg.bias);
    gy = transpose(bg.x);
  }
  if (grad_input) {
    *grad_input = cfg.use_dct ? apply_idct(dct, gy) : gy;
    // The last observed frame is added to every residual row, so it collects
    // the whole prediction gradient on top of its network-path share.
    S* last = grad_input->row(cfg.input_len - 1);
    for (int t = 0; t < cfg.output_len; ++t) {
      const S* grow = grad_prediction.row(t);
      for (int c = 0; c < cfg.channels; ++c) last[c] += grow[c];
    }
  }
  return grads;
}

// Zero-information predictor: repeat the final observed pose.
template <typename S>
Matrix<S> last_frame_baseline(const Matrix<S>& x, int out_len) {
  if (x.rows() < 1) throw ShapeError("last_frame_baseline: input has no frames");
  Matrix<S> out(out_len, x.cols());
  const S* last = x.row(x.rows() - 1);
  for (int t = 0; t < out_len; ++t) {
    S* orow = out.row(t);
    for (int c = 0; c < x.cols(); ++c) orow[c] = last[c];
  }
  return out;
}

inline ModelConfig one_fc_config(int input_len, int output_len, int channels,
                                 bool use_dct = true) {
  ModelConfig cfg;
  cfg.arch = ModelArch::kOneFc;
  cfg.input_len = input_len;
  cfg.output_len = output_len;
  cfg.channels = channels;
  cfg.num_blocks = 1;
  cfg.use_layernorm = false;
  cfg.use_dct = use_dct;
  return cfg;
}

}  // namespace simlpe
