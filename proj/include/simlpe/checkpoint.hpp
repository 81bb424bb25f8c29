#pragma once

// Model checkpoint: magic "SMLP", version u16 LE (= 1), the model
// configuration as fixed-width little-endian integers (arch u8, input_len u32,
// output_len u32, channels u32, num_blocks u32, use_transpose u8,
// use_layernorm u8, use_dct u8), every parameter array in declaration order as
// little-endian 32-bit floats, then a 64-bit FNV-1a checksum of all preceding
// bytes after the magic and version. Parameters are stored as f32 whatever
// precision the model runs at.

#include <cstring>
#include <string>

#include "simlpe/model.hpp"
#include "simlpe/wire.hpp"

namespace simlpe {

namespace detail {
constexpr char kCheckpointMagic[4] = {'S', 'M', 'L', 'P'};
constexpr uint16_t kCheckpointVersion = 1;
}  // namespace detail

template <typename S>
void save_checkpoint(const std::string& path, const ModelConfig& cfg,
                     const SiMlpeParams<S>& params) {
  cfg.validate();
  std::string buf;
  buf.append(detail::kCheckpointMagic, 4);
  wire::put_u16(buf, detail::kCheckpointVersion);
  const size_t payload_start = buf.size();
  buf.push_back(cfg.arch == ModelArch::kOneFc ? 1 : 0);
  wire::put_u32(buf, static_cast<uint32_t>(cfg.input_len));
  wire::put_u32(buf, static_cast<uint32_t>(cfg.output_len));
  wire::put_u32(buf, static_cast<uint32_t>(cfg.channels));
  wire::put_u32(buf, static_cast<uint32_t>(cfg.num_blocks));
  buf.push_back(cfg.use_transpose ? 1 : 0);
  buf.push_back(cfg.use_layernorm ? 1 : 0);
  buf.push_back(cfg.use_dct ? 1 : 0);
  for (const auto* arr : tensor_refs(params))
    for (S v : *arr) wire::put_f32(buf, static_cast<float>(v));
  wire::put_u64(buf,
                wire::fnv1a64(buf.data() + payload_start, buf.size() - payload_start));
  wire::write_file(path, buf);
}

template <typename S>
struct Checkpoint {
  ModelConfig config;
  SiMlpeParams<S> params;
};

template <typename S>
Checkpoint<S> load_checkpoint(const std::string& path) {
  const std::string buf = wire::read_file(path);
  wire::Cursor cur(buf, path);

  char magic[4];
  cur.read_bytes(magic, 4);
  if (std::memcmp(magic, detail::kCheckpointMagic, 4) != 0)
    throw FormatError(FormatError::Kind::BadMagic,
                      path + ": not a checkpoint file (bad magic)");
  const uint16_t version = cur.read_u16();
  if (version != detail::kCheckpointVersion)
    throw FormatError(FormatError::Kind::BadVersion,
                      path + ": unsupported checkpoint version " +
                          std::to_string(version));

  const size_t payload_start = cur.pos();
  Checkpoint<S> ckpt;
  ModelConfig& cfg = ckpt.config;
  uint8_t arch;
  cur.read_bytes(&arch, 1);
  if (arch > 1)
    throw FormatError(FormatError::Kind::BadShape,
                      path + ": unknown architecture tag " + std::to_string(arch));
  cfg.arch = arch == 1 ? ModelArch::kOneFc : ModelArch::kSiMlpe;
  cfg.input_len = static_cast<int>(cur.read_u32());
  cfg.output_len = static_cast<int>(cur.read_u32());
  cfg.channels = static_cast<int>(cur.read_u32());
  cfg.num_blocks = static_cast<int>(cur.read_u32());
  uint8_t flags[3];
  cur.read_bytes(flags, 3);
  cfg.use_transpose = flags[0] != 0;
  cfg.use_layernorm = flags[1] != 0;
  cfg.use_dct = flags[2] != 0;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw FormatError(FormatError::Kind::BadShape,
                      path + ": invalid stored configuration: " + e.what());
  }

  const int64_t count = param_count(cfg);
  cur.need(static_cast<size_t>(count) * 4 + 8);

  // Allocate the parameter structure at its stored shapes, then fill it.
  ckpt.params = init_params<S>(cfg, 0);
  for (auto* arr : tensor_refs(ckpt.params))
    for (auto& v : *arr) v = static_cast<S>(cur.read_f32());

  const uint64_t stored = cur.read_u64();
  const uint64_t actual =
      wire::fnv1a64(buf.data() + payload_start, cur.pos() - 8 - payload_start);
  if (stored != actual)
    throw FormatError(FormatError::Kind::BadChecksum, path + ": checksum mismatch");
  if (cur.remaining() != 0)
    throw FormatError(FormatError::Kind::BadShape,
                      path + ": trailing bytes after checksum");
  return ckpt;
}

}  // namespace simlpe
