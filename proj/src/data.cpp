#include "simlpe/data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "simlpe/rng.hpp"
#include "simlpe/wire.hpp"

namespace simlpe {

namespace wire {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path);
  return std::move(ss).str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace wire

namespace {

constexpr char kMotionMagic[4] = {'M', 'O', 'T', 'N'};
constexpr uint16_t kMotionVersion = 1;

void check_sequence(const MotionSequence& seq) {
  if (seq.frame_rate <= 0)
    throw ConfigError("motion: frame rate must be positive");
  if (seq.num_frames < 0 || seq.num_joints < 0)
    throw ConfigError("motion: negative dimensions");
  const size_t expect = static_cast<size_t>(seq.num_frames) * seq.channels();
  if (seq.coords.size() != expect)
    throw ShapeError("motion: coords has " + std::to_string(seq.coords.size()) +
                     " values, expected " + std::to_string(expect));
}

}  // namespace

void write_motion(const MotionSequence& seq, const std::string& path) {
  check_sequence(seq);
  std::string buf;
  buf.reserve(22 + seq.coords.size() * 4);
  buf.append(kMotionMagic, 4);
  wire::put_u16(buf, kMotionVersion);
  wire::put_f32(buf, seq.frame_rate);
  wire::put_u32(buf, static_cast<uint32_t>(seq.num_frames));
  wire::put_u32(buf, static_cast<uint32_t>(seq.num_joints));
  for (float v : seq.coords) wire::put_f32(buf, v);
  wire::put_u64(buf, wire::fnv1a64(buf.data(), buf.size()));
  wire::write_file(path, buf);
}

MotionSequence read_motion(const std::string& path) {
  const std::string buf = wire::read_file(path);
  wire::Cursor cur(buf, path);

  char magic[4];
  cur.read_bytes(magic, 4);
  if (std::memcmp(magic, kMotionMagic, 4) != 0)
    throw FormatError(FormatError::Kind::BadMagic,
                      path + ": not a motion file (bad magic)");
  const uint16_t version = cur.read_u16();
  if (version != kMotionVersion)
    throw FormatError(FormatError::Kind::BadVersion,
                      path + ": unsupported motion format version " +
                          std::to_string(version));

  MotionSequence seq;
  seq.frame_rate = cur.read_f32();
  seq.num_frames = static_cast<int>(cur.read_u32());
  seq.num_joints = static_cast<int>(cur.read_u32());
  const size_t count = static_cast<size_t>(seq.num_frames) * seq.channels();

  // Validate total size up front so a short payload reports truncation rather
  // than a checksum mismatch.
  cur.need(count * 4 + 8);
  seq.coords.resize(count);
  for (size_t i = 0; i < count; ++i) seq.coords[i] = cur.read_f32();

  const uint64_t stored = cur.read_u64();
  const uint64_t actual = wire::fnv1a64(buf.data(), cur.pos() - 8);
  if (stored != actual)
    throw FormatError(FormatError::Kind::BadChecksum,
                      path + ": checksum mismatch");
  if (cur.remaining() != 0)
    throw FormatError(FormatError::Kind::BadShape,
                      path + ": trailing bytes after checksum");
  return seq;
}

MotionSequence import_csv(const std::string& path, float frame_rate,
                          int num_joints) {
  if (num_joints < 1) throw ConfigError("csv import: joint count must be >= 1");
  if (frame_rate <= 0) throw ConfigError("csv import: frame rate must be positive");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  MotionSequence seq;
  seq.frame_rate = frame_rate;
  seq.num_joints = num_joints;
  const int fields = 3 * num_joints;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;

    int seen = 0;
    size_t pos = 0;
    while (true) {
      size_t comma = line.find(',', pos);
      std::string field = line.substr(pos, comma == std::string::npos
                                               ? std::string::npos
                                               : comma - pos);
      try {
        size_t used = 0;
        const float v = std::stof(field, &used);
        while (used < field.size() &&
               (field[used] == ' ' || field[used] == '\t' || field[used] == '\r'))
          ++used;
        if (used != field.size()) throw std::invalid_argument(field);
        seq.coords.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": non-numeric field '" + field + "'");
      }
      ++seen;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (seen != fields) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(fields) + " fields, got " +
                        std::to_string(seen));
    }
    ++seq.num_frames;
  }
  if (in.bad()) throw IoError("read failed for " + path);
  if (seq.num_frames == 0)
    throw ConfigError(path + ": no data lines (empty input)");
  return seq;
}

MotionSequence center_on_root(const MotionSequence& seq, int root_joint) {
  check_sequence(seq);
  if (root_joint < 0 || root_joint >= seq.num_joints)
    throw ConfigError("center_on_root: joint index " + std::to_string(root_joint) +
                      " out of range (sequence has " +
                      std::to_string(seq.num_joints) + " joints)");
  MotionSequence out = seq;
  for (int t = 0; t < out.num_frames; ++t) {
    float* f = out.frame(t);
    const float rx = f[3 * root_joint];
    const float ry = f[3 * root_joint + 1];
    const float rz = f[3 * root_joint + 2];
    for (int k = 0; k < out.num_joints; ++k) {
      f[3 * k] -= rx;
      f[3 * k + 1] -= ry;
      f[3 * k + 2] -= rz;
    }
  }
  return out;
}

MotionSequence subsample(const MotionSequence& seq, int stride) {
  check_sequence(seq);
  if (stride < 1) throw ConfigError("subsample: stride must be >= 1");
  if (stride == 1) return seq;
  MotionSequence out;
  out.frame_rate = seq.frame_rate / static_cast<float>(stride);
  out.num_joints = seq.num_joints;
  for (int t = 0; t < seq.num_frames; t += stride) {
    const float* f = seq.frame(t);
    out.coords.insert(out.coords.end(), f, f + seq.channels());
    ++out.num_frames;
  }
  return out;
}

MotionSequence generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_joints < 1 || spec.num_frames < 0 || spec.harmonics < 0)
    throw ConfigError("synthetic: joints must be >= 1, frames and harmonics >= 0");
  if (spec.freq_max < spec.freq_min || spec.amp_max < spec.amp_min ||
      spec.drift_max < spec.drift_min)
    throw ConfigError("synthetic: empty parameter range");
  if (spec.frame_rate <= 0)
    throw ConfigError("synthetic: frame rate must be positive");

  MotionSequence seq;
  seq.frame_rate = static_cast<float>(spec.frame_rate);
  seq.num_frames = spec.num_frames;
  seq.num_joints = spec.num_joints;
  seq.coords.assign(static_cast<size_t>(spec.num_frames) * seq.channels(), 0.0f);

  Rng rng(spec.seed);
  const double two_pi = 2.0 * M_PI;
  for (int coord = 0; coord < seq.channels(); ++coord) {
    std::vector<double> freq(spec.harmonics), amp(spec.harmonics),
        phase(spec.harmonics);
    for (int h = 0; h < spec.harmonics; ++h) {
      freq[h] = rng.uniform(spec.freq_min, spec.freq_max);
      amp[h] = rng.uniform(spec.amp_min, spec.amp_max);
      phase[h] = rng.uniform(0.0, two_pi);
    }
    const double drift = rng.uniform(spec.drift_min, spec.drift_max);
    for (int t = 0; t < spec.num_frames; ++t) {
      double v = drift * t;
      const double secs = t / spec.frame_rate;
      for (int h = 0; h < spec.harmonics; ++h)
        v += amp[h] * std::sin(two_pi * freq[h] * secs + phase[h]);
      seq.coords[static_cast<size_t>(t) * seq.channels() + coord] =
          static_cast<float>(v);
    }
  }
  return seq;
}

}  // namespace simlpe
