// Copyright 2026 The trajbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajbench/checkpoint.hpp"

#include "trajbench/errors.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace trajbench
{
namespace
{

constexpr char kMagic[8] = {'T', 'R', 'B', 'C', 'K', 'P', 'T', '\0'};

class Writer
{
public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i) {
      u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void u64(std::uint64_t v)
  {
    for (int i = 0; i < 8; ++i) {
      u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string & s)
  {
    u32(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void vec(const Eigen::VectorXd & v)
  {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      f64(v(i));
    }
  }
  std::string & bytes() { return out_; }

private:
  std::string out_;
};

class Reader
{
public:
  Reader(const std::string & data, std::size_t begin, std::size_t end)
  : data_(data), pos_(begin), end_(end)
  {
  }

  std::uint8_t u8()
  {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32()
  {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    }
    return v;
  }
  std::uint64_t u64()
  {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    }
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str()
  {
    const auto n = u32();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Eigen::VectorXd vec()
  {
    const auto n = u64();
    need(n * 8);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v(i) = f64();
    }
    return v;
  }
  bool done() const { return pos_ == end_; }

private:
  void need(std::uint64_t n) const
  {
    if (n > end_ - pos_) {
      throw IoError("checkpoint: truncated payload");
    }
  }

  const std::string & data_;
  std::size_t pos_;
  std::size_t end_;
};

std::uint32_t checksum(const char * data, std::size_t size)
{
  return static_cast<std::uint32_t>(
    crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef *>(data), static_cast<uInt>(size)));
}

}  // namespace

std::string serialize_checkpoint(const RecurrentModel & model)
{
  const auto & c = model.config();
  Writer p;
  p.u64(c.layers);
  p.u64(c.hidden);
  p.u64(c.modes);
  p.u8(c.env_aware ? 1 : 0);
  p.u64(c.history);
  p.u64(c.future);
  p.f64(c.dt);
  p.u64(c.road_budget);
  p.u64(c.max_neighbors);
  p.f64(c.position_scale);
  p.f64(c.velocity_scale);
  for (const auto * n : {&model.history_normalizer(), &model.road_normalizer()}) {
    p.vec(n->mean());
    p.vec(n->stddev());
  }
  const auto & params = model.parameters();
  p.u64(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto & m = params.values[i];
    p.str(params.names[i]);
    p.u64(static_cast<std::uint64_t>(m.rows()));
    p.u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.size(); ++j) {
      p.f64(m.data()[j]);
    }
  }

  Writer out;
  out.bytes().append(kMagic, sizeof(kMagic));
  out.u32(kCheckpointVersion);
  out.u64(p.bytes().size());
  out.bytes() += p.bytes();
  out.u32(checksum(p.bytes().data(), p.bytes().size()));
  return std::move(out.bytes());
}

RecurrentModel deserialize_checkpoint(const std::string & bytes)
{
  constexpr std::size_t kHeader = sizeof(kMagic) + 4 + 8;
  if (bytes.size() < kHeader || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IoError("checkpoint: not a checkpoint file (bad magic or truncated header)");
  }
  Reader header(bytes, sizeof(kMagic), kHeader);
  const auto version = header.u32();
  if (version != kCheckpointVersion) {
    throw IoError(
      "checkpoint: version " + std::to_string(version) + " is not supported (expected " +
      std::to_string(kCheckpointVersion) + ")");
  }
  const auto length = header.u64();
  if (length > bytes.size() - kHeader || bytes.size() - kHeader - length != 4) {
    throw IoError("checkpoint: corrupt file (length mismatch)");
  }
  Reader trailer(bytes, kHeader + length, bytes.size());
  if (trailer.u32() != checksum(bytes.data() + kHeader, length)) {
    throw IoError("checkpoint: corrupt file (checksum mismatch)");
  }

  Reader p(bytes, kHeader, kHeader + length);
  ModelConfig c;
  c.layers = p.u64();
  c.hidden = p.u64();
  c.modes = p.u64();
  c.env_aware = p.u8() != 0;
  c.history = p.u64();
  c.future = p.u64();
  c.dt = p.f64();
  c.road_budget = p.u64();
  c.max_neighbors = p.u64();
  c.position_scale = p.f64();
  c.velocity_scale = p.f64();
  RecurrentModel model(c);
  auto history_mean = p.vec();
  auto history_std = p.vec();
  auto road_mean = p.vec();
  auto road_std = p.vec();
  model.set_normalizers(
    Normalizer(std::move(history_mean), std::move(history_std)),
    Normalizer(std::move(road_mean), std::move(road_std)));

  auto & params = model.parameters();
  if (p.u64() != params.size()) {
    throw IoError("checkpoint: tensor count does not match the configuration");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto name = p.str();
    const auto rows = p.u64();
    const auto cols = p.u64();
    auto & m = params.values[i];
    if (name != params.names[i] || rows != static_cast<std::uint64_t>(m.rows()) ||
        cols != static_cast<std::uint64_t>(m.cols())) {
      throw IoError("checkpoint: tensor '" + name + "' does not match the configuration");
    }
    for (Eigen::Index j = 0; j < m.size(); ++j) {
      m.data()[j] = p.f64();
    }
  }
  if (!p.done()) {
    throw IoError("checkpoint: trailing bytes in payload");
  }
  return model;
}

void save_checkpoint(const RecurrentModel & model, const std::filesystem::path & path)
{
  const auto bytes = serialize_checkpoint(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open checkpoint for writing: " + path.string());
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("failed writing checkpoint: " + path.string());
  }
}

RecurrentModel load_checkpoint(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open checkpoint: " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace trajbench
