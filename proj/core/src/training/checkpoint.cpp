// Copyright 2026 The latentbridge Authors.
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

#include "latentbridge/training/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>

namespace latentbridge {
namespace {

constexpr char kMagic[4] = {'Z', 'N', 'L', 'G'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  std::size_t position() const { return pos_; }
  bool at_end() const { return pos_ == in_.size(); }

  void need(std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw CheckpointError("checkpoint truncated at byte " + std::to_string(pos_) + " while reading " + what);
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(static_cast<std::uint8_t>(in_[pos_++]) << (8 * i));
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(in_[pos_++])) << (8 * i);
    return v;
  }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  const std::string& in_;
  std::size_t pos_ = 0;
};

std::string config_record(const Checkpoint& ckpt) {
  std::string record = "[model]\n" + ckpt.config.to_text() + "[history]\n";
  for (const auto& line : ckpt.history) record += line + "\n";
  return record;
}

void parse_config_record(const std::string& record, Checkpoint& ckpt) {
  const std::string model_tag = "[model]\n";
  const std::string history_tag = "[history]\n";
  const auto split = record.find(history_tag);
  if (record.rfind(model_tag, 0) != 0 || split == std::string::npos) {
    throw CheckpointError("checkpoint config record is malformed");
  }
  try {
    ckpt.config = ModelConfig::from_text(record.substr(model_tag.size(), split - model_tag.size()));
  } catch (const ModelError& e) {
    throw CheckpointError(std::string("checkpoint config record: ") + e.what());
  }
  std::istringstream in(record.substr(split + history_tag.size()));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ckpt.history.push_back(line);
  }
}

}  // namespace

Checkpoint Checkpoint::from_model(const Model& model, std::vector<std::string> history) {
  Checkpoint ckpt;
  ckpt.config = model.config();
  ckpt.history = std::move(history);
  for (const auto& e : model.params().entries()) {
    auto data = e.value.data();
    ckpt.tensors.push_back(NamedTensor{e.name, e.value.shape(), std::vector<float>(data.begin(), data.end())});
  }
  return ckpt;
}

Model Checkpoint::to_model() const {
  Model model(config, 0);
  const auto& entries = model.params().entries();
  if (entries.size() != tensors.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(tensors.size()) + " tensors, model expects " +
                          std::to_string(entries.size()));
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& t = tensors[i];
    if (t.name != entries[i].name || t.shape != entries[i].value.shape()) {
      throw CheckpointError("checkpoint tensor " + std::to_string(i) + " is " + t.name + " " +
                            shape_to_string(t.shape) + ", model expects " + entries[i].name + " " +
                            shape_to_string(entries[i].value.shape()));
    }
    Tensor target = entries[i].value;
    std::copy(t.values.begin(), t.values.end(), target.data().begin());
  }
  return model;
}

bool Checkpoint::has_stage(std::string_view stage) const {
  const std::string key = "stage=" + std::string(stage);
  for (const auto& line : history) {
    if (line == key || line.rfind(key + " ", 0) == 0) return true;
  }
  return false;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(Checkpoint::kVersion);
  w.u32(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    if (t.name.size() > 0xFFFF) throw CheckpointError("tensor name too long: " + t.name.substr(0, 32));
    if (t.shape.size() > 0xFF) throw CheckpointError("tensor rank too large: " + t.name);
    if (shape_numel(t.shape) != t.values.size()) throw CheckpointError("tensor payload mismatch: " + t.name);
    w.u16(static_cast<std::uint16_t>(t.name.size()));
    w.bytes(t.name.data(), t.name.size());
    w.u8(static_cast<std::uint8_t>(t.shape.size()));
    for (auto dim : t.shape) w.u32(static_cast<std::uint32_t>(dim));
    for (float v : t.values) w.f32(v);
  }
  const std::string record = config_record(ckpt);
  w.u32(static_cast<std::uint32_t>(record.size()));
  w.bytes(record.data(), record.size());
  return w.take();
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.str(4, "magic") != std::string(kMagic, 4)) throw CheckpointError("checkpoint has bad magic at byte 0");
  const std::uint32_t version = r.u32("version");
  if (version != Checkpoint::kVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " at byte 4 is not supported (expected " +
                          std::to_string(Checkpoint::kVersion) + ")");
  }
  const std::uint32_t count = r.u32("tensor count");
  Checkpoint ckpt;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = r.str(r.u16("tensor name length"), "tensor name");
    const std::uint8_t rank = r.u8("tensor rank");
    std::size_t numel = 1;
    for (std::uint8_t k = 0; k < rank; ++k) {
      t.shape.push_back(r.u32("tensor dims"));
      numel *= t.shape.back();
      if (numel > bytes.size()) {
        throw CheckpointError("checkpoint tensor " + t.name + " dims exceed the file size at byte " +
                              std::to_string(r.position()));
      }
    }
    if (rank == 0 || numel == 0) {
      throw CheckpointError("checkpoint tensor " + t.name + " has an empty shape at byte " +
                            std::to_string(r.position()));
    }
    r.need(numel * 4, "tensor payload");
    t.values.resize(numel);
    for (auto& v : t.values) v = std::bit_cast<float>(r.u32("tensor payload"));
    ckpt.tensors.push_back(std::move(t));
  }
  const std::uint32_t length = r.u32("config record length");
  parse_config_record(r.str(length, "config record"), ckpt);
  if (!r.at_end()) {
    throw CheckpointError("checkpoint has trailing bytes at byte " + std::to_string(r.position()) +
                          " (tensor count in header does not match the payload)");
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint(bytes);
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

}  // namespace latentbridge
