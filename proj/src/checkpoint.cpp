// Copyright 2026 The Tripex Authors
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

#include "tripex/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include "tripex/util.hpp"

namespace tripex {

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

namespace {

void put_u32(std::string& out, uint32_t x) {
  char buf[4];
  std::memcpy(buf, &x, 4);
  out.append(buf, 4);
}

void put_u64(std::string& out, uint64_t x) {
  char buf[8];
  std::memcpy(buf, &x, 8);
  out.append(buf, 8);
}

struct Reader {
  const std::string& data;
  const std::string& path;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > data.size()) throw Error("checkpoint '" + path + "': truncated file");
  }
  uint32_t u32() {
    need(4);
    uint32_t x;
    std::memcpy(&x, data.data() + pos, 4);
    pos += 4;
    return x;
  }
  uint64_t u64() {
    need(8);
    uint64_t x;
    std::memcpy(&x, data.data() + pos, 8);
    pos += 8;
    return x;
  }
  std::string bytes(size_t n) {
    need(n);
    std::string s = data.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

void save_params(const std::string& path, const ParamStore& params) {
  std::string out;
  out.append(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u32(out, kCheckpointVersion);
  put_u64(out, params.size());
  for (const auto& [name, t] : params) {
    put_u32(out, static_cast<uint32_t>(name.size()));
    out.append(name);
    put_u32(out, static_cast<uint32_t>(t.rows));
    put_u32(out, static_cast<uint32_t>(t.cols));
    const size_t bytes = t.size() * sizeof(double);
    const size_t off = out.size();
    out.resize(off + bytes);
    std::memcpy(out.data() + off, t.data(), bytes);
  }
  atomic_write_file(path, out);
}

ParamStore load_params(const std::string& path) {
  const std::string data = read_file(path);
  Reader r{data, path};
  const std::string magic = r.bytes(sizeof(kCheckpointMagic));
  if (std::memcmp(magic.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw Error("checkpoint '" + path + "': bad magic");
  }
  const uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw Error("checkpoint '" + path + "': unsupported version " + std::to_string(version));
  }
  const uint64_t count = r.u64();
  ParamStore params;
  for (uint64_t i = 0; i < count; ++i) {
    const std::string name = r.bytes(r.u32());
    const uint32_t rows = r.u32();
    const uint32_t cols = r.u32();
    if (rows == 0 || cols == 0) {
      throw Error("checkpoint '" + path + "': empty shape for '" + name + "'");
    }
    Tensor t(static_cast<int>(rows), static_cast<int>(cols));
    const size_t bytes = t.size() * sizeof(double);
    r.need(bytes);
    std::memcpy(t.data(), data.data() + r.pos, bytes);
    r.pos += bytes;
    if (!params.emplace(name, std::move(t)).second) {
      throw Error("checkpoint '" + path + "': duplicate parameter '" + name + "'");
    }
  }
  if (r.pos != data.size()) {
    throw Error("checkpoint '" + path + "': trailing bytes after last entry");
  }
  return params;
}

}  // namespace tripex
