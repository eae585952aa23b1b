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

#pragma once

#include <string>

#include "tripex/tensor.hpp"

namespace tripex {

// Parameter checkpoint, a flat binary map of name -> matrix. Layout
// (little-endian throughout):
//
//   magic   8 bytes  "TPXPARAM"
//   version u32      currently 1
//   count   u64      number of entries
//   entry*  count times, in ascending name order:
//     name_len u32
//     name     name_len bytes, UTF-8
//     rows     u32
//     cols     u32
//     values   rows*cols float64, row-major raw bits
//
// Doubles are written as raw IEEE-754 bit patterns, so save followed by
// load reproduces every parameter bit for bit.
inline constexpr char kCheckpointMagic[8] = {'T', 'P', 'X', 'P', 'A', 'R', 'A', 'M'};
inline constexpr uint32_t kCheckpointVersion = 1;

// Writes atomically (temp file + rename). Throws Error on I/O failure.
void save_params(const std::string& path, const ParamStore& params);

// Throws Error on I/O failure, bad magic, unsupported version, or a
// truncated/trailing-garbage file.
ParamStore load_params(const std::string& path);

}  // namespace tripex
