// Copyright 2026 The fbmcode Authors.
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

#include <cstdint>
#include <random>

namespace fbmcode {

using Engine = std::mt19937_64;

/// Seed handle for one reproducible random stream.
///
/// Identical (root_seed, stream_id) pairs always produce identical engines.
/// Sub-streams are derived with `child`, so a whole experiment can be keyed
/// off a single root seed while cells of a parallel sweep stay independent.
struct RngSpec {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_id = 0;

  RngSpec child(std::uint64_t sub) const;
  RngSpec child(std::uint64_t a, std::uint64_t b) const { return child(a).child(b); }

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

Engine make_engine(const RngSpec& spec);

}  // namespace fbmcode
