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

#include "fbmcode/rng.hpp"

namespace fbmcode {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngSpec RngSpec::child(std::uint64_t sub) const {
  return RngSpec{root_seed, splitmix64(stream_id ^ splitmix64(sub + 0x632be59bd9b4e019ULL))};
}

Engine make_engine(const RngSpec& spec) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.root_seed),
                    static_cast<std::uint32_t>(spec.root_seed >> 32),
                    static_cast<std::uint32_t>(spec.stream_id),
                    static_cast<std::uint32_t>(spec.stream_id >> 32)};
  return Engine(seq);
}

}  // namespace fbmcode
