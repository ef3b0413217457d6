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

#include <string>
#include <string_view>
#include <vector>

namespace fbmcode {

/// Shortest-safe round-trip text for a double ("%.17g"); infinities are "inf"/"-inf".
std::string format_double(double value);

/// Inverse of format_double. Throws std::invalid_argument on malformed input.
double parse_double(std::string_view text);

/// Splits one CSV line on commas (no quoting; all fields here are plain tokens).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace fbmcode
