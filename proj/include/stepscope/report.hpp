// Copyright 2026 the stepscope authors
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

#include <cstddef>
#include <string>

#include "stepscope/trace.hpp"

namespace stepscope {

/// Deterministic UTF-8 JSON: fixed key order (see docs/trace_format.md),
/// floats as shortest round-trip decimals, NaN as the string "NaN".
/// Identical traces with timing zeroed serialize byte-identically.
std::string emit_json(const Trace& trace);

/// Human-readable step-by-step report. Per step: `[k] op(params)` header,
/// `rows: N -> M (delta)`, before/after sample tables truncated to width,
/// hint lines prefixed by severity tag. Footer carries totals and the
/// overhead share. width must be >= 40.
std::string emit_text(const Trace& trace, std::size_t width = 100);

} // namespace stepscope
