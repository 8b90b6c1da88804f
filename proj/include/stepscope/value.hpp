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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace stepscope {

enum class ValueType : std::uint8_t { Bool, Int, Float, Str };

const char* to_string(ValueType t);
std::optional<ValueType> value_type_from_string(std::string_view s);

/// A cell. monostate is the SQL-style Null.
using Value = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

/// Type of a non-null value; nullopt for Null.
std::optional<ValueType> value_type_of(const Value& v);

/// Expression-level equality: defined only between same-typed non-null
/// values; Null equals nothing (including Null); NaN equals nothing.
/// Int and Float compare numerically after promotion.
bool value_equals(const Value& a, const Value& b);

/// Total order used by sort and by sample min/max. Layered: regular values
/// first (typed comparison), then float NaN, then Null — the trailing ranks
/// hold in both sort directions. Returns <0, 0, >0.
/// Both values must be Null or of the same column type (Int/Float mix allowed).
int value_order_compare(const Value& a, const Value& b);

/// Row-identity equality used by distinct and group keys: Null is identical
/// to Null, every NaN is identical to every NaN, -0.0 identical to 0.0,
/// otherwise same-type numeric/text equality.
bool value_identity_equal(const Value& a, const Value& b);
std::size_t value_identity_hash(const Value& v);

bool row_identity_equal(std::span<const Value> a, std::span<const Value> b);
std::size_t row_identity_hash(std::span<const Value> row);

/// Bit-exact equality (floats compared by bit pattern). Used by the
/// observer-non-interference checks.
bool value_bits_equal(const Value& a, const Value& b);

/// Shortest round-trip decimal for doubles ("0.1" -> "0.1"); NaN -> "NaN",
/// infinities -> "Infinity"/"-Infinity".
std::string float_to_string(double d);

/// Human-readable form: null -> "null", bools -> true/false, floats via
/// float_to_string, strings verbatim.
std::string format_value(const Value& v);

} // namespace stepscope
