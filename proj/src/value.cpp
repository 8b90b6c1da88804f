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

#include "stepscope/value.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <functional>

#include "stepscope/errors.hpp"

namespace stepscope {

const char* to_string(ValueType t) {
    switch (t) {
        case ValueType::Bool: return "bool";
        case ValueType::Int: return "int";
        case ValueType::Float: return "float";
        case ValueType::Str: return "str";
    }
    return "?";
}

std::optional<ValueType> value_type_from_string(std::string_view s) {
    if (s == "bool") return ValueType::Bool;
    if (s == "int") return ValueType::Int;
    if (s == "float") return ValueType::Float;
    if (s == "str") return ValueType::Str;
    return std::nullopt;
}

std::optional<ValueType> value_type_of(const Value& v) {
    switch (v.index()) {
        case 1: return ValueType::Bool;
        case 2: return ValueType::Int;
        case 3: return ValueType::Float;
        case 4: return ValueType::Str;
        default: return std::nullopt;
    }
}

bool value_equals(const Value& a, const Value& b) {
    if (is_null(a) || is_null(b)) return false;
    const bool a_num = a.index() == 2 || a.index() == 3;
    const bool b_num = b.index() == 2 || b.index() == 3;
    if (a_num && b_num) {
        if (a.index() == 2 && b.index() == 2)
            return std::get<std::int64_t>(a) == std::get<std::int64_t>(b);
        const double x = a.index() == 2 ? static_cast<double>(std::get<std::int64_t>(a))
                                        : std::get<double>(a);
        const double y = b.index() == 2 ? static_cast<double>(std::get<std::int64_t>(b))
                                        : std::get<double>(b);
        return x == y;  // NaN != NaN by IEEE
    }
    if (a.index() != b.index()) return false;
    return a == b;
}

namespace {

// null after NaN after everything else, in both sort directions.
int order_rank(const Value& v) {
    if (is_null(v)) return 2;
    if (v.index() == 3 && std::isnan(std::get<double>(v))) return 1;
    return 0;
}

} // namespace

int value_order_compare(const Value& a, const Value& b) {
    const int ra = order_rank(a), rb = order_rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    if (ra != 0) return 0;  // NaN/NaN or Null/Null tie

    const bool a_num = a.index() == 2 || a.index() == 3;
    const bool b_num = b.index() == 2 || b.index() == 3;
    if (a_num && b_num) {
        if (a.index() == 2 && b.index() == 2) {
            const auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
            return x < y ? -1 : x > y ? 1 : 0;
        }
        const double x = a.index() == 2 ? static_cast<double>(std::get<std::int64_t>(a))
                                        : std::get<double>(a);
        const double y = b.index() == 2 ? static_cast<double>(std::get<std::int64_t>(b))
                                        : std::get<double>(b);
        return x < y ? -1 : x > y ? 1 : 0;
    }
    if (a.index() != b.index())
        throw EngineError("ordering values of different types");
    switch (a.index()) {
        case 1: {
            const bool x = std::get<bool>(a), y = std::get<bool>(b);
            return x == y ? 0 : (!x ? -1 : 1);
        }
        case 4: {
            const int c = std::get<std::string>(a).compare(std::get<std::string>(b));
            return c < 0 ? -1 : c > 0 ? 1 : 0;
        }
        default: return 0;
    }
}

bool value_identity_equal(const Value& a, const Value& b) {
    if (is_null(a) && is_null(b)) return true;
    if (is_null(a) || is_null(b)) return false;
    if (a.index() != b.index()) return false;
    if (a.index() == 3) {
        const double x = std::get<double>(a), y = std::get<double>(b);
        if (std::isnan(x) && std::isnan(y)) return true;
        return x == y;  // merges -0.0 and 0.0
    }
    return a == b;
}

namespace {

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

} // namespace

std::size_t value_identity_hash(const Value& v) {
    switch (v.index()) {
        case 0: return 0x6e756c6cULL;  // any fixed Null salt
        case 1: return std::get<bool>(v) ? 3 : 5;
        case 2: return std::hash<std::int64_t>{}(std::get<std::int64_t>(v));
        case 3: {
            double d = std::get<double>(v);
            if (std::isnan(d)) return 0x4e614eULL;
            if (d == 0.0) d = 0.0;  // canonicalize -0.0
            return std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(d));
        }
        case 4: return std::hash<std::string>{}(std::get<std::string>(v));
    }
    return 0;
}

bool row_identity_equal(std::span<const Value> a, std::span<const Value> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!value_identity_equal(a[i], b[i])) return false;
    return true;
}

std::size_t row_identity_hash(std::span<const Value> row) {
    std::size_t h = 0x5265736572766f69ULL;
    for (const Value& v : row) h = hash_mix(h, value_identity_hash(v));
    return h;
}

bool value_bits_equal(const Value& a, const Value& b) {
    if (a.index() != b.index()) return false;
    if (a.index() == 3)
        return std::bit_cast<std::uint64_t>(std::get<double>(a)) ==
               std::bit_cast<std::uint64_t>(std::get<double>(b));
    return a == b;
}

std::string float_to_string(double d) {
    if (std::isnan(d)) return "NaN";
    if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    return std::string(buf, ptr);
}

std::string format_value(const Value& v) {
    switch (v.index()) {
        case 0: return "null";
        case 1: return std::get<bool>(v) ? "true" : "false";
        case 2: return std::to_string(std::get<std::int64_t>(v));
        case 3: return float_to_string(std::get<double>(v));
        case 4: return std::get<std::string>(v);
    }
    return {};
}

} // namespace stepscope
