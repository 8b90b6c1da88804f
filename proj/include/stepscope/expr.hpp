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

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "stepscope/dataset.hpp"
#include "stepscope/value.hpp"

namespace stepscope {

// Static type lattice for expressions. NullT is the type of the bare
// `null` literal; it unifies with everything and materializes as str.
enum class StaticType : std::uint8_t { Bool, Int, Float, Str, NullT };

const char* to_string(StaticType t);
ValueType static_to_column_type(StaticType t);

enum class BinOp : std::uint8_t { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp : std::uint8_t { Not, IsNull, IsNotNull };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ColumnRef { std::string name; };
struct Literal { Value value; };
struct BinaryExpr { BinOp op; ExprPtr lhs, rhs; };
struct UnaryExpr { UnOp op; ExprPtr operand; };

struct Expr {
    std::variant<ColumnRef, Literal, BinaryExpr, UnaryExpr> node;
};

/// Parse the predicate/expression grammar:
///   or-chains over and-chains over `not`, comparisons (==,!=,<,<=,>,>=,
///   `is null`, `is not null`) over +,- over *,/; operands are identifiers,
///   integer and decimal literals, single-quoted strings ('' escapes a
///   quote), true, false, null; parentheses group.
/// Throws ParseError with a character offset on bad input.
ExprPtr parse_expr(std::string_view text);

struct BindIssue {
    enum class Kind { UnknownColumn, TypeError } kind;
    std::string column;  // set for UnknownColumn
    std::string message;
};

/// Validated expression tree with column indices resolved, ready to
/// evaluate without further schema lookups.
struct BoundExpr {
    enum class Kind : std::uint8_t { Column, Literal, Binary, Unary };
    Kind kind;
    StaticType type;
    std::size_t col = 0;       // Column
    Value literal;             // Literal
    BinOp bop{};               // Binary
    UnOp uop{};                // Unary
    std::unique_ptr<BoundExpr> lhs, rhs;
};

struct BindResult {
    std::shared_ptr<const BoundExpr> expr;  // null when issues is non-empty
    StaticType type = StaticType::NullT;
    std::vector<BindIssue> issues;

    bool ok() const { return issues.empty(); }
};

/// Resolve column references and type-check. All type errors surface here;
/// evaluation never fails.
BindResult bind_expr(const Expr& expr, const Schema& schema);

/// Evaluate against one row. Pinned semantics: arithmetic with a Null
/// operand yields Null; `/` always yields Float and a zero divisor yields
/// Null; Int overflow yields Null; comparisons with a Null operand yield
/// false; and/or/not treat Null as false; `is null` is the only Null test.
Value eval_expr(const BoundExpr& expr, std::span<const Value> row);

} // namespace stepscope
