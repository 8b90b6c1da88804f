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

#include "stepscope/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "stepscope/errors.hpp"

namespace stepscope {

const char* to_string(StaticType t) {
    switch (t) {
        case StaticType::Bool: return "bool";
        case StaticType::Int: return "int";
        case StaticType::Float: return "float";
        case StaticType::Str: return "str";
        case StaticType::NullT: return "null";
    }
    return "?";
}

ValueType static_to_column_type(StaticType t) {
    switch (t) {
        case StaticType::Bool: return ValueType::Bool;
        case StaticType::Int: return ValueType::Int;
        case StaticType::Float: return ValueType::Float;
        case StaticType::Str: return ValueType::Str;
        case StaticType::NullT: return ValueType::Str;
    }
    return ValueType::Str;
}

namespace {

enum class Tok : std::uint8_t {
    Ident, IntLit, FloatLit, StrLit,
    KwOr, KwAnd, KwNot, KwIs, KwNull, KwTrue, KwFalse,
    LParen, RParen,
    Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash,
    End,
};

struct Token {
    Tok kind;
    std::size_t pos;
    std::string text;
    std::int64_t ival = 0;
    double fval = 0.0;
};

[[noreturn]] void lex_fail(std::size_t pos, const std::string& what) {
    throw ParseError("expression: " + what + " at offset " + std::to_string(pos));
}

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    const auto push = [&](Tok k, std::size_t pos, std::string text = {}) {
        out.push_back(Token{k, pos, std::move(text)});
    };
    while (i < s.size()) {
        const char c = s[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { ++i; continue; }
        const std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            ++i;
            while (i < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                ++i;
            std::string word(s.substr(start, i - start));
            if (word == "or") push(Tok::KwOr, start);
            else if (word == "and") push(Tok::KwAnd, start);
            else if (word == "not") push(Tok::KwNot, start);
            else if (word == "is") push(Tok::KwIs, start);
            else if (word == "null") push(Tok::KwNull, start);
            else if (word == "true") push(Tok::KwTrue, start);
            else if (word == "false") push(Tok::KwFalse, start);
            else push(Tok::Ident, start, std::move(word));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            ++i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            bool is_float = false;
            if (i < s.size() && s[i] == '.') {
                if (i + 1 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1])))
                    lex_fail(i, "digit expected after decimal point");
                is_float = true;
                ++i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            }
            Token t{is_float ? Tok::FloatLit : Tok::IntLit, start,
                    std::string(s.substr(start, i - start))};
            if (is_float) {
                auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(),
                                               t.fval);
                if (ec != std::errc{} || p != t.text.data() + t.text.size())
                    lex_fail(start, "bad decimal literal '" + t.text + "'");
            } else {
                auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(),
                                               t.ival);
                if (ec != std::errc{} || p != t.text.data() + t.text.size())
                    lex_fail(start, "integer literal out of range '" + t.text + "'");
            }
            out.push_back(std::move(t));
            continue;
        }
        if (c == '\'') {
            std::string text;
            ++i;
            for (;;) {
                if (i >= s.size()) lex_fail(start, "unterminated string literal");
                if (s[i] == '\'') {
                    if (i + 1 < s.size() && s[i + 1] == '\'') {  // '' escapes a quote
                        text.push_back('\'');
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                text.push_back(s[i]);
                ++i;
            }
            out.push_back(Token{Tok::StrLit, start, std::move(text)});
            continue;
        }
        switch (c) {
            case '(': push(Tok::LParen, start); ++i; continue;
            case ')': push(Tok::RParen, start); ++i; continue;
            case '+': push(Tok::Plus, start); ++i; continue;
            case '-': push(Tok::Minus, start); ++i; continue;
            case '*': push(Tok::Star, start); ++i; continue;
            case '/': push(Tok::Slash, start); ++i; continue;
            case '=':
                if (i + 1 < s.size() && s[i + 1] == '=') { push(Tok::Eq, start); i += 2; continue; }
                lex_fail(start, "'=' is not an operator, use '=='");
            case '!':
                if (i + 1 < s.size() && s[i + 1] == '=') { push(Tok::Ne, start); i += 2; continue; }
                lex_fail(start, "'!' is not an operator, use 'not' or '!='");
            case '<':
                if (i + 1 < s.size() && s[i + 1] == '=') { push(Tok::Le, start); i += 2; continue; }
                push(Tok::Lt, start); ++i; continue;
            case '>':
                if (i + 1 < s.size() && s[i + 1] == '=') { push(Tok::Ge, start); i += 2; continue; }
                push(Tok::Gt, start); ++i; continue;
            default:
                lex_fail(start, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back(Token{Tok::End, s.size(), {}});
    return out;
}

ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r) {
    return std::make_shared<Expr>(Expr{BinaryExpr{op, std::move(l), std::move(r)}});
}

ExprPtr make_unary(UnOp op, ExprPtr operand) {
    return std::make_shared<Expr>(Expr{UnaryExpr{op, std::move(operand)}});
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ExprPtr parse() {
        ExprPtr e = parse_or();
        if (peek().kind != Tok::End)
            fail(peek(), "unexpected trailing input");
        return e;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& advance() { return toks_[i_++]; }
    bool accept(Tok k) {
        if (peek().kind == k) { ++i_; return true; }
        return false;
    }
    void expect(Tok k, const char* what) {
        if (!accept(k)) fail(peek(), std::string("expected ") + what);
    }
    [[noreturn]] static void fail(const Token& t, const std::string& what) {
        throw ParseError("expression: " + what + " at offset " + std::to_string(t.pos));
    }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while (accept(Tok::KwOr)) e = make_binary(BinOp::Or, e, parse_and());
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_not();
        while (accept(Tok::KwAnd)) e = make_binary(BinOp::And, e, parse_not());
        return e;
    }

    ExprPtr parse_not() {
        if (accept(Tok::KwNot)) return make_unary(UnOp::Not, parse_not());
        return parse_cmp();
    }

    // One optional, non-associative comparison or `is [not] null` test.
    ExprPtr parse_cmp() {
        ExprPtr e = parse_add();
        switch (peek().kind) {
            case Tok::Eq: advance(); return make_binary(BinOp::Eq, e, parse_add());
            case Tok::Ne: advance(); return make_binary(BinOp::Ne, e, parse_add());
            case Tok::Lt: advance(); return make_binary(BinOp::Lt, e, parse_add());
            case Tok::Le: advance(); return make_binary(BinOp::Le, e, parse_add());
            case Tok::Gt: advance(); return make_binary(BinOp::Gt, e, parse_add());
            case Tok::Ge: advance(); return make_binary(BinOp::Ge, e, parse_add());
            case Tok::KwIs: {
                advance();
                const bool negated = accept(Tok::KwNot);
                expect(Tok::KwNull, "'null' after 'is'");
                return make_unary(negated ? UnOp::IsNotNull : UnOp::IsNull, e);
            }
            default: return e;
        }
    }

    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        for (;;) {
            if (accept(Tok::Plus)) e = make_binary(BinOp::Add, e, parse_mul());
            else if (accept(Tok::Minus)) e = make_binary(BinOp::Sub, e, parse_mul());
            else return e;
        }
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_primary();
        for (;;) {
            if (accept(Tok::Star)) e = make_binary(BinOp::Mul, e, parse_primary());
            else if (accept(Tok::Slash)) e = make_binary(BinOp::Div, e, parse_primary());
            else return e;
        }
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Ident: {
                std::string name = advance().text;
                return std::make_shared<Expr>(Expr{ColumnRef{std::move(name)}});
            }
            case Tok::IntLit: {
                const std::int64_t v = advance().ival;
                return std::make_shared<Expr>(Expr{Literal{Value{v}}});
            }
            case Tok::FloatLit: {
                const double v = advance().fval;
                return std::make_shared<Expr>(Expr{Literal{Value{v}}});
            }
            case Tok::StrLit: {
                std::string v = advance().text;
                return std::make_shared<Expr>(Expr{Literal{Value{std::move(v)}}});
            }
            case Tok::KwTrue: advance(); return std::make_shared<Expr>(Expr{Literal{Value{true}}});
            case Tok::KwFalse: advance(); return std::make_shared<Expr>(Expr{Literal{Value{false}}});
            case Tok::KwNull: advance(); return std::make_shared<Expr>(Expr{Literal{Value{}}});
            case Tok::LParen: {
                advance();
                ExprPtr e = parse_or();
                expect(Tok::RParen, "')'");
                return e;
            }
            default: fail(t, "expected an operand");
        }
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

const char* bin_op_text(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::And: return "and";
        case BinOp::Or: return "or";
    }
    return "?";
}

bool numeric_or_null(StaticType t) {
    return t == StaticType::Int || t == StaticType::Float || t == StaticType::NullT;
}

bool bool_or_null(StaticType t) { return t == StaticType::Bool || t == StaticType::NullT; }

bool cmp_compatible(StaticType a, StaticType b, bool equality_op) {
    if (a == StaticType::NullT || b == StaticType::NullT) return true;
    if (numeric_or_null(a) && numeric_or_null(b)) return true;
    if (a == StaticType::Str && b == StaticType::Str) return true;
    if (equality_op && a == StaticType::Bool && b == StaticType::Bool) return true;
    return false;
}

void type_issue(std::vector<BindIssue>& issues, const std::string& message) {
    issues.push_back(BindIssue{BindIssue::Kind::TypeError, {}, message});
}

std::unique_ptr<BoundExpr> bind_node(const Expr& e, const Schema& schema,
                                     std::vector<BindIssue>& issues);

std::unique_ptr<BoundExpr> bind_binary(const BinaryExpr& b, const Schema& schema,
                                       std::vector<BindIssue>& issues) {
    auto lhs = bind_node(*b.lhs, schema, issues);
    auto rhs = bind_node(*b.rhs, schema, issues);
    const StaticType lt = lhs->type, rt = rhs->type;
    StaticType out = StaticType::NullT;
    switch (b.op) {
        case BinOp::Add:
        case BinOp::Sub:
        case BinOp::Mul:
            if (!numeric_or_null(lt) || !numeric_or_null(rt)) {
                type_issue(issues, std::string("operator '") + bin_op_text(b.op) +
                                       "' requires numeric operands, got " + to_string(lt) +
                                       " and " + to_string(rt));
            } else if (lt == StaticType::Float || rt == StaticType::Float) {
                out = StaticType::Float;
            } else if (lt == StaticType::Int || rt == StaticType::Int) {
                out = StaticType::Int;
            }
            break;
        case BinOp::Div:
            if (!numeric_or_null(lt) || !numeric_or_null(rt))
                type_issue(issues, std::string("operator '/' requires numeric operands, got ") +
                                       to_string(lt) + " and " + to_string(rt));
            out = StaticType::Float;
            break;
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: {
            const bool equality = b.op == BinOp::Eq || b.op == BinOp::Ne;
            if (!cmp_compatible(lt, rt, equality))
                type_issue(issues, std::string("operator '") + bin_op_text(b.op) +
                                       "' cannot compare " + to_string(lt) + " and " +
                                       to_string(rt));
            out = StaticType::Bool;
            break;
        }
        case BinOp::And:
        case BinOp::Or:
            if (!bool_or_null(lt) || !bool_or_null(rt))
                type_issue(issues, std::string("operator '") + bin_op_text(b.op) +
                                       "' requires bool operands, got " + to_string(lt) +
                                       " and " + to_string(rt));
            out = StaticType::Bool;
            break;
    }
    auto node = std::make_unique<BoundExpr>();
    node->kind = BoundExpr::Kind::Binary;
    node->type = out;
    node->bop = b.op;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
}

std::unique_ptr<BoundExpr> bind_node(const Expr& e, const Schema& schema,
                                     std::vector<BindIssue>& issues) {
    auto node = std::make_unique<BoundExpr>();
    if (const auto* ref = std::get_if<ColumnRef>(&e.node)) {
        node->kind = BoundExpr::Kind::Column;
        if (auto idx = schema.find(ref->name)) {
            node->col = *idx;
            switch (schema.at(*idx).type) {
                case ValueType::Bool: node->type = StaticType::Bool; break;
                case ValueType::Int: node->type = StaticType::Int; break;
                case ValueType::Float: node->type = StaticType::Float; break;
                case ValueType::Str: node->type = StaticType::Str; break;
            }
        } else {
            node->type = StaticType::NullT;
            issues.push_back(BindIssue{BindIssue::Kind::UnknownColumn, ref->name,
                                       "unknown column '" + ref->name + "'"});
        }
        return node;
    }
    if (const auto* lit = std::get_if<Literal>(&e.node)) {
        node->kind = BoundExpr::Kind::Literal;
        node->literal = lit->value;
        switch (lit->value.index()) {
            case 1: node->type = StaticType::Bool; break;
            case 2: node->type = StaticType::Int; break;
            case 3: node->type = StaticType::Float; break;
            case 4: node->type = StaticType::Str; break;
            default: node->type = StaticType::NullT; break;
        }
        return node;
    }
    if (const auto* bin = std::get_if<BinaryExpr>(&e.node))
        return bind_binary(*bin, schema, issues);

    const auto& un = std::get<UnaryExpr>(e.node);
    node->kind = BoundExpr::Kind::Unary;
    node->uop = un.op;
    node->lhs = bind_node(*un.operand, schema, issues);
    if (un.op == UnOp::Not && !bool_or_null(node->lhs->type))
        type_issue(issues, std::string("operator 'not' requires a bool operand, got ") +
                               to_string(node->lhs->type));
    node->type = StaticType::Bool;
    return node;
}

inline double as_double(const Value& v) {
    return v.index() == 2 ? static_cast<double>(std::get<std::int64_t>(v))
                          : std::get<double>(v);
}

inline bool truthy(const Value& v) { return v.index() == 1 && std::get<bool>(v); }

Value eval_arith(BinOp op, const Value& a, const Value& b) {
    if (is_null(a) || is_null(b)) return Value{};
    if (op == BinOp::Div) {
        const double y = as_double(b);
        if (y == 0.0) return Value{};
        return Value{as_double(a) / y};
    }
    if (a.index() == 2 && b.index() == 2) {
        const std::int64_t x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
        std::int64_t r = 0;
        bool overflow = false;
        switch (op) {
            case BinOp::Add: overflow = __builtin_add_overflow(x, y, &r); break;
            case BinOp::Sub: overflow = __builtin_sub_overflow(x, y, &r); break;
            default: overflow = __builtin_mul_overflow(x, y, &r); break;
        }
        return overflow ? Value{} : Value{r};
    }
    const double x = as_double(a), y = as_double(b);
    switch (op) {
        case BinOp::Add: return Value{x + y};
        case BinOp::Sub: return Value{x - y};
        default: return Value{x * y};
    }
}

Value eval_cmp(BinOp op, const Value& a, const Value& b) {
    if (is_null(a) || is_null(b)) return Value{false};
    bool r = false;
    if (a.index() == 4 && b.index() == 4) {
        const int c = std::get<std::string>(a).compare(std::get<std::string>(b));
        switch (op) {
            case BinOp::Eq: r = c == 0; break;
            case BinOp::Ne: r = c != 0; break;
            case BinOp::Lt: r = c < 0; break;
            case BinOp::Le: r = c <= 0; break;
            case BinOp::Gt: r = c > 0; break;
            default: r = c >= 0; break;
        }
        return Value{r};
    }
    if (a.index() == 1 && b.index() == 1) {
        const bool eq = std::get<bool>(a) == std::get<bool>(b);
        return Value{op == BinOp::Eq ? eq : !eq};
    }
    if (a.index() == 2 && b.index() == 2) {
        const std::int64_t x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
        switch (op) {
            case BinOp::Eq: r = x == y; break;
            case BinOp::Ne: r = x != y; break;
            case BinOp::Lt: r = x < y; break;
            case BinOp::Le: r = x <= y; break;
            case BinOp::Gt: r = x > y; break;
            default: r = x >= y; break;
        }
        return Value{r};
    }
    // Mixed int/float path; IEEE semantics make every NaN comparison false
    // except '!='.
    const double x = as_double(a), y = as_double(b);
    switch (op) {
        case BinOp::Eq: r = x == y; break;
        case BinOp::Ne: r = x != y; break;
        case BinOp::Lt: r = x < y; break;
        case BinOp::Le: r = x <= y; break;
        case BinOp::Gt: r = x > y; break;
        default: r = x >= y; break;
    }
    return Value{r};
}

} // namespace

ExprPtr parse_expr(std::string_view text) {
    Parser parser(lex(text));
    return parser.parse();
}

BindResult bind_expr(const Expr& expr, const Schema& schema) {
    BindResult result;
    auto bound = bind_node(expr, schema, result.issues);
    result.type = bound->type;
    if (result.issues.empty()) result.expr = std::move(bound);
    return result;
}

Value eval_expr(const BoundExpr& expr, std::span<const Value> row) {
    switch (expr.kind) {
        case BoundExpr::Kind::Column: return row[expr.col];
        case BoundExpr::Kind::Literal: return expr.literal;
        case BoundExpr::Kind::Binary:
            switch (expr.bop) {
                case BinOp::Add:
                case BinOp::Sub:
                case BinOp::Mul:
                case BinOp::Div:
                    return eval_arith(expr.bop, eval_expr(*expr.lhs, row),
                                      eval_expr(*expr.rhs, row));
                case BinOp::And:
                    if (!truthy(eval_expr(*expr.lhs, row))) return Value{false};
                    return Value{truthy(eval_expr(*expr.rhs, row))};
                case BinOp::Or:
                    if (truthy(eval_expr(*expr.lhs, row))) return Value{true};
                    return Value{truthy(eval_expr(*expr.rhs, row))};
                default:
                    return eval_cmp(expr.bop, eval_expr(*expr.lhs, row),
                                    eval_expr(*expr.rhs, row));
            }
        case BoundExpr::Kind::Unary: {
            const Value v = eval_expr(*expr.lhs, row);
            switch (expr.uop) {
                case UnOp::Not: return Value{!truthy(v)};
                case UnOp::IsNull: return Value{is_null(v)};
                case UnOp::IsNotNull: return Value{!is_null(v)};
            }
        }
    }
    return Value{};
}

} // namespace stepscope
