#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace pdarcy {

/// Compiled arithmetic expression in the variables `x` and `z`.
///
/// Grammar: numbers, `x`, `z`, `pi`, `e`, binary `+ - * / ^`, unary minus,
/// parentheses and the functions sin, cos, tan, exp, log, sqrt, abs.
/// Copies share the compiled tree, so evaluation is thread-safe.
class Expression {
public:
    Expression();
    explicit Expression(std::string_view source);

    double operator()(double x, double z = 0.0) const;

    const std::string& source() const { return source_; }

    struct Node;

private:
    std::string source_;
    std::shared_ptr<const Node> root_;
};

}  // namespace pdarcy
