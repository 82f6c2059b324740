#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kvge {

/// Base class for everything the expression language can throw.
class ExprError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input. `offset()` is the 0-based character position of the
/// offending token in the source text.
class ParseError : public ExprError {
public:
    ParseError(const std::string& message, std::size_t offset);
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// An identifier that is neither a built-in constant, a function, nor one of
/// the variables the caller allowed.
class UnknownIdentifierError : public ParseError {
public:
    UnknownIdentifierError(std::string name, std::size_t offset);
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Evaluation failure: an unbound variable or a math-domain violation, i.e.
/// any subexpression with a non-finite value such as ln of a non-positive number.
class EvalError : public ExprError {
public:
    EvalError(const std::string& message, std::string subexpression);
    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

/// A parsed arithmetic expression over a fixed list of named variables.
///
/// Grammar (Pratt parser, lowest to highest binding power):
///
///     expr    := expr ('+' | '-') expr
///              | expr ('*' | '/') expr
///              | '-' expr
///              | expr '^' expr          (right associative)
///              | primary
///     primary := number | 'pi' | 'e' | variable
///              | func '(' expr [',' expr] ')' | '(' expr ')'
///     func    := sin cos tan exp ln sqrt abs min max pow
///
/// `^` binds tighter than unary minus, so `-2^2` is -4 and `2^-1` is 0.5.
/// There is no implicit multiplication: `3t` is a syntax error.
///
/// Expressions are immutable; copies share the parsed tree and evaluation is
/// safe from any number of threads.
class Expression {
public:
    /// Parse `source`, allowing only identifiers in `variables` besides the
    /// built-in constants and functions. The order of `variables` fixes the
    /// positional order used by `eval(std::span)`.
    static Expression parse(std::string_view source, std::vector<std::string> variables);

    /// Constant-only convenience (no variables allowed).
    static Expression constant(std::string_view source) { return parse(source, {}); }

    /// Evaluate with positional bindings, one value per entry of `variables()`.
    double eval(std::span<const double> values) const;

    /// Evaluate with named bindings. Every variable that occurs in the
    /// expression must be bound; extra bindings are ignored.
    double eval(const std::map<std::string, double, std::less<>>& bindings) const;

    double operator()(double x) const;
    double operator()(double x, double y) const;

    const std::string& source() const;
    const std::vector<std::string>& variables() const;

    /// True when the variable occurs anywhere in the tree.
    bool depends_on(std::string_view variable) const;

    /// True when the tree contains no variables at all.
    bool is_constant() const;

    /// Canonical text form. Every binary and unary node is parenthesized and
    /// numbers are printed in shortest round-trip form, so parsing the result
    /// yields a structurally identical tree.
    std::string to_string() const;

    /// Structural equality of the parsed trees (sources may differ).
    bool same_tree(const Expression& other) const;

    struct Tree;

private:
    explicit Expression(std::shared_ptr<const Tree> tree) : tree_(std::move(tree)) {}
    std::shared_ptr<const Tree> tree_;
};

}  // namespace kvge
