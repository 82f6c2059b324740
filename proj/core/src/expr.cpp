#include "kvge/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace kvge {

ParseError::ParseError(const std::string& message, std::size_t offset)
    : ExprError(message + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

UnknownIdentifierError::UnknownIdentifierError(std::string name, std::size_t offset)
    : ParseError("unknown identifier '" + name + "'", offset), name_(std::move(name)) {}

EvalError::EvalError(const std::string& message, std::string subexpression)
    : ExprError(message + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}

namespace {

enum class Kind { Number, Pi, Euler, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Sin, Cos, Tan, Exp, Ln, Sqrt, Abs, Min, Max, PowFn };

struct FuncInfo {
    std::string_view name;
    Func func;
    int arity;
};

constexpr std::array<FuncInfo, 10> kFunctions{{
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"tan", Func::Tan, 1},
    {"exp", Func::Exp, 1},
    {"ln", Func::Ln, 1},
    {"sqrt", Func::Sqrt, 1},
    {"abs", Func::Abs, 1},
    {"min", Func::Min, 2},
    {"max", Func::Max, 2},
    {"pow", Func::PowFn, 2},
}};

const FuncInfo* find_function(std::string_view name) {
    for (const auto& f : kFunctions) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

std::string_view function_name(Func f) {
    for (const auto& info : kFunctions) {
        if (info.func == f) return info.name;
    }
    return "?";
}

struct Node {
    Kind kind = Kind::Number;
    Func func = Func::Sin;
    double value = 0.0;
    int slot = -1;
    int lhs = -1;
    int rhs = -1;
};

}  // namespace

struct Expression::Tree {
    std::string source;
    std::vector<std::string> variables;
    std::vector<Node> nodes;
    std::vector<bool> used;
    int root = -1;

    double eval(int index, std::span<const double> values) const;
    std::string print(int index) const;
    bool same(int a, const Tree& other, int b) const;
};

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string_view text;
    double number = 0.0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Tok::End, start, {}};
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            return {Tok::Ident, start, src_.substr(start, pos_ - start)};
        }
        ++pos_;
        switch (c) {
            case '+': return {Tok::Plus, start, "+"};
            case '-': return {Tok::Minus, start, "-"};
            case '*': return {Tok::Star, start, "*"};
            case '/': return {Tok::Slash, start, "/"};
            case '^': return {Tok::Caret, start, "^"};
            case '(': return {Tok::LParen, start, "("};
            case ')': return {Tok::RParen, start, ")"};
            case ',': return {Tok::Comma, start, ","};
            default: break;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }

private:
    Token number(std::size_t start) {
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) throw ParseError("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                digits();
            }
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
            throw ParseError("number out of range '" + std::string(text) + "'", start);
        return {Tok::Number, start, text, value};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

constexpr int kAddBp = 10;
constexpr int kMulBp = 20;
constexpr int kNegBp = 25;
constexpr int kPowBp = 30;

class Parser {
public:
    Parser(std::string_view src, Expression::Tree& tree) : lexer_(src), tree_(tree) { advance(); }

    int parse_all() {
        const int root = expression(0);
        if (current_.kind != Tok::End)
            throw ParseError("unexpected '" + std::string(current_.text) + "'", current_.offset);
        return root;
    }

private:
    void advance() { current_ = lexer_.next(); }

    int add(Node n) {
        tree_.nodes.push_back(n);
        return static_cast<int>(tree_.nodes.size()) - 1;
    }

    static std::optional<std::pair<Kind, int>> infix(Tok t) {
        switch (t) {
            case Tok::Plus: return std::pair{Kind::Add, kAddBp};
            case Tok::Minus: return std::pair{Kind::Sub, kAddBp};
            case Tok::Star: return std::pair{Kind::Mul, kMulBp};
            case Tok::Slash: return std::pair{Kind::Div, kMulBp};
            case Tok::Caret: return std::pair{Kind::Pow, kPowBp};
            default: return std::nullopt;
        }
    }

    int expression(int min_bp) {
        int lhs = prefix();
        for (;;) {
            const auto op = infix(current_.kind);
            if (!op || op->second <= min_bp) break;
            advance();
            // ^ is right associative: its right operand may contain another ^.
            const int rbp = op->first == Kind::Pow ? op->second - 1 : op->second;
            const int rhs = expression(rbp);
            Node n;
            n.kind = op->first;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = add(n);
        }
        return lhs;
    }

    int prefix() {
        const Token tok = current_;
        switch (tok.kind) {
            case Tok::Number: {
                advance();
                Node n;
                n.kind = Kind::Number;
                n.value = tok.number;
                return add(n);
            }
            case Tok::Minus: {
                advance();
                Node n;
                n.kind = Kind::Neg;
                n.lhs = expression(kNegBp);
                return add(n);
            }
            case Tok::LParen: {
                advance();
                const int inner = expression(0);
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::Ident: return identifier(tok);
            case Tok::End: throw ParseError("unexpected end of input", tok.offset);
            default:
                throw ParseError("unexpected '" + std::string(tok.text) + "'", tok.offset);
        }
    }

    int identifier(const Token& tok) {
        advance();
        if (current_.kind == Tok::LParen) {
            const FuncInfo* info = find_function(tok.text);
            if (info == nullptr) throw UnknownIdentifierError(std::string(tok.text), tok.offset);
            advance();
            Node n;
            n.kind = Kind::Call;
            n.func = info->func;
            n.lhs = expression(0);
            if (info->arity == 2) {
                expect(Tok::Comma, "',' (" + std::string(info->name) + " takes two arguments)");
                n.rhs = expression(0);
            }
            expect(Tok::RParen, "')' (" + std::string(info->name) + " takes " +
                                    std::to_string(info->arity) + " argument" +
                                    (info->arity == 1 ? ")" : "s)"));
            return add(n);
        }
        Node n;
        if (tok.text == "pi") {
            n.kind = Kind::Pi;
            return add(n);
        }
        if (tok.text == "e") {
            n.kind = Kind::Euler;
            return add(n);
        }
        const auto& vars = tree_.variables;
        const auto it = std::find(vars.begin(), vars.end(), tok.text);
        if (it == vars.end()) {
            if (find_function(tok.text) != nullptr)
                throw ParseError("function '" + std::string(tok.text) + "' needs an argument list",
                                 tok.offset);
            throw UnknownIdentifierError(std::string(tok.text), tok.offset);
        }
        n.kind = Kind::Variable;
        n.slot = static_cast<int>(it - vars.begin());
        return add(n);
    }

    void expect(Tok kind, const std::string& what) {
        if (current_.kind != kind)
            throw ParseError("expected " + what, current_.offset);
        advance();
    }

    Lexer lexer_;
    Expression::Tree& tree_;
    Token current_{Tok::End, 0, {}};
};

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

char op_char(Kind k) {
    switch (k) {
        case Kind::Add: return '+';
        case Kind::Sub: return '-';
        case Kind::Mul: return '*';
        case Kind::Div: return '/';
        case Kind::Pow: return '^';
        default: return '?';
    }
}

double checked_pow(double base, double exponent, const Expression::Tree& tree, int index) {
    if (base == 0.0 && exponent < 0.0)
        throw EvalError("zero raised to a negative power", tree.print(index));
    if (base < 0.0 && exponent != std::trunc(exponent))
        throw EvalError("negative base with non-integer exponent", tree.print(index));
    return std::pow(base, exponent);
}

}  // namespace

double Expression::Tree::eval(int index, std::span<const double> values) const {
    const Node& n = nodes[static_cast<std::size_t>(index)];
    double r = 0.0;
    switch (n.kind) {
        case Kind::Number: return n.value;
        case Kind::Pi: return std::numbers::pi;
        case Kind::Euler: return std::numbers::e;
        case Kind::Variable: {
            const double v = values[static_cast<std::size_t>(n.slot)];
            if (std::isnan(v)) throw EvalError("unbound variable", variables[static_cast<std::size_t>(n.slot)]);
            return v;
        }
        case Kind::Neg: return -eval(n.lhs, values);
        case Kind::Add: r = eval(n.lhs, values) + eval(n.rhs, values); break;
        case Kind::Sub: r = eval(n.lhs, values) - eval(n.rhs, values); break;
        case Kind::Mul: r = eval(n.lhs, values) * eval(n.rhs, values); break;
        case Kind::Div: {
            const double num = eval(n.lhs, values);
            const double den = eval(n.rhs, values);
            if (den == 0.0) throw EvalError("division by zero", print(index));
            r = num / den;
            break;
        }
        case Kind::Pow: r = checked_pow(eval(n.lhs, values), eval(n.rhs, values), *this, index); break;
        case Kind::Call: {
            const double x = eval(n.lhs, values);
            switch (n.func) {
                case Func::Sin: r = std::sin(x); break;
                case Func::Cos: r = std::cos(x); break;
                case Func::Tan: r = std::tan(x); break;
                case Func::Exp: r = std::exp(x); break;
                case Func::Ln:
                    if (x <= 0.0) throw EvalError("logarithm of a non-positive number", print(index));
                    r = std::log(x);
                    break;
                case Func::Sqrt:
                    if (x < 0.0) throw EvalError("square root of a negative number", print(index));
                    r = std::sqrt(x);
                    break;
                case Func::Abs: r = std::abs(x); break;
                case Func::Min: r = std::min(x, eval(n.rhs, values)); break;
                case Func::Max: r = std::max(x, eval(n.rhs, values)); break;
                case Func::PowFn: r = checked_pow(x, eval(n.rhs, values), *this, index); break;
            }
            break;
        }
    }
    if (!std::isfinite(r)) throw EvalError("non-finite result", print(index));
    return r;
}

std::string Expression::Tree::print(int index) const {
    const Node& n = nodes[static_cast<std::size_t>(index)];
    switch (n.kind) {
        case Kind::Number: return format_number(n.value);
        case Kind::Pi: return "pi";
        case Kind::Euler: return "e";
        case Kind::Variable: return variables[static_cast<std::size_t>(n.slot)];
        case Kind::Neg: return "(-" + print(n.lhs) + ")";
        case Kind::Call: {
            std::string s(function_name(n.func));
            s += "(" + print(n.lhs);
            if (n.rhs >= 0) s += ", " + print(n.rhs);
            return s + ")";
        }
        default: return "(" + print(n.lhs) + " " + op_char(n.kind) + " " + print(n.rhs) + ")";
    }
}

bool Expression::Tree::same(int a, const Tree& other, int b) const {
    if ((a < 0) != (b < 0)) return false;
    if (a < 0) return true;
    const Node& x = nodes[static_cast<std::size_t>(a)];
    const Node& y = other.nodes[static_cast<std::size_t>(b)];
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case Kind::Number: return x.value == y.value;
        case Kind::Variable:
            return variables[static_cast<std::size_t>(x.slot)] ==
                   other.variables[static_cast<std::size_t>(y.slot)];
        case Kind::Call:
            if (x.func != y.func) return false;
            break;
        default: break;
    }
    return same(x.lhs, other, y.lhs) && same(x.rhs, other, y.rhs);
}

Expression Expression::parse(std::string_view source, std::vector<std::string> variables) {
    if (source.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw ParseError("empty expression", 0);
    auto tree = std::make_shared<Tree>();
    tree->source = std::string(source);
    tree->variables = std::move(variables);
    Parser parser(source, *tree);
    tree->root = parser.parse_all();
    tree->used.assign(tree->variables.size(), false);
    for (const Node& n : tree->nodes) {
        if (n.kind == Kind::Variable) tree->used[static_cast<std::size_t>(n.slot)] = true;
    }
    return Expression(std::move(tree));
}

double Expression::eval(std::span<const double> values) const {
    if (values.size() != tree_->variables.size())
        throw EvalError("expected " + std::to_string(tree_->variables.size()) + " bound values, got " +
                            std::to_string(values.size()),
                        tree_->source);
    return tree_->eval(tree_->root, values);
}

double Expression::eval(const std::map<std::string, double, std::less<>>& bindings) const {
    std::vector<double> values(tree_->variables.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto it = bindings.find(tree_->variables[i]);
        if (it != bindings.end()) {
            values[i] = it->second;
        } else if (tree_->used[i]) {
            throw EvalError("unbound variable", tree_->variables[i]);
        }
    }
    return tree_->eval(tree_->root, values);
}

double Expression::operator()(double x) const {
    std::array<double, 1> v{x};
    if (tree_->variables.empty()) return tree_->eval(tree_->root, {});
    if (tree_->variables.size() > 1) {
        for (std::size_t i = 1; i < tree_->variables.size(); ++i) {
            if (tree_->used[i]) throw EvalError("unbound variable", tree_->variables[i]);
        }
        std::vector<double> padded(tree_->variables.size(), std::numeric_limits<double>::quiet_NaN());
        padded[0] = x;
        return tree_->eval(tree_->root, padded);
    }
    return tree_->eval(tree_->root, v);
}

double Expression::operator()(double x, double y) const {
    std::array<double, 2> v{x, y};
    if (tree_->variables.size() != 2)
        throw EvalError("two-argument call on an expression with " +
                            std::to_string(tree_->variables.size()) + " variables",
                        tree_->source);
    return tree_->eval(tree_->root, v);
}

const std::string& Expression::source() const { return tree_->source; }

const std::vector<std::string>& Expression::variables() const { return tree_->variables; }

bool Expression::depends_on(std::string_view variable) const {
    for (std::size_t i = 0; i < tree_->variables.size(); ++i) {
        if (tree_->variables[i] == variable) return tree_->used[i];
    }
    return false;
}

bool Expression::is_constant() const {
    return std::none_of(tree_->used.begin(), tree_->used.end(), [](bool b) { return b; });
}

std::string Expression::to_string() const { return tree_->print(tree_->root); }

bool Expression::same_tree(const Expression& other) const {
    return tree_->same(tree_->root, *other.tree_, other.tree_->root);
}

}  // namespace kvge
