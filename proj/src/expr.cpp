#include "lifs/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <vector>

namespace lifs {

namespace {

using Fn = std::function<double(double)>;

class Parser {
  public:
    explicit Parser(const std::string& text) : s_(text) {}

    Fn parse() {
        Fn e = sum();
        skip_ws();
        if (pos_ != s_.size()) throw Error("trailing input in expression at offset " +
                                           std::to_string(pos_));
        return e;
    }

  private:
    const std::string& s_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) throw Error(std::string("expected '") + c + "' in expression");
    }

    Fn sum() {
        Fn left = term();
        for (;;) {
            if (eat('+')) {
                Fn right = term();
                left = [left, right](double x) { return left(x) + right(x); };
            } else if (eat('-')) {
                Fn right = term();
                left = [left, right](double x) { return left(x) - right(x); };
            } else {
                return left;
            }
        }
    }

    Fn term() {
        Fn left = unary();
        for (;;) {
            if (eat('*')) {
                Fn right = unary();
                left = [left, right](double x) { return left(x) * right(x); };
            } else if (eat('/')) {
                Fn right = unary();
                left = [left, right](double x) { return left(x) / right(x); };
            } else {
                return left;
            }
        }
    }

    Fn unary() {
        if (eat('-')) {
            Fn inner = unary();
            return [inner](double x) { return -inner(x); };
        }
        eat('+');
        return power();
    }

    Fn power() {
        Fn base = atom();
        if (eat('^')) {
            Fn exponent = unary();  // right-associative, allows 2^-x
            return [base, exponent](double x) { return std::pow(base(x), exponent(x)); };
        }
        return base;
    }

    Fn atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw Error("unexpected end of expression");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Fn e = sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw Error(std::string("unexpected character '") + c + "' in expression");
    }

    Fn number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw Error("malformed number in expression");
        pos_ += static_cast<std::size_t>(end - begin);
        return [v](double) { return v; };
    }

    Fn identifier() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (name == "x") return [](double x) { return x; };
        if (name == "pow") {
            expect('(');
            Fn a = sum();
            expect(',');
            Fn b = sum();
            expect(')');
            return [a, b](double x) { return std::pow(a(x), b(x)); };
        }
        double (*fn)(double) = nullptr;
        if (name == "exp") fn = std::exp;
        else if (name == "sin") fn = std::sin;
        else if (name == "cos") fn = std::cos;
        else if (name == "sqrt") fn = std::sqrt;
        if (!fn) throw Error("unknown identifier '" + name + "' in expression");
        expect('(');
        Fn a = sum();
        expect(')');
        return [fn, a](double x) { return fn(a(x)); };
    }
};

}  // namespace

std::function<double(double)> parse_expression(const std::string& text) {
    return Parser(text).parse();
}

}  // namespace lifs
