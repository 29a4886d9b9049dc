#pragma once

#include <adcons/expr.hpp>

#include <cctype>
#include <cstdlib>
#include <string>
#include <string_view>

namespace adcons {

// Text grammar:
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := ('-'|'+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | x | psi | pi | '(' expr ')'
//            | pow(expr, expr) | exp(expr) | log(expr) | sqrt(expr)
//            | mlf(lam, p, b; expr) | diff(expr, k)
// Exponents must fold to constants.
class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Expr parse()
    {
        Expr e = expr();
        skip();
        if (pos_ != s_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError("parse error at offset " + std::to_string(pos_) + ": " + msg);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    double constant_arg()
    {
        Expr e = expr();
        if (!e.is_constant())
            fail("expected a constant");
        return e.constant_value();
    }

    Expr expr()
    {
        Expr e = term();
        for (;;) {
            if (accept('+'))
                e = e + term();
            else if (accept('-'))
                e = e - term();
            else
                return e;
        }
    }

    Expr term()
    {
        Expr e = unary();
        for (;;) {
            if (accept('*'))
                e = e * unary();
            else if (accept('/'))
                e = e / unary();
            else
                return e;
        }
    }

    Expr unary()
    {
        if (accept('-'))
            return -unary();
        if (accept('+'))
            return unary();
        return power();
    }

    Expr power()
    {
        Expr b = primary();
        if (accept('^')) {
            Expr ex = unary();
            if (!ex.is_constant())
                fail("exponent must be constant");
            return pow(b, ex.constant_value());
        }
        return b;
    }

    std::string ident()
    {
        std::size_t st = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        return std::string(s_.substr(st, pos_ - st));
    }

    Expr primary()
    {
        skip();
        if (pos_ >= s_.size())
            fail("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.data() + pos_;
            std::string buf(begin, s_.size() - pos_);
            char* end = nullptr;
            double v = std::strtod(buf.c_str(), &end);
            if (end == buf.c_str())
                fail("bad number");
            pos_ += static_cast<std::size_t>(end - buf.c_str());
            return constant(v);
        }
        if (accept('(')) {
            Expr e = expr();
            expect(')');
            return e;
        }
        if (!std::isalpha(static_cast<unsigned char>(c)))
            fail(std::string("unexpected character '") + c + "'");
        std::string id = ident();
        if (id == "x" || id == "psi")
            return var();
        if (id == "pi")
            return constant(std::numbers::pi);
        expect('(');
        Expr r;
        if (id == "pow") {
            Expr b = expr();
            expect(',');
            double a = constant_arg();
            r = pow(b, a);
        }
        else if (id == "exp") {
            r = exp(expr());
        }
        else if (id == "log") {
            r = log(expr());
        }
        else if (id == "sqrt") {
            r = pow(expr(), 0.5);
        }
        else if (id == "mlf") {
            MLSpec sp;
            sp.lambda = constant_arg();
            expect(',');
            sp.p = constant_arg();
            expect(',');
            sp.b = constant_arg();
            expect(';');
            try {
                r = mlf(sp, expr());
            }
            catch (const DomainError& e) {
                fail(e.what());
            }
        }
        else if (id == "diff") {
            Expr u = expr();
            expect(',');
            double k = constant_arg();
            if (k < 0 || k != std::floor(k))
                fail("derivative order must be a non-negative integer");
            r = deriv(u, static_cast<int>(k));
        }
        else {
            fail("unknown function '" + id + "'");
        }
        expect(')');
        return r;
    }
};

inline Expr parse_expr(std::string_view s)
{
    return Parser(s).parse();
}

} // namespace adcons
