#include "prociter/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace prociter {

namespace {

struct Token {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind;
    std::string text;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, tok_.line, tok_.col);
    }

private:
    void advance() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++col_;
                ++pos_;
            } else {
                break;
            }
        }
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= text_.size()) {
            tok_ = {Token::Kind::End, "", line_, col_};
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_' || text_[pos_] == '\''))
                ++pos_;
            tok_ = {Token::Kind::Ident, text_.substr(start, pos_ - start), line_, col_};
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            tok_ = {Token::Kind::Number, text_.substr(start, pos_ - start), line_, col_};
        } else {
            tok_ = {Token::Kind::Punct, std::string(1, c), line_, col_};
            ++pos_;
        }
        col_ += int(tok_.text.size());
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

class SystemParser {
public:
    explicit SystemParser(const std::string& text) : lex_(text) {}

    EquationSystem run() {
        parse_headers();
        if (!sys_.is_action(kTau)) sys_.actions.insert(sys_.actions.begin(), kTau);
        parse_equations();
        resolve_vars();
        check_names();
        auto violations = validate(sys_);
        if (!violations.empty())
            throw ParseError(violations.front(), lex_.peek().line, lex_.peek().col);
        return sys_;
    }

private:
    void expect_punct(const std::string& p) {
        if (lex_.peek().kind != Token::Kind::Punct || lex_.peek().text != p)
            lex_.fail("expected '" + p + "'");
        lex_.next();
    }

    std::string expect_ident() {
        if (lex_.peek().kind != Token::Kind::Ident) lex_.fail("expected identifier");
        return lex_.next().text;
    }

    std::vector<std::string> ident_list() {
        std::vector<std::string> out;
        out.push_back(expect_ident());
        while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ",") {
            lex_.next();
            out.push_back(expect_ident());
        }
        expect_punct(";");
        return out;
    }

    void parse_headers() {
        for (;;) {
            const Token& t = lex_.peek();
            if (t.kind != Token::Kind::Ident) break;
            if (t.text == "effect") {
                lex_.next();
                std::string k = expect_ident();
                if (k == "set") sys_.effect = EffectKind::Set;
                else if (k == "subdist") sys_.effect = EffectKind::SubDist;
                else if (k == "maybe") sys_.effect = EffectKind::Maybe;
                else lex_.fail("unknown effect kind '" + k + "'");
                expect_punct(";");
            } else if (t.text == "actions") {
                lex_.next();
                for (auto& a : ident_list()) sys_.actions.push_back(std::move(a));
            } else if (t.text == "params") {
                lex_.next();
                for (auto& p : ident_list()) sys_.params.push_back(std::move(p));
            } else if (t.text == "vars") {
                lex_.next();
                declared_vars_ = ident_list();
            } else {
                break;  // first equation
            }
        }
    }

    void parse_equations() {
        while (lex_.peek().kind == Token::Kind::Ident) {
            Token name = lex_.next();
            expect_punct("=");
            TermPtr rhs = parse_term();
            expect_punct(";");
            if (equations_order_.count(name.text))
                throw ParseError("duplicate equation for '" + name.text + "'", name.line,
                                 name.col);
            equations_order_[name.text] = lhs_.size();
            lhs_.push_back(name.text);
            sys_.equations[name.text] = rhs;
        }
        if (lex_.peek().kind != Token::Kind::End) lex_.fail("expected equation or end of input");
        if (lhs_.empty()) lex_.fail("system has no equations");
    }

    TermPtr parse_term() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::Number) {
            if (t.text == "0") {
                lex_.next();
                return make_deadlock();
            }
            lex_.fail("unexpected number");
        }
        if (t.kind == Token::Kind::Ident) {
            Token name = lex_.next();
            if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ".") {
                lex_.next();
                return make_prefix(name.text, parse_term());
            }
            return make_leaf(name.text);
        }
        if (t.kind == Token::Kind::Punct && t.text == "{") {
            lex_.next();
            std::vector<TermBranch> branches;
            if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "}") {
                lex_.next();
                return make_choice({});
            }
            branches.push_back(parse_branch());
            while (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ",") {
                lex_.next();
                branches.push_back(parse_branch());
            }
            expect_punct("}");
            return make_choice(std::move(branches));
        }
        lex_.fail("expected term");
    }

    TermBranch parse_branch() {
        if (lex_.peek().kind == Token::Kind::Number) {
            Token num = lex_.next();
            // "0" alone is the deadlock term, "p/q:" or "p:" a weight.
            if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == "/") {
                lex_.next();
                if (lex_.peek().kind != Token::Kind::Number) lex_.fail("expected denominator");
                Token den = lex_.next();
                expect_punct(":");
                Rational w = Rational::parse(num.text + "/" + den.text);
                return {w, parse_term()};
            }
            if (lex_.peek().kind == Token::Kind::Punct && lex_.peek().text == ":") {
                lex_.next();
                return {Rational::parse(num.text), parse_term()};
            }
            if (num.text == "0") return {Rational(1), make_deadlock()};
            throw ParseError("unexpected number", num.line, num.col);
        }
        return {Rational(1), parse_term()};
    }

    void resolve_vars() {
        if (declared_vars_.empty()) {
            sys_.vars = lhs_;
            return;
        }
        sys_.vars = declared_vars_;
        for (const auto& v : declared_vars_)
            if (!equations_order_.count(v))
                lex_.fail("declared var '" + v + "' has no equation");
        for (const auto& v : lhs_)
            if (std::find(declared_vars_.begin(), declared_vars_.end(), v) ==
                declared_vars_.end())
                lex_.fail("equation for undeclared var '" + v + "'");
    }

    void check_names() {
        for (const auto& a : sys_.actions)
            if (sys_.is_param(a) || std::count(sys_.vars.begin(), sys_.vars.end(), a))
                lex_.fail("name '" + a + "' declared both as action and param/var");
    }

    Lexer lex_;
    EquationSystem sys_;
    std::vector<std::string> declared_vars_;
    std::vector<std::string> lhs_;
    std::map<std::string, size_t> equations_order_;
};

}  // namespace

EquationSystem parse_system(const std::string& text) { return SystemParser(text).run(); }

}  // namespace prociter
