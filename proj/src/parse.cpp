#include "srflat/symexpr.hpp"

#include <cctype>
#include <ostream>
#include <sstream>

namespace srflat {

namespace {

class Parser {
public:
    Parser(const std::string& s, const Chart& c) : s_(s), chart_(c) {}

    Expr run() {
        Expr e = expr();
        skip();
        if (pos_ != s_.size()) throw ParseError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
        return e;
    }

private:
    const std::string& s_;
    const Chart& chart_;
    size_t pos_ = 0;

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    void expect(char c) {
        if (!peek(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    Expr expr() {
        std::vector<Expr> terms{term()};
        while (true) {
            if (peek('+')) {
                ++pos_;
                terms.push_back(term());
            } else if (peek('-')) {
                ++pos_;
                terms.push_back(Expr::product_node({Expr::number_node(-1), term()}));
            } else {
                break;
            }
        }
        return terms.size() == 1 ? terms[0] : Expr::sum_node(std::move(terms));
    }

    Expr term() {
        Expr acc = factor();
        std::vector<Expr> factors{acc};
        while (true) {
            if (peek('*')) {
                ++pos_;
                factors.push_back(factor());
            } else if (peek('/')) {
                ++pos_;
                Expr num = factors.size() == 1 ? factors[0] : Expr::product_node(factors);
                factors = {Expr::quotient_node(num, factor())};
            } else {
                break;
            }
        }
        return factors.size() == 1 ? factors[0] : Expr::product_node(std::move(factors));
    }

    Expr factor() {
        Expr b = base();
        if (peek('^')) {
            ++pos_;
            skip();
            bool neg = false;
            if (pos_ < s_.size() && s_[pos_] == '-') {
                neg = true;
                ++pos_;
            }
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                throw ParseError("expected integer exponent", pos_);
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ - start > 6) throw ParseError("exponent too large", start);
            int k = std::stoi(s_.substr(start, pos_ - start));
            return Expr::power_node(b, neg ? -k : k);
        }
        return b;
    }

    Expr base() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '-') {
            ++pos_;
            return Expr::product_node({Expr::number_node(-1), base()});
        }
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            return Expr::number_node(mpq_class(mpz_class(s_.substr(start, pos_ - start))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string id = s_.substr(start, pos_ - start);
            if (auto f = fn_from_name(id)) {
                expect('(');
                Expr arg = expr();
                expect(')');
                return Expr::function_node(*f, arg);
            }
            int idx = chart_.index_of(id);
            if (idx < 0) throw ParseError("unknown identifier '" + id + "'", start);
            return Expr::symbol_node(chart_.ids()[idx]);
        }
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
    }
};

void print_mono(std::ostream& os, const Mono& m, bool& first_factor) {
    for (size_t v = 0; v < m.size(); ++v) {
        if (!m[v]) continue;
        if (!first_factor) os << '*';
        first_factor = false;
        os << var_info(static_cast<int>(v)).name;
        if (m[v] != 1) os << '^' << m[v];
    }
}

int first_exponent(const Mono& m) {
    for (int e : m)
        if (e) return e;
    return 0;
}

std::string print_poly(const Poly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : p.terms()) {
        mpq_class c = t.c;
        bool neg = c < 0;
        if (neg) c = -c;
        if (first) {
            if (neg) os << '-';
        } else {
            os << (neg ? " - " : " + ");
        }
        bool first_factor = true;
        if (t.m.empty()) {
            os << to_string(c);
        } else {
            if (c != 1 || (first && neg && first_exponent(t.m) > 1)) {
                os << to_string(c);
                first_factor = false;
            }
            print_mono(os, t.m, first_factor);
        }
        first = false;
    }
    return os.str();
}

bool single_power(const Poly& p) {
    return p.is_monomial() && p.lead().c == 1 && p.vars().size() == 1;
}

std::string print_rat(const RatFunc& r) {
    if (r.den.is_const()) return print_poly(r.num);
    std::string n = print_poly(r.num);
    if (r.num.size() > 1) n = "(" + n + ")";
    std::string d = print_poly(r.den);
    if (!single_power(r.den)) d = "(" + d + ")";
    return n + "/" + d;
}

bool atomic_tree(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Symbol:
        case Expr::Kind::Function: return true;
        case Expr::Kind::Number: return e.node().value >= 0 && e.node().value.get_den() == 1;
        default: return false;
    }
}

std::string print_tree(const Expr& e) {
    const auto& n = e.node();
    switch (n.kind) {
        case Expr::Kind::Canonical: return print_rat(n.rat);
        case Expr::Kind::Number: return to_string(n.value);
        case Expr::Kind::Symbol: return var_info(n.var).name;
        case Expr::Kind::Sum: {
            std::string s;
            for (size_t i = 0; i < n.args.size(); ++i) {
                if (i) s += " + ";
                s += print_tree(n.args[i]);
            }
            return s;
        }
        case Expr::Kind::Product: {
            std::string s;
            for (size_t i = 0; i < n.args.size(); ++i) {
                if (i) s += "*";
                const Expr& a = n.args[i];
                s += atomic_tree(a) || a.kind() == Expr::Kind::Power ? print_tree(a) : "(" + print_tree(a) + ")";
            }
            return s;
        }
        case Expr::Kind::Quotient: {
            auto wrap = [](const Expr& a) { return atomic_tree(a) ? print_tree(a) : "(" + print_tree(a) + ")"; };
            return wrap(n.args[0]) + "/" + wrap(n.args[1]);
        }
        case Expr::Kind::Power: {
            const Expr& b = n.args[0];
            std::string bs = atomic_tree(b) ? print_tree(b) : "(" + print_tree(b) + ")";
            return bs + "^" + std::to_string(n.power);
        }
        case Expr::Kind::Function: return std::string(fn_name(n.fn)) + "(" + print_tree(n.args[0]) + ")";
    }
    return "?";
}

}  // namespace

Expr parse(const std::string& text, const Chart& c) { return Parser(text, c).run(); }

std::string to_string(const mpq_class& q) { return q.get_str(); }

std::string to_string(const Expr& e) { return print_tree(e); }

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace srflat
