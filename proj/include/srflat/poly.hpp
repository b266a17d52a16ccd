#pragma once

#include <gmpxx.h>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace srflat {

// Exponent vector indexed by variable id, trailing zeros trimmed.
using Mono = std::vector<int>;

int mono_degree(const Mono& m);
// Graded lexicographic; variable 0 is the largest variable.
int mono_cmp(const Mono& a, const Mono& b);
Mono mono_mul(const Mono& a, const Mono& b);
bool mono_divides(const Mono& a, const Mono& b);
Mono mono_div(const Mono& a, const Mono& b);
Mono mono_min(const Mono& a, const Mono& b);
inline int mono_exp(const Mono& m, int v) { return v < static_cast<int>(m.size()) ? m[v] : 0; }

struct Term {
    Mono m;
    mpq_class c;
};

// Sparse multivariate polynomial over Q, terms sorted in decreasing order.
class Poly {
public:
    Poly() = default;
    explicit Poly(const mpq_class& c);
    static Poly var(int id, int power = 1);
    static Poly from_terms(std::vector<Term> terms);

    const std::vector<Term>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_const() const { return t_.empty() || (t_.size() == 1 && t_[0].m.empty()); }
    mpq_class const_value() const { return t_.empty() ? mpq_class(0) : t_[0].c; }
    bool is_monomial() const { return t_.size() == 1; }
    const Term& lead() const { return t_.front(); }
    size_t size() const { return t_.size(); }
    int total_degree() const;
    int degree_in(int v) const;
    std::vector<int> vars() const;
    bool has_var(int v) const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const mpq_class& c);

    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly pow(int k) const;
    Poly mul_mono(const Mono& m, const mpq_class& c) const;
    Poly partial(int v) const;
    Poly monic() const;

    // Univariate view in variable v: coefficient of v^k at index k.
    std::vector<Poly> coeffs_in(int v) const;
    static Poly from_coeffs(const std::vector<Poly>& cs, int v);

    double eval(const std::function<double(int)>& value) const;
    mpq_class eval_exact(const std::function<mpq_class(int)>& value) const;
    // Sum of |term| at the point; magnitude envelope for tolerance scaling.
    double abs_envelope(const std::function<double(int)>& value) const;

private:
    std::vector<Term> t_;
};

Poly operator+(Poly a, const Poly& b);
Poly operator-(Poly a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(Poly a, const mpq_class& c);

// Exact quotient a/b when b divides a, otherwise nullopt.
std::optional<Poly> div_exact(const Poly& a, const Poly& b);
Poly div_exact_or_throw(const Poly& a, const Poly& b);
// Monic gcd over Q.
Poly gcd(const Poly& a, const Poly& b);
// Exact square root up to sign when a is a perfect square.
std::optional<Poly> poly_sqrt(const Poly& a);

}  // namespace srflat
