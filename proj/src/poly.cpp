#include "srflat/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace srflat {

int mono_degree(const Mono& m) {
    int d = 0;
    for (int e : m) d += e;
    return d;
}

int mono_cmp(const Mono& a, const Mono& b) {
    int da = mono_degree(a), db = mono_degree(b);
    if (da != db) return da < db ? -1 : 1;
    size_t n = std::max(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        int ea = i < a.size() ? a[i] : 0;
        int eb = i < b.size() ? b[i] : 0;
        if (ea != eb) return ea < eb ? -1 : 1;
    }
    return 0;
}

static void trim(Mono& m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
}

Mono mono_mul(const Mono& a, const Mono& b) {
    Mono r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

bool mono_divides(const Mono& a, const Mono& b) {
    if (a.size() > b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

Mono mono_div(const Mono& a, const Mono& b) {
    Mono r = a;
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

Mono mono_min(const Mono& a, const Mono& b) {
    Mono r(std::min(a.size(), b.size()));
    for (size_t i = 0; i < r.size(); ++i) r[i] = std::min(a[i], b[i]);
    trim(r);
    return r;
}

static bool term_greater(const Term& a, const Term& b) { return mono_cmp(a.m, b.m) > 0; }

Poly::Poly(const mpq_class& c) {
    if (c != 0) t_.push_back({Mono{}, c});
}

Poly Poly::var(int id, int power) {
    Poly p;
    Mono m(id + 1, 0);
    m[id] = power;
    trim(m);
    p.t_.push_back({m, mpq_class(1)});
    return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
    for (auto& t : terms) trim(t.m);
    std::sort(terms.begin(), terms.end(), term_greater);
    Poly p;
    for (auto& t : terms) {
        if (!p.t_.empty() && mono_cmp(p.t_.back().m, t.m) == 0) {
            p.t_.back().c += t.c;
            if (p.t_.back().c == 0) p.t_.pop_back();
        } else if (t.c != 0) {
            p.t_.push_back(std::move(t));
        }
    }
    return p;
}

int Poly::total_degree() const { return t_.empty() ? -1 : mono_degree(t_.front().m); }

int Poly::degree_in(int v) const {
    int d = t_.empty() ? -1 : 0;
    for (const auto& t : t_) d = std::max(d, mono_exp(t.m, v));
    return d;
}

std::vector<int> Poly::vars() const {
    std::vector<int> present;
    for (const auto& t : t_)
        for (size_t i = 0; i < t.m.size(); ++i)
            if (t.m[i] && std::find(present.begin(), present.end(), static_cast<int>(i)) == present.end())
                present.push_back(static_cast<int>(i));
    std::sort(present.begin(), present.end());
    return present;
}

bool Poly::has_var(int v) const {
    for (const auto& t : t_)
        if (mono_exp(t.m, v)) return true;
    return false;
}

Poly Poly::operator-() const {
    Poly p = *this;
    for (auto& t : p.t_) t.c = -t.c;
    return p;
}

static std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, bool subtract) {
    std::vector<Term> r;
    r.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        int c = i == a.size() ? -1 : j == b.size() ? 1 : mono_cmp(a[i].m, b[j].m);
        if (c > 0) {
            r.push_back(a[i++]);
        } else if (c < 0) {
            r.push_back(b[j++]);
            if (subtract) r.back().c = -r.back().c;
        } else {
            mpq_class s = subtract ? mpq_class(a[i].c - b[j].c) : mpq_class(a[i].c + b[j].c);
            if (s != 0) r.push_back({a[i].m, s});
            ++i;
            ++j;
        }
    }
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    t_ = merge(t_, o.t_, false);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    t_ = merge(t_, o.t_, true);
    return *this;
}

Poly& Poly::operator*=(const mpq_class& c) {
    if (c == 0) {
        t_.clear();
        return *this;
    }
    for (auto& t : t_) t.c *= c;
    return *this;
}

bool Poly::operator==(const Poly& o) const {
    if (t_.size() != o.t_.size()) return false;
    for (size_t i = 0; i < t_.size(); ++i)
        if (t_[i].c != o.t_[i].c || mono_cmp(t_[i].m, o.t_[i].m) != 0) return false;
    return true;
}

Poly operator+(Poly a, const Poly& b) { return a += b; }
Poly operator-(Poly a, const Poly& b) { return a -= b; }
Poly operator*(Poly a, const mpq_class& c) { return a *= c; }

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    if (a.is_const()) return b * a.const_value();
    if (b.is_const()) return a * b.const_value();
    std::vector<Term> terms;
    terms.reserve(a.size() * b.size());
    for (const auto& x : a.terms())
        for (const auto& y : b.terms()) terms.push_back({mono_mul(x.m, y.m), x.c * y.c});
    return Poly::from_terms(std::move(terms));
}

Poly Poly::pow(int k) const {
    if (k < 0) throw std::invalid_argument("negative polynomial power");
    Poly r(mpq_class(1)), b = *this;
    while (k) {
        if (k & 1) r = r * b;
        k >>= 1;
        if (k) b = b * b;
    }
    return r;
}

Poly Poly::mul_mono(const Mono& m, const mpq_class& c) const {
    Poly p;
    if (c == 0) return p;
    p.t_.reserve(t_.size());
    for (const auto& t : t_) p.t_.push_back({mono_mul(t.m, m), t.c * c});
    for (auto& t : p.t_) trim(t.m);
    return p;
}

Poly Poly::partial(int v) const {
    std::vector<Term> terms;
    for (const auto& t : t_) {
        int e = mono_exp(t.m, v);
        if (!e) continue;
        Mono m = t.m;
        m[v] -= 1;
        terms.push_back({m, t.c * e});
    }
    return from_terms(std::move(terms));
}

Poly Poly::monic() const {
    if (t_.empty()) return *this;
    Poly p = *this;
    mpq_class inv = 1 / t_.front().c;
    return p *= inv;
}

std::vector<Poly> Poly::coeffs_in(int v) const {
    std::vector<std::vector<Term>> buckets(std::max(degree_in(v), 0) + 1);
    for (const auto& t : t_) {
        int e = mono_exp(t.m, v);
        Mono m = t.m;
        if (e) m[v] = 0;
        buckets[e].push_back({m, t.c});
    }
    std::vector<Poly> cs;
    for (auto& b : buckets) cs.push_back(from_terms(std::move(b)));
    return cs;
}

Poly Poly::from_coeffs(const std::vector<Poly>& cs, int v) {
    std::vector<Term> terms;
    for (size_t k = 0; k < cs.size(); ++k) {
        for (const auto& t : cs[k].terms()) {
            Mono m = t.m;
            if (k) {
                if (static_cast<int>(m.size()) <= v) m.resize(v + 1, 0);
                m[v] += static_cast<int>(k);
            }
            terms.push_back({m, t.c});
        }
    }
    return from_terms(std::move(terms));
}

double Poly::eval(const std::function<double(int)>& value) const {
    double s = 0;
    for (const auto& t : t_) {
        double x = t.c.get_d();
        for (size_t i = 0; i < t.m.size(); ++i)
            if (t.m[i]) x *= std::pow(value(static_cast<int>(i)), t.m[i]);
        s += x;
    }
    return s;
}

double Poly::abs_envelope(const std::function<double(int)>& value) const {
    double s = 0;
    for (const auto& t : t_) {
        double x = std::fabs(t.c.get_d());
        for (size_t i = 0; i < t.m.size(); ++i)
            if (t.m[i]) x *= std::pow(std::fabs(value(static_cast<int>(i))), t.m[i]);
        s += x;
    }
    return s;
}

mpq_class Poly::eval_exact(const std::function<mpq_class(int)>& value) const {
    mpq_class s = 0;
    for (const auto& t : t_) {
        mpq_class x = t.c;
        for (size_t i = 0; i < t.m.size(); ++i) {
            if (!t.m[i]) continue;
            mpq_class v = value(static_cast<int>(i)), p = 1;
            for (int k = 0; k < t.m[i]; ++k) p *= v;
            x *= p;
        }
        s += x;
    }
    return s;
}

std::optional<Poly> div_exact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    if (a.is_zero()) return Poly();
    if (b.is_const()) return a * mpq_class(1 / b.const_value());
    const Term& lb = b.lead();
    // Quick degree screen per variable.
    for (int v : b.vars())
        if (b.degree_in(v) > a.degree_in(v)) return std::nullopt;
    std::vector<Term> q;
    Poly r = a;
    mpq_class inv = 1 / lb.c;
    while (!r.is_zero()) {
        const Term& lr = r.lead();
        if (!mono_divides(lb.m, lr.m)) return std::nullopt;
        Mono m = mono_div(lr.m, lb.m);
        mpq_class c = lr.c * inv;
        q.push_back({m, c});
        r -= b.mul_mono(m, c);
    }
    return Poly::from_terms(std::move(q));
}

Poly div_exact_or_throw(const Poly& a, const Poly& b) {
    auto q = div_exact(a, b);
    if (!q) throw std::logic_error("inexact polynomial division");
    return *q;
}

namespace {

using UPoly = std::vector<Poly>;  // coefficients in the main variable

int udeg(const UPoly& p) {
    for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k)
        if (!p[k].is_zero()) return k;
    return -1;
}

void utrim(UPoly& p) { p.resize(udeg(p) + 1); }

UPoly prem(UPoly a, const UPoly& b) {
    int db = udeg(b);
    const Poly& lb = b[db];
    int e = udeg(a) - db + 1;
    while (udeg(a) >= db) {
        int da = udeg(a);
        Poly la = a[da];
        for (auto& c : a) c = c * lb;
        for (int k = 0; k <= db; ++k) a[k + da - db] -= la * b[k];
        utrim(a);
        --e;
    }
    if (e > 0) {
        Poly f = lb.pow(e);
        for (auto& c : a) c = c * f;
    }
    return a;
}

Poly content(const UPoly& p) {
    Poly g;
    for (const auto& c : p) {
        if (c.is_zero()) continue;
        g = gcd(g, c);
        if (g.is_const()) return Poly(mpq_class(1));
    }
    return g;
}

UPoly primitive(const UPoly& p, const Poly& cont) {
    UPoly r;
    for (const auto& c : p) r.push_back(div_exact_or_throw(c, cont));
    return r;
}

}  // namespace


// Modular images give a rigorous certificate that the gcd is trivial: if the true gcd had
// positive degree in v, its image under an evaluation that keeps lc_v of an argument
// nonzero would divide both images with that same degree.
namespace {

constexpr std::uint64_t kP = (1ULL << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(r & kP), hi = static_cast<std::uint64_t>(r >> 61);
    std::uint64_t s = lo + hi;
    return s >= kP ? s - kP : s;
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    return s >= kP ? s - kP : s;
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a);
        a = mulmod(a, a);
        e >>= 1;
    }
    return r;
}

std::uint64_t invmod(std::uint64_t a) { return powmod(a, kP - 2); }

std::optional<std::uint64_t> zmod(const mpz_class& z) {
    mpz_class r;
    mpz_class p(std::to_string(kP));
    mpz_mod(r.get_mpz_t(), z.get_mpz_t(), p.get_mpz_t());
    return static_cast<std::uint64_t>(r.get_ui());
}

std::optional<std::uint64_t> qmod(const mpq_class& q) {
    auto n = zmod(q.get_num());
    auto d = zmod(q.get_den());
    if (!*d) return std::nullopt;
    return mulmod(*n, invmod(*d));
}

using UMod = std::vector<std::uint64_t>;

void mtrim(UMod& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

std::optional<UMod> image(const Poly& p, int v, const std::vector<std::uint64_t>& vals) {
    UMod out(p.degree_in(v) + 1, 0);
    for (const auto& t : p.terms()) {
        auto c = qmod(t.c);
        if (!c) return std::nullopt;
        std::uint64_t x = *c;
        for (size_t i = 0; i < t.m.size(); ++i)
            if (t.m[i] && static_cast<int>(i) != v) x = mulmod(x, powmod(vals[i], t.m[i]));
        int e = mono_exp(t.m, v);
        out[e] = addmod(out[e], x);
    }
    return out;
}

int umod_gcd_degree(UMod a, UMod b) {
    mtrim(a);
    mtrim(b);
    while (!b.empty()) {
        // a mod b
        std::uint64_t inv = invmod(b.back());
        while (a.size() >= b.size() && !a.empty()) {
            std::uint64_t f = mulmod(a.back(), inv);
            size_t shift = a.size() - b.size();
            for (size_t i = 0; i < b.size(); ++i) a[i + shift] = addmod(a[i + shift], kP - mulmod(f, b[i]));
            mtrim(a);
        }
        std::swap(a, b);
    }
    return static_cast<int>(a.size()) - 1;
}

// Upper bound on deg_v gcd(a, b), or -1 if no admissible evaluation was found.
int gcd_degree_bound(const Poly& a, const Poly& b, int v) {
    thread_local std::mt19937_64 rng(0x5eed);
    size_t nv = 0;
    for (const Poly* p : {&a, &b})
        for (const auto& t : p->terms()) nv = std::max(nv, t.m.size());
    int da = a.degree_in(v), db = b.degree_in(v);
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::vector<std::uint64_t> vals(nv);
        for (auto& x : vals) x = rng() % kP;
        auto ia = image(a, v, vals), ib = image(b, v, vals);
        if (!ia || !ib) continue;
        mtrim(*ia);
        mtrim(*ib);
        if (static_cast<int>(ia->size()) - 1 != da || static_cast<int>(ib->size()) - 1 != db) continue;
        return umod_gcd_degree(*ia, *ib);
    }
    return -1;
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    if (a.is_const() || b.is_const()) return Poly(mpq_class(1));
    if (a.is_monomial() || b.is_monomial()) {
        const Poly& m = a.is_monomial() ? a : b;
        const Poly& o = a.is_monomial() ? b : a;
        Mono g = m.lead().m;
        for (const auto& t : o.terms()) {
            g = mono_min(g, t.m);
            if (g.empty()) break;
        }
        return Poly::from_terms({{g, mpq_class(1)}});
    }
    std::vector<int> va = a.vars(), vb = b.vars(), common;
    std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(common));
    if (common.empty()) return Poly(mpq_class(1));
    bool trivial = true;
    for (int w : common)
        if (gcd_degree_bound(a, b, w) != 0) {
            trivial = false;
            break;
        }
    if (trivial) return Poly(mpq_class(1));
    if (a.size() <= b.size()) {
        if (div_exact(b, a)) return a.monic();
    } else if (div_exact(a, b)) {
        return b.monic();
    }
    int v = common.front();
    UPoly A = a.coeffs_in(v), B = b.coeffs_in(v);
    // A variable present in only one argument can only enter through contents.
    Poly ca = content(A), cb = content(B);
    Poly c = gcd(ca, cb);
    A = primitive(A, ca);
    B = primitive(B, cb);
    if (udeg(A) < udeg(B)) std::swap(A, B);
    if (udeg(B) == 0) return c;
    Poly g(mpq_class(1)), h(mpq_class(1));
    while (true) {
        int d = udeg(A) - udeg(B);
        UPoly R = prem(A, B);
        if (udeg(R) < 0) break;
        if (udeg(R) == 0) return c;
        A = B;
        Poly div = g * h.pow(d);
        for (auto& r : R) r = div_exact_or_throw(r, div);
        B = R;
        g = A[udeg(A)];
        if (d == 0) {
        } else if (d == 1) {
            h = g;
        } else {
            h = div_exact_or_throw(g.pow(d), h.pow(d - 1));
        }
    }
    UPoly P = primitive(B, content(B));
    return (c * Poly::from_coeffs(P, v)).monic();
}

static std::optional<mpq_class> rat_sqrt(const mpq_class& q) {
    if (q < 0) return std::nullopt;
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) return std::nullopt;
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
    return mpq_class(n, d);
}

std::optional<Poly> poly_sqrt(const Poly& a) {
    if (a.is_zero()) return Poly();
    const Term& lt = a.lead();
    auto c = rat_sqrt(lt.c);
    if (!c) return std::nullopt;
    Mono m = lt.m;
    for (int& e : m) {
        if (e % 2) return std::nullopt;
        e /= 2;
    }
    int min_deg = mono_degree(a.terms().back().m);
    Poly s = Poly::from_terms({{m, *c}});
    Poly r = a - s * s;
    while (!r.is_zero()) {
        const Term& lr = r.lead();
        if (!mono_divides(m, lr.m)) return std::nullopt;
        Mono tm = mono_div(lr.m, m);
        if (2 * mono_degree(tm) < min_deg) return std::nullopt;
        mpq_class tc = lr.c / (2 * *c);
        Poly t = Poly::from_terms({{tm, tc}});
        r -= (s * t) * mpq_class(2) + t * t;
        s += t;
    }
    return s;
}

}  // namespace srflat
