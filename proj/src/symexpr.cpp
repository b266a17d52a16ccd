#include "srflat/symexpr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <unordered_map>

namespace srflat {

const char* fn_name(Fn f) {
    switch (f) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Exp: return "exp";
        case Fn::Log: return "log";
        case Fn::Atan: return "atan";
        case Fn::Sqrt: return "sqrt";
    }
    return "?";
}

std::optional<Fn> fn_from_name(const std::string& s) {
    static const std::pair<const char*, Fn> table[] = {{"sin", Fn::Sin},   {"cos", Fn::Cos},
                                                       {"exp", Fn::Exp},   {"log", Fn::Log},
                                                       {"atan", Fn::Atan}, {"sqrt", Fn::Sqrt}};
    for (const auto& [n, f] : table)
        if (s == n) return f;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Variable table: coordinates and transcendental atoms share one id space.

namespace {

struct VarTable {
    std::mutex mu;
    std::deque<VarInfo> vars;
    std::unordered_map<std::string, int> by_name;
    std::map<std::pair<int, int>, std::shared_ptr<const RatFunc>> dcache;
};

VarTable& table() {
    static VarTable t;
    return t;
}

}  // namespace

int coordinate_var(const std::string& name) {
    auto& t = table();
    std::lock_guard lk(t.mu);
    auto it = t.by_name.find(name);
    if (it != t.by_name.end()) return it->second;
    int id = static_cast<int>(t.vars.size());
    VarInfo vi;
    vi.name = name;
    vi.coord_deps = {id};
    t.vars.push_back(std::move(vi));
    t.by_name.emplace(name, id);
    return id;
}

const VarInfo& var_info(int id) {
    auto& t = table();
    std::lock_guard lk(t.mu);
    return t.vars.at(id);
}

static std::vector<int> deps_of(const RatFunc& r) {
    std::vector<int> deps;
    auto add = [&](const Poly& p) {
        for (int v : p.vars())
            for (int d : var_info(v).coord_deps)
                if (std::find(deps.begin(), deps.end(), d) == deps.end()) deps.push_back(d);
    };
    add(r.num);
    add(r.den);
    std::sort(deps.begin(), deps.end());
    return deps;
}

static int atom_var(Fn f, const RatFunc& arg) {
    std::string key = std::string(fn_name(f)) + "(" + to_string(Expr(arg)) + ")";
    auto deps = deps_of(arg);
    auto& t = table();
    std::lock_guard lk(t.mu);
    auto it = t.by_name.find(key);
    if (it != t.by_name.end()) return it->second;
    int id = static_cast<int>(t.vars.size());
    VarInfo vi;
    vi.name = key;
    vi.is_atom = true;
    vi.fn = f;
    vi.arg = std::make_shared<const RatFunc>(arg);
    vi.coord_deps = std::move(deps);
    t.vars.push_back(std::move(vi));
    t.by_name.emplace(key, id);
    return id;
}

// ---------------------------------------------------------------------------
// Rational function arithmetic.

namespace {

bool is_sqrt_atom(int v) {
    const VarInfo& vi = var_info(v);
    return vi.is_atom && vi.fn == Fn::Sqrt;
}

// Rewrites sqrt(u)^k as u^(k/2) sqrt(u)^(k mod 2). Returns true if anything changed.
bool reduce_radicals(Poly& n, Poly& d) {
    bool changed = false;
    while (true) {
        int target = -1;
        for (const Poly* p : {&n, &d})
            for (int v : p->vars())
                if (target < 0 && p->degree_in(v) >= 2 && is_sqrt_atom(v)) target = v;
        if (target < 0) return changed;
        changed = true;
        const RatFunc& u = *var_info(target).arg;
        auto sub = [&](const Poly& p, int& K) {
            auto cs = p.coeffs_in(target);
            K = (static_cast<int>(cs.size()) - 1) / 2;
            Poly r;
            for (size_t k = 0; k < cs.size(); ++k) {
                if (cs[k].is_zero()) continue;
                int h = static_cast<int>(k) / 2;
                Poly term = cs[k] * u.num.pow(h) * u.den.pow(K - h);
                if (k % 2) term = term * Poly::var(target);
                r += term;
            }
            return r;
        };
        int Kn = 0, Kd = 0;
        Poly n2 = sub(n, Kn), d2 = sub(d, Kd);
        if (Kd >= Kn) {
            n = n2 * u.den.pow(Kd - Kn);
            d = d2;
        } else {
            n = n2;
            d = d2 * u.den.pow(Kn - Kd);
        }
    }
}

RatFunc make_rat(Poly n, Poly d, bool coprime = false) {
    if (d.is_zero()) throw DomainError("division by zero");
    if (n.is_zero()) return RatFunc{};
    if (reduce_radicals(n, d)) coprime = false;
    if (d.is_zero()) throw DomainError("division by zero");
    if (n.is_zero()) return RatFunc{};
    if (!coprime && !d.is_const()) {
        Poly g = gcd(n, d);
        if (!g.is_const()) {
            n = div_exact_or_throw(n, g);
            d = div_exact_or_throw(d, g);
        }
    }
    mpq_class lc = d.lead().c;
    if (lc != 1) {
        mpq_class inv = 1 / lc;
        n *= inv;
        d *= inv;
    }
    return RatFunc{std::move(n), std::move(d)};
}

RatFunc rconst(const mpq_class& c) { return RatFunc{Poly(c), Poly(mpq_class(1))}; }

RatFunc radd(const RatFunc& a, const RatFunc& b, bool sub = false) {
    if (b.is_zero()) return a;
    if (a.is_zero()) {
        if (!sub) return b;
        return RatFunc{-b.num, b.den};
    }
    Poly bn = sub ? -b.num : b.num;
    if (a.den == b.den) return make_rat(a.num + bn, a.den);
    if (a.den.is_const()) return make_rat(a.num * b.den + bn, b.den);
    if (b.den.is_const()) return make_rat(a.num + bn * a.den, a.den);
    Poly g = gcd(a.den, b.den);
    Poly ag = div_exact_or_throw(a.den, g), bg = div_exact_or_throw(b.den, g);
    return make_rat(a.num * bg + bn * ag, ag * b.den);
}

RatFunc rmul(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero() || b.is_zero()) return RatFunc{};
    if (a.is_const()) return make_rat(b.num * a.const_value(), b.den, true);
    if (b.is_const()) return make_rat(a.num * b.const_value(), a.den, true);
    Poly g1 = gcd(a.num, b.den), g2 = gcd(b.num, a.den);
    Poly an = div_exact_or_throw(a.num, g1), bd = div_exact_or_throw(b.den, g1);
    Poly bn = div_exact_or_throw(b.num, g2), ad = div_exact_or_throw(a.den, g2);
    return make_rat(an * bn, ad * bd, true);
}

RatFunc rinv(const RatFunc& a) {
    if (a.is_zero()) throw DomainError("division by zero");
    return make_rat(a.den, a.num, true);
}

RatFunc rdiv(const RatFunc& a, const RatFunc& b) { return rmul(a, rinv(b)); }

RatFunc rpow(const RatFunc& a, int k) {
    if (k == 0) return rconst(1);
    if (k < 0) return rpow(rinv(a), -k);
    return make_rat(a.num.pow(k), a.den.pow(k), true);
}

RatFunc rvar(int v) { return RatFunc{Poly::var(v), Poly(mpq_class(1))}; }

}  // namespace

// ---------------------------------------------------------------------------
// Expr construction.

static std::shared_ptr<const Expr::Node> canon_node(RatFunc r) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = Expr::Kind::Canonical;
    n->rat = std::move(r);
    return n;
}

Expr::Expr() : n_(canon_node(RatFunc{})) {}
Expr::Expr(long v) : n_(canon_node(rconst(mpq_class(v)))) {}
Expr::Expr(const mpq_class& v) : n_(canon_node(rconst(v))) {}
Expr::Expr(RatFunc r) : n_(canon_node(std::move(r))) {}

Expr Expr::var(int id) { return Expr(rvar(id)); }

Expr Expr::number_node(const mpq_class& v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->value = v;
    return Expr(std::shared_ptr<const Node>(n));
}

Expr Expr::symbol_node(int var) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Symbol;
    n->var = var;
    return Expr(std::shared_ptr<const Node>(n));
}

Expr Expr::sum_node(std::vector<Expr> terms) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sum;
    n->args = std::move(terms);
    return Expr(std::shared_ptr<const Node>(n));
}

Expr Expr::product_node(std::vector<Expr> factors) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Product;
    n->args = std::move(factors);
    return Expr(std::shared_ptr<const Node>(n));
}

Expr Expr::quotient_node(Expr a, Expr b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Quotient;
    n->args = {std::move(a), std::move(b)};
    return Expr(std::shared_ptr<const Node>(n));
}

Expr Expr::power_node(Expr base, int k) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Power;
    n->args = {std::move(base)};
    n->power = k;
    return Expr(std::shared_ptr<const Node>(n));
}

Expr Expr::function_node(Fn f, Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Function;
    n->fn = f;
    n->args = {std::move(arg)};
    return Expr(std::shared_ptr<const Node>(n));
}

Expr::Kind Expr::kind() const { return n_->kind; }

RatFunc Expr::rat() const {
    const Node& n = *n_;
    switch (n.kind) {
        case Kind::Canonical: return n.rat;
        case Kind::Number: return rconst(n.value);
        case Kind::Symbol: return rvar(n.var);
        case Kind::Sum: {
            RatFunc r;
            for (const auto& a : n.args) r = radd(r, a.rat());
            return r;
        }
        case Kind::Product: {
            RatFunc r = rconst(1);
            for (const auto& a : n.args) r = rmul(r, a.rat());
            return r;
        }
        case Kind::Quotient: return rdiv(n.args[0].rat(), n.args[1].rat());
        case Kind::Power: return rpow(n.args[0].rat(), n.power);
        case Kind::Function: return apply(n.fn, n.args[0]).rat();
    }
    return RatFunc{};
}

bool Expr::is_zero() const { return rat().is_zero(); }

bool Expr::is_const() const {
    RatFunc r = rat();
    for (const Poly* p : {&r.num, &r.den})
        for (int v : p->vars())
            if (!var_info(v).coord_deps.empty()) return false;
    return true;
}

std::optional<mpq_class> Expr::rational_value() const {
    RatFunc r = rat();
    if (!r.is_const()) return std::nullopt;
    return r.const_value();
}

bool Expr::has_atoms() const {
    RatFunc r = rat();
    for (const Poly* p : {&r.num, &r.den})
        for (int v : p->vars())
            if (var_info(v).is_atom) return true;
    return false;
}

size_t Expr::complexity() const {
    RatFunc r = rat();
    return r.num.size() + r.den.size();
}

Expr simplify(const Expr& e) {
    if (e.is_canonical()) return e;
    return Expr(e.rat());
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(radd(a.rat(), b.rat())); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(radd(a.rat(), b.rat(), true)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(rmul(a.rat(), b.rat())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(rdiv(a.rat(), b.rat())); }
Expr operator-(const Expr& a) {
    RatFunc r = a.rat();
    return Expr(RatFunc{-r.num, r.den});
}
Expr pow(const Expr& a, int k) { return Expr(rpow(a.rat(), k)); }

bool operator==(const Expr& a, const Expr& b) { return a.rat() == b.rat(); }

static std::optional<mpq_class> exact_rat_sqrt(const mpq_class& q) {
    if (q < 0) return std::nullopt;
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) return std::nullopt;
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
    return mpq_class(n, d);
}

Expr apply(Fn f, const Expr& a) {
    RatFunc r = a.rat();
    if (r.is_const()) {
        mpq_class q = r.const_value();
        switch (f) {
            case Fn::Sin:
            case Fn::Atan:
                if (q == 0) return Expr(0L);
                break;
            case Fn::Cos:
            case Fn::Exp:
                if (q == 0) return Expr(1L);
                break;
            case Fn::Log:
                if (q <= 0) throw DomainError("log of non-positive constant");
                if (q == 1) return Expr(0L);
                break;
            case Fn::Sqrt: {
                if (q < 0) throw DomainError("sqrt of negative constant");
                if (auto s = exact_rat_sqrt(q)) return Expr(*s);
                break;
            }
        }
    }
    if (r.den.is_const() && r.den.const_value() == 1 && r.num.is_monomial() && r.num.lead().c == 1 &&
        mono_degree(r.num.lead().m) == 1) {
        int v = r.num.vars().front();
        const VarInfo& vi = var_info(v);
        if (vi.is_atom && ((f == Fn::Log && vi.fn == Fn::Exp) || (f == Fn::Exp && vi.fn == Fn::Log)))
            return Expr(*vi.arg);
    }
    return Expr::var(atom_var(f, r));
}

Expr sin(const Expr& a) { return apply(Fn::Sin, a); }
Expr cos(const Expr& a) { return apply(Fn::Cos, a); }
Expr exp(const Expr& a) { return apply(Fn::Exp, a); }
Expr log(const Expr& a) { return apply(Fn::Log, a); }
Expr atan(const Expr& a) { return apply(Fn::Atan, a); }
Expr sqrt(const Expr& a) { return apply(Fn::Sqrt, a); }

// ---------------------------------------------------------------------------
// Differentiation.

static RatFunc rdiff(const RatFunc& r, int v);

static RatFunc atom_derivative(int w, int v) {
    auto& t = table();
    {
        std::lock_guard lk(t.mu);
        auto it = t.dcache.find({w, v});
        if (it != t.dcache.end()) return *it->second;
    }
    const VarInfo& vi = var_info(w);
    const RatFunc& u = *vi.arg;
    RatFunc du = rdiff(u, v);
    RatFunc out;
    if (!du.is_zero()) {
        RatFunc factor;
        switch (vi.fn) {
            case Fn::Sin: factor = cos(Expr(u)).rat(); break;
            case Fn::Cos: factor = (-sin(Expr(u))).rat(); break;
            case Fn::Exp: factor = rvar(w); break;
            case Fn::Log: factor = rinv(u); break;
            case Fn::Atan: factor = rinv(radd(rconst(1), rmul(u, u))); break;
            case Fn::Sqrt: factor = rdiv(rvar(w), rmul(rconst(2), u)); break;
        }
        out = rmul(factor, du);
    }
    std::lock_guard lk(t.mu);
    t.dcache.emplace(std::make_pair(w, v), std::make_shared<const RatFunc>(out));
    return out;
}

static RatFunc poly_diff(const Poly& p, int v) {
    RatFunc out{p.partial(v), Poly(mpq_class(1))};
    for (int w : p.vars()) {
        if (w == v) continue;
        const VarInfo& vi = var_info(w);
        if (!vi.is_atom) continue;
        if (std::find(vi.coord_deps.begin(), vi.coord_deps.end(), v) == vi.coord_deps.end()) continue;
        RatFunc dw = atom_derivative(w, v);
        if (dw.is_zero()) continue;
        out = radd(out, rmul(RatFunc{p.partial(w), Poly(mpq_class(1))}, dw));
    }
    return out;
}

static RatFunc rdiff(const RatFunc& r, int v) {
    RatFunc dn = poly_diff(r.num, v);
    if (r.den.is_const()) return rmul(dn, rinv(RatFunc{r.den, Poly(mpq_class(1))}));
    RatFunc dd = poly_diff(r.den, v);
    if (dd.is_zero()) return rdiv(dn, RatFunc{r.den, Poly(mpq_class(1))});
    RatFunc top = radd(dn, rmul(r, dd), true);
    return rdiv(top, RatFunc{r.den, Poly(mpq_class(1))});
}

Expr diff(const Expr& e, int var) { return Expr(rdiff(e.rat(), var)); }

// ---------------------------------------------------------------------------
// Charts.

Chart::Chart(std::vector<std::string> names, std::vector<std::string> constraints) : names_(std::move(names)) {
    for (size_t i = 0; i < names_.size(); ++i) {
        const auto& n = names_[i];
        if (n.empty() || !(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_'))
            throw std::invalid_argument("bad coordinate name '" + n + "'");
        for (char ch : n)
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'))
                throw std::invalid_argument("bad coordinate name '" + n + "'");
        if (fn_from_name(n)) throw std::invalid_argument("coordinate name '" + n + "' is a function name");
        for (size_t j = 0; j < i; ++j)
            if (names_[j] == n) throw std::invalid_argument("duplicate coordinate '" + n + "'");
        ids_.push_back(coordinate_var(n));
    }
    for (const auto& c : constraints) constraints_.push_back(simplify(parse(c, *this)));
}

int Chart::index_of(int var) const {
    for (size_t i = 0; i < ids_.size(); ++i)
        if (ids_[i] == var) return static_cast<int>(i);
    return -1;
}

int Chart::index_of(const std::string& name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return -1;
}

// ---------------------------------------------------------------------------
// Evaluation.

namespace {

struct DoubleEval {
    const Chart& chart;
    const std::vector<double>& pt;
    std::unordered_map<int, double> cache;

    double var(int id) {
        int idx = chart.index_of(id);
        if (idx >= 0) return pt.at(idx);
        auto it = cache.find(id);
        if (it != cache.end()) return it->second;
        const VarInfo& vi = var_info(id);
        if (!vi.is_atom) throw std::invalid_argument("coordinate '" + vi.name + "' not in chart");
        double v = func(vi.fn, rat(*vi.arg));
        cache.emplace(id, v);
        return v;
    }

    static double func(Fn f, double a) {
        switch (f) {
            case Fn::Sin: return std::sin(a);
            case Fn::Cos: return std::cos(a);
            case Fn::Exp: return std::exp(a);
            case Fn::Log:
                if (!(a > 0)) throw DomainError("log of non-positive value");
                return std::log(a);
            case Fn::Atan: return std::atan(a);
            case Fn::Sqrt:
                if (a < 0) throw DomainError("sqrt of negative value");
                return std::sqrt(a);
        }
        return 0;
    }

    double rat(const RatFunc& r) {
        auto value = [this](int v) { return var(v); };
        double d = r.den.eval(value);
        if (d == 0) throw DomainError("division by zero");
        double v = r.num.eval(value) / d;
        if (!std::isfinite(v)) throw DomainError("non-finite value");
        return v;
    }

    double envelope(const RatFunc& r) {
        auto value = [this](int v) { return var(v); };
        double d = r.den.eval(value);
        if (d == 0) throw DomainError("division by zero");
        return r.num.abs_envelope(value) / std::fabs(d);
    }

    double tree(const Expr& e) {
        const auto& n = e.node();
        switch (n.kind) {
            case Expr::Kind::Canonical: return rat(n.rat);
            case Expr::Kind::Number: return n.value.get_d();
            case Expr::Kind::Symbol: return var(n.var);
            case Expr::Kind::Sum: {
                double s = 0;
                for (const auto& a : n.args) s += tree(a);
                return s;
            }
            case Expr::Kind::Product: {
                double s = 1;
                for (const auto& a : n.args) s *= tree(a);
                return s;
            }
            case Expr::Kind::Quotient: {
                double d = tree(n.args[1]);
                if (d == 0) throw DomainError("division by zero");
                return tree(n.args[0]) / d;
            }
            case Expr::Kind::Power: {
                double b = tree(n.args[0]);
                if (b == 0 && n.power < 0) throw DomainError("division by zero");
                return std::pow(b, n.power);
            }
            case Expr::Kind::Function: return func(n.fn, tree(n.args[0]));
        }
        return 0;
    }
};

}  // namespace

double eval(const Expr& e, const Chart& c, const std::vector<double>& point) {
    if (point.size() != c.dim()) throw std::invalid_argument("point dimension mismatch");
    DoubleEval ev{c, point, {}};
    double v = ev.tree(e);
    if (!std::isfinite(v)) throw DomainError("non-finite value");
    return v;
}

std::vector<double> to_double(const std::vector<mpq_class>& p) {
    std::vector<double> r;
    r.reserve(p.size());
    for (const auto& q : p) r.push_back(q.get_d());
    return r;
}

double eval(const Expr& e, const Chart& c, const std::vector<mpq_class>& point) {
    return eval(e, c, to_double(point));
}

double eval_envelope(const Expr& e, const Chart& c, const std::vector<double>& point) {
    DoubleEval ev{c, point, {}};
    return ev.envelope(e.rat());
}

std::optional<mpq_class> eval_exact(const Expr& e, const Chart& c, const std::vector<mpq_class>& point) {
    if (point.size() != c.dim()) throw std::invalid_argument("point dimension mismatch");
    RatFunc r = e.rat();
    for (const Poly* p : {&r.num, &r.den})
        for (int v : p->vars())
            if (c.index_of(v) < 0) {
                if (var_info(v).is_atom) return std::nullopt;
                throw std::invalid_argument("coordinate '" + var_info(v).name + "' not in chart");
            }
    auto value = [&](int v) { return point[c.index_of(v)]; };
    mpq_class d = r.den.eval_exact(value);
    if (d == 0) throw DomainError("division by zero");
    return r.num.eval_exact(value) / d;
}

bool in_domain(const Chart& c, const std::vector<mpq_class>& point) {
    try {
        for (const auto& k : c.constraints()) {
            if (auto q = eval_exact(k, c, point)) {
                if (*q <= 0) return false;
            } else if (!(eval(k, c, point) > 0)) {
                return false;
            }
        }
    } catch (const DomainError&) {
        return false;
    }
    return true;
}

}  // namespace srflat
