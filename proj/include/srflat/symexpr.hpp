#pragma once

#include "srflat/poly.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srflat {

enum class Fn { Sin, Cos, Exp, Log, Atan, Sqrt };

const char* fn_name(Fn f);
std::optional<Fn> fn_from_name(const std::string& s);

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
    size_t position;
};

struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// num/den with den monic and gcd(num, den) = 1.
struct RatFunc {
    Poly num{mpq_class(0)};
    Poly den{mpq_class(1)};

    bool is_zero() const { return num.is_zero(); }
    bool is_const() const { return num.is_const() && den.is_const(); }
    mpq_class const_value() const { return num.const_value() / den.const_value(); }
    bool operator==(const RatFunc& o) const { return num == o.num && den == o.den; }
};

class Expr;

struct VarInfo {
    std::string name;
    bool is_atom = false;
    Fn fn = Fn::Sin;
    std::shared_ptr<const RatFunc> arg;
    std::vector<int> coord_deps;  // coordinate ids this variable depends on
};

int coordinate_var(const std::string& name);
const VarInfo& var_info(int id);

class Expr {
public:
    enum class Kind { Number, Symbol, Sum, Product, Quotient, Power, Function, Canonical };
    struct Node;

    Expr();
    Expr(long v);
    Expr(const mpq_class& v);
    explicit Expr(RatFunc r);

    static Expr number_node(const mpq_class& v);
    static Expr symbol_node(int var);
    static Expr sum_node(std::vector<Expr> terms);
    static Expr product_node(std::vector<Expr> factors);
    static Expr quotient_node(Expr a, Expr b);
    static Expr power_node(Expr base, int k);
    static Expr function_node(Fn f, Expr arg);
    static Expr var(int id);

    Kind kind() const;
    const Node& node() const { return *n_; }
    bool is_canonical() const { return kind() == Kind::Canonical; }
    // Canonical rational form; computed on the fly for tree nodes.
    RatFunc rat() const;

    bool is_zero() const;
    bool is_const() const;  // no coordinate dependence
    std::optional<mpq_class> rational_value() const;
    bool has_atoms() const;
    size_t complexity() const;

private:
    std::shared_ptr<const Node> n_;
    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
};

struct Expr::Node {
    Kind kind = Kind::Canonical;
    mpq_class value;
    int var = -1;
    int power = 0;
    Fn fn = Fn::Sin;
    std::vector<Expr> args;
    RatFunc rat;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }
Expr pow(const Expr& a, int k);
Expr apply(Fn f, const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr atan(const Expr& a);
Expr sqrt(const Expr& a);

// Structural equality of canonical forms.
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

class Chart {
public:
    Chart() = default;
    Chart(std::vector<std::string> names, std::vector<std::string> constraints = {});
    static Chart constants() { return Chart(); }

    size_t dim() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<int>& ids() const { return ids_; }
    const std::vector<Expr>& constraints() const { return constraints_; }
    void add_constraint(const Expr& e) { constraints_.push_back(e); }
    Expr coord(size_t i) const { return Expr::var(ids_.at(i)); }
    int index_of(int var) const;
    int index_of(const std::string& name) const;

private:
    std::vector<std::string> names_;
    std::vector<int> ids_;
    std::vector<Expr> constraints_;
};

Expr simplify(const Expr& e);
Expr diff(const Expr& e, int var);
inline Expr diff(const Expr& e, const Chart& c, size_t i) { return diff(e, c.ids().at(i)); }

double eval(const Expr& e, const Chart& c, const std::vector<double>& point);
double eval(const Expr& e, const Chart& c, const std::vector<mpq_class>& point);
// Exact value when e is rational at the point; nullopt when atoms prevent it.
std::optional<mpq_class> eval_exact(const Expr& e, const Chart& c, const std::vector<mpq_class>& point);
// Sum of absolute term values over |den|, used as a magnitude envelope.
double eval_envelope(const Expr& e, const Chart& c, const std::vector<double>& point);
bool in_domain(const Chart& c, const std::vector<mpq_class>& point);

Expr parse(const std::string& text, const Chart& c);
std::string to_string(const Expr& e);
std::string to_string(const mpq_class& q);
std::ostream& operator<<(std::ostream& os, const Expr& e);

struct SampleConfig {
    int samples = 32;
    double tol = 1e-9;
    std::uint64_t seed = 0;
};

// Seeded rational points in [-2,2]^n satisfying the chart constraints.
std::vector<std::vector<mpq_class>> sample_points(const Chart& c, const SampleConfig& cfg, int count,
                                                  const std::vector<Expr>& extra = {});
std::vector<double> to_double(const std::vector<mpq_class>& p);

struct ZeroVerdict {
    enum class Kind { ProvenZero, ProvenNonZero, NumericallyZero, NumericallyNonZero };
    Kind kind = Kind::ProvenZero;
    std::vector<double> witness;
    double value = 0;
    int sample_count = 0;
    double max_abs = 0;

    bool zero() const { return kind == Kind::ProvenZero || kind == Kind::NumericallyZero; }
    bool proven() const { return kind == Kind::ProvenZero || kind == Kind::ProvenNonZero; }
};

const char* to_string(ZeroVerdict::Kind k);
ZeroVerdict is_zero(const Expr& e, const Chart& c, const SampleConfig& cfg = {});

}  // namespace srflat
