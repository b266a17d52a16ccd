#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "srflat/cli.hpp"

namespace srflat {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw SpecError(where + ": " + what); }

std::string text_of(const json& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    fail(where, "expected an expression string or integer");
}

Expr expr_of(const json& j, const Chart& c, const std::string& where) {
    try {
        return simplify(parse(text_of(j, where), c));
    } catch (const ParseError& e) {
        fail(where, e.what());
    }
}

const json& need(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
    return obj.at(key);
}

std::vector<std::string> strings(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of strings");
    std::vector<std::string> r;
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) fail(where + "[" + std::to_string(i) + "]", "expected a string");
        r.push_back(j[i].get<std::string>());
    }
    return r;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("malformed document at byte ") + std::to_string(e.byte) + ": " + e.what());
    }
}

size_t index_in(const std::vector<std::string>& names, const json& j, const std::string& where) {
    if (j.is_number_integer()) {
        auto i = j.get<long long>();
        if (i < 0 || size_t(i) >= names.size()) fail(where, "basis index out of range");
        return size_t(i);
    }
    if (j.is_string()) {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == j.get<std::string>()) return i;
        fail(where, "unknown basis vector '" + j.get<std::string>() + "'");
    }
    fail(where, "expected a basis name or index");
}

std::vector<BracketTriple> brackets_of(const json& j, const std::vector<std::string>& names, const std::string& where) {
    std::vector<BracketTriple> r;
    if (!j.is_array()) fail(where, "expected an array of [i, j, k, c]");
    for (size_t t = 0; t < j.size(); ++t) {
        std::string w = where + "[" + std::to_string(t) + "]";
        const json& e = j[t];
        if (!e.is_array() || e.size() != 4) fail(w, "expected [i, j, k, c]");
        mpq_class c;
        try {
            c = parse_rational(text_of(e[3], w + "[3]"));
        } catch (const std::invalid_argument& x) {
            fail(w + "[3]", x.what());
        }
        r.emplace_back(int(index_in(names, e[0], w + "[0]")), int(index_in(names, e[1], w + "[1]")),
                       int(index_in(names, e[2], w + "[2]")), c);
    }
    return r;
}

std::vector<std::vector<mpq_class>> points_of(const json& j, size_t dim, const std::string& where) {
    std::vector<std::vector<mpq_class>> r;
    if (!j.is_array()) fail(where, "expected an array of points");
    for (size_t p = 0; p < j.size(); ++p) {
        std::string w = where + "[" + std::to_string(p) + "]";
        if (!j[p].is_array() || j[p].size() != dim) fail(w, "expected " + std::to_string(dim) + " coordinates");
        std::vector<mpq_class> x;
        for (size_t i = 0; i < dim; ++i) {
            try {
                x.push_back(parse_rational(text_of(j[p][i], w)));
            } catch (const std::invalid_argument& e) {
                fail(w + "[" + std::to_string(i) + "]", e.what());
            }
        }
        r.push_back(std::move(x));
    }
    return r;
}

StratifiedAlgebra algebra_of(const json& doc, const std::string& where) {
    auto basis = strings(need(doc, "basis", where), where + ".basis");
    std::vector<size_t> strata;
    const json& s = need(doc, "strata", where);
    if (!s.is_array()) fail(where + ".strata", "expected an array of stratum dimensions");
    for (const auto& d : s) {
        if (!d.is_number_unsigned()) fail(where + ".strata", "expected non-negative integers");
        strata.push_back(d.get<size_t>());
    }
    auto br = brackets_of(doc.contains("brackets") ? doc.at("brackets") : json::array(), basis, where + ".brackets");
    size_t m = strata.empty() ? 0 : strata[0];
    RatMatrix gram = RatMatrix::identity(m);
    if (doc.contains("gram1")) {
        const json& g = doc.at("gram1");
        if (!g.is_array() || g.size() != m) fail(where + ".gram1", "expected a " + std::to_string(m) + "x" + std::to_string(m) + " matrix");
        for (size_t i = 0; i < m; ++i) {
            if (!g[i].is_array() || g[i].size() != m) fail(where + ".gram1[" + std::to_string(i) + "]", "wrong row length");
            for (size_t k = 0; k < m; ++k) {
                try {
                    gram(i, k) = parse_rational(text_of(g[i][k], where + ".gram1"));
                } catch (const std::invalid_argument& e) {
                    fail(where + ".gram1", e.what());
                }
            }
        }
    }
    try {
        return StratifiedAlgebra(strata, basis, br, gram);
    } catch (const AlgebraError& e) {
        fail(where, e.what());
    }
}

}  // namespace

mpq_class parse_rational(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw std::invalid_argument("empty rational");
    auto dot = s.find('.');
    bool ok = s.find_first_not_of("+-0123456789./") == std::string::npos;
    try {
        if (ok && dot != std::string::npos) {
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            mpq_class q(mpz_class(digits, 10), mpz_class("1" + std::string(s.size() - dot - 1, '0'), 10));
            q.canonicalize();
            return q;
        }
        if (ok) {
            mpq_class q(s, 10);
            if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
            q.canonicalize();
            return q;
        }
    } catch (const std::invalid_argument&) {
    }
    throw std::invalid_argument("not a rational number: '" + raw + "'");
}

ManifoldSpec parse_manifold_spec(const std::string& text) {
    json doc = parse_json(text);
    if (!doc.is_object()) throw SpecError("document: expected an object");
    ManifoldSpec S;
    S.name = doc.value("name", "");
    S.description = doc.value("description", "");
    std::string mode = doc.value("mode", "coordinates");

    if (mode == "coordinates") {
        const json& ch = need(doc, "chart", "document");
        auto names = strings(need(ch, "coordinates", "chart"), "chart.coordinates");
        if (ch.contains("dim") && ch.at("dim") != names.size())
            fail("chart.dim", "does not match the number of coordinates");
        std::vector<std::string> cons;
        if (ch.contains("constraints")) cons = strings(ch.at("constraints"), "chart.constraints");
        try {
            S.space = Space::coordinates(Chart(names, cons));
        } catch (const ParseError& e) {
            fail("chart.constraints", e.what());
        }
    } else if (mode == "constant-structure") {
        S.mode = Mode::ConstantStructure;
        const json& st = need(doc, "structure", "document");
        auto basis = strings(need(st, "basis", "structure"), "structure.basis");
        auto br = brackets_of(st.contains("brackets") ? st.at("brackets") : json::array(), basis, "structure.brackets");
        try {
            S.space = Space::constant_structure(basis, br);
        } catch (const GeometryError& e) {
            fail("structure", e.what());
        }
    } else {
        fail("mode", "expected 'coordinates' or 'constant-structure'");
    }
    const Chart& chart = S.space->chart();
    size_t n = S.space->dim();

    if (doc.contains("frame")) {
        const json& fr = doc.at("frame");
        if (!fr.is_array() || fr.empty()) fail("frame", "expected a non-empty array of component lists");
        FrameField F;
        for (size_t a = 0; a < fr.size(); ++a) {
            std::string w = "frame[" + std::to_string(a) + "]";
            if (!fr[a].is_array() || fr[a].size() != n) fail(w, "expected " + std::to_string(n) + " components");
            VectorField v{S.space, {}};
            for (size_t i = 0; i < n; ++i) v.comp.push_back(expr_of(fr[a][i], chart, w + "[" + std::to_string(i) + "]"));
            F.push_back(std::move(v));
        }
        S.frame = std::move(F);
        if (doc.contains("frame_names")) {
            S.frame_names = strings(doc.at("frame_names"), "frame_names");
            if (S.frame_names.size() != S.frame->size()) fail("frame_names", "one name per frame field");
        }
    }
    if (doc.contains("metric")) {
        if (S.mode != Mode::Coordinates) fail("metric", "metrics need coordinate mode");
        const json& g = doc.at("metric");
        if (!g.is_array() || g.size() != n) fail("metric", "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
        Metric M{S.space, {}};
        for (size_t i = 0; i < n; ++i) {
            std::string w = "metric[" + std::to_string(i) + "]";
            if (!g[i].is_array() || g[i].size() != n) fail(w, "wrong row length");
            std::vector<Expr> row;
            for (size_t j = 0; j < n; ++j) row.push_back(expr_of(g[i][j], chart, w + "[" + std::to_string(j) + "]"));
            M.g.push_back(std::move(row));
        }
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j)
                if (M.g[i][j] != M.g[j][i])
                    fail("metric[" + std::to_string(i) + "][" + std::to_string(j) + "]", "metric is not symmetric");
        S.metric = std::move(M);
    }
    if (!S.frame && !S.metric) throw SpecError("document: needs a 'frame' or a 'metric' block");
    if (doc.contains("points")) {
        if (S.mode != Mode::Coordinates) fail("points", "points need coordinate mode");
        S.points = points_of(doc.at("points"), n, "points");
        for (size_t p = 0; p < S.points.size(); ++p)
            if (!in_domain(chart, S.points[p])) fail("points[" + std::to_string(p) + "]", "outside the chart domain");
    }
    return S;
}

StratifiedAlgebra parse_algebra(const std::string& text) {
    json doc = parse_json(text);
    if (!doc.is_object()) throw SpecError("document: expected an object");
    return algebra_of(doc, "algebra");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError(path + ": cannot open");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ManifoldSpec load_manifold_spec(const std::string& path) {
    try {
        return parse_manifold_spec(read_file(path));
    } catch (const SpecError& e) {
        throw SpecError(path + ": " + e.what());
    }
}

StratifiedAlgebra load_algebra(const std::string& path) {
    try {
        return parse_algebra(read_file(path));
    } catch (const SpecError& e) {
        throw SpecError(path + ": " + e.what());
    }
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream s;
    for (unsigned i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return s.str();
}

}  // namespace srflat
