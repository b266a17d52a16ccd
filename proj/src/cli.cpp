#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <ostream>

#include "srflat/cli.hpp"

namespace srflat {

using nlohmann::ordered_json;

namespace {

ordered_json rat(const mpq_class& q) { return to_string(q); }

ordered_json point_json(const std::vector<mpq_class>& x) {
    ordered_json a = ordered_json::array();
    for (const auto& v : x) a.push_back(rat(v));
    return a;
}

ordered_json matrix_json(const RatMatrix& m) {
    ordered_json a = ordered_json::array();
    for (size_t i = 0; i < m.rows(); ++i) a.push_back(point_json(m.row(i)));
    return a;
}

ordered_json algebra_json(const StratifiedAlgebra& g) {
    ordered_json r;
    r["dim"] = g.dim();
    r["strata"] = g.strata();
    r["basis"] = g.names();
    ordered_json br = ordered_json::array();
    for (const auto& [i, j, k, c] : g.triples())
        br.push_back({g.names()[i], g.names()[j], g.names()[k], rat(c)});
    r["brackets"] = br;
    r["gram1"] = matrix_json(g.gram1());
    return r;
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::FlatProven:
        case Verdict::FlatNumeric: return 0;
        case Verdict::NotFlat: return 1;
        case Verdict::Undecided: break;
    }
    return 2;
}

void absorb(Report& R, const FlatnessReport& F, bool transcript) {
    R.verdict = to_string(F.verdict);
    R.exit_code = verdict_exit(F.verdict);
    R.result["residuals"] = F.residual_count;
    R.result["proven_zero"] = F.proven_zero;
    ordered_json v = ordered_json::array();
    for (const auto& x : F.violations) {
        ordered_json e;
        e["slot"] = x.slot;
        e["expr"] = x.expr;
        e["kind"] = x.zero_kind;
        e["witness"] = x.witness;
        e["value"] = x.value;
        v.push_back(e);
    }
    R.result["violations"] = v;
    if (!F.note.empty()) R.result["note"] = F.note;
    if (transcript) R.transcript = F.transcript;
    R.warnings.insert(R.warnings.end(), F.warnings.begin(), F.warnings.end());
}

std::vector<mpq_class> parse_vector(const std::string& s) {
    std::vector<mpq_class> r;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) r.push_back(parse_rational(item));
    return r;
}

std::vector<std::vector<mpq_class>> points_for(const SRStructure& S, const SampleConfig& cfg) {
    if (S.space()->mode() == Mode::ConstantStructure) return {{}};
    if (!S.points.empty()) return S.points;
    return sample_points(S.chart(), cfg, cfg.samples);
}

SRStructure structure_of(const ManifoldSpec& M, const SampleConfig& cfg) {
    if (!M.frame) throw SpecError("this command needs a 'frame' block");
    auto S = make_sr(*M.frame, cfg, M.frame_names);
    S.points = M.points;
    return S;
}

const Metric& metric_of(const ManifoldSpec& M) {
    if (!M.metric) throw SpecError("this command needs a 'metric' block");
    return *M.metric;
}

ordered_json growth_json(const GrowthVector& g) { return g; }

}  // namespace

ordered_json to_json(const Report& r, bool timing) {
    ordered_json j;
    j["command"] = r.command;
    j["input_digest"] = r.input_digest;
    j["config"] = {{"seed", std::to_string(r.config.seed)},
                   {"tolerance", r.config.tol},
                   {"samples", r.config.samples}};
    j["verdict"] = r.verdict ? ordered_json(*r.verdict) : ordered_json(nullptr);
    j["result"] = r.result;
    ordered_json t = ordered_json::object();
    for (const auto& [k, v] : r.transcript) t[k] = v;
    j["transcript"] = t;
    j["warnings"] = r.warnings;
    if (timing) j["timing_ms"] = r.timing_ms;
    return j;
}

std::string to_text(const Report& r) {
    std::ostringstream s;
    s << r.command << "  (sha256 " << r.input_digest.substr(0, 16) << ", seed " << r.config.seed << ", samples "
      << r.config.samples << ", tol " << r.config.tol << ")\n";
    if (r.verdict) s << "verdict: " << *r.verdict << "\n";
    for (const auto& [k, v] : r.result.items()) s << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    for (const auto& [k, v] : r.transcript) s << "  " << k << " = " << v << "\n";
    for (const auto& w : r.warnings) s << "warning: " << w << "\n";
    return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"srflat: flatness certificates for Riemannian and sub-Riemannian structures"};
    app.require_subcommand(1);
    SampleConfig cfg;
    std::string format = "text", output;
    bool transcript = false;
    app.add_option("--samples", cfg.samples, "random sample points")->check(CLI::PositiveNumber);
    app.add_option("--tol", cfg.tol, "numeric zero tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "sampling seed");
    app.add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
    app.add_option("--output,-o", output, "file for the structured report (default stdout)");
    app.add_flag("--transcript", transcript, "include construction intermediates");
    app.fallthrough();

    std::string file, y2 = "printed", point;
    auto with_file = [&](CLI::App* c, const char* what) { c->add_option("spec", file, what)->required(); };
    auto* riem = app.add_subcommand("riem-flat", "Riemannian flatness of a metric");
    auto* gauss = app.add_subcommand("gauss", "Gaussian curvature of a surface metric");
    auto* growth = app.add_subcommand("growth", "growth vector at sample points");
    auto* equi = app.add_subcommand("equiregular", "equiregularity over sample points");
    auto* symbol = app.add_subcommand("symbol", "nilpotent symbol at a point");
    auto* csym = app.add_subcommand("constant-symbol", "constant-symbol decision");
    auto* engel = app.add_subcommand("engel-flat", "Engel-type (2,3,4) flatness");
    auto* contact = app.add_subcommand("contact-flat", "contact sub-Riemannian flatness");
    auto* g235 = app.add_subcommand("g235-flat", "(2,3,5) flatness");
    for (auto* c : {riem, gauss, growth, equi, symbol, csym, engel, contact, g235}) with_file(c, "manifold spec file");
    symbol->add_option("--point", point, "comma-separated rational coordinates");
    g235->add_option("--y2", y2, "Y2 derivative term: printed or symmetric")->check(CLI::IsMember({"printed", "symmetric"}));

    auto* carnot = app.add_subcommand("carnot", "stratified algebra tools");
    carnot->require_subcommand(1);
    int m = 2, s = 2;
    size_t degree = 0;
    std::string va, vb;
    auto* cfree = carnot->add_subcommand("free", "free nilpotent algebra");
    cfree->add_option("generators", m)->required()->check(CLI::PositiveNumber);
    cfree->add_option("step", s)->required()->check(CLI::PositiveNumber);
    auto* cbch = carnot->add_subcommand("bch", "log(exp A exp B)");
    auto* cisom = carnot->add_subcommand("isom", "graded isometric derivations");
    auto* cspen = carnot->add_subcommand("spencer", "Spencer differential at a degree");
    auto* cval = carnot->add_subcommand("validate", "axioms of a stratified algebra");
    for (auto* c : {cbch, cisom, cspen, cval}) with_file(c, "algebra file");
    cbch->add_option("A", va, "comma-separated coordinates")->required();
    cbch->add_option("B", vb, "comma-separated coordinates")->required();
    cspen->add_option("--degree,-k", degree, "cochain degree");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Report R;
    R.config = cfg;
    auto t0 = std::chrono::steady_clock::now();
    try {
        CLI::App* cmd = app.get_subcommands().front();
        R.command = cmd->get_name();
        if (cmd == carnot) R.command += " " + carnot->get_subcommands().front()->get_name();
        std::string bytes;
        if (!file.empty()) {
            bytes = read_file(file);
            R.input_digest = sha256_hex(bytes);
        } else {
            R.command += " " + std::to_string(m) + " " + std::to_string(s);
            R.input_digest = sha256_hex(R.command);
        }

        if (cmd == carnot) {
            CLI::App* sub = carnot->get_subcommands().front();
            if (sub == cfree) {
                R.result["algebra"] = algebra_json(free_nilpotent(m, s));
            } else {
                auto g = parse_algebra(bytes);
                if (sub == cbch) {
                    auto A = parse_vector(va), B = parse_vector(vb);
                    if (A.size() != g.dim() || B.size() != g.dim())
                        throw SpecError("bch arguments need " + std::to_string(g.dim()) + " coordinates");
                    R.result["product"] = point_json(bch(g, A, B));
                } else if (sub == cisom) {
                    auto I = isometry_algebra(g);
                    R.result["dimension"] = I.dim();
                    ordered_json b = ordered_json::array();
                    for (const auto& D : I.basis) b.push_back(matrix_json(D));
                    R.result["basis"] = b;
                } else if (sub == cspen) {
                    SpencerComplex C(g);
                    RatMatrix d = C.differential(degree);
                    R.result["degree"] = degree;
                    R.result["cochain_dim"] = C.cochain_dim(degree);
                    R.result["next_cochain_dim"] = C.cochain_dim(degree + 1);
                    R.result["rank"] = rank(d);
                    R.result["kernel_dim"] = C.cochain_dim(degree) - rank(d);
                    if (degree > 0) R.result["d_squared_zero"] = (d * C.differential(degree - 1)).is_zero();
                } else {
                    auto V = validate(g);
                    ordered_json checks = ordered_json::array();
                    for (const auto& c : V.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
                    R.result["checks"] = checks;
                    R.result["valid"] = V.ok();
                    R.exit_code = V.ok() ? 0 : 1;
                }
                if (sub != cval) R.result["algebra"] = algebra_json(g);
            }
        } else {
            auto M = parse_manifold_spec(bytes);
            if (!M.name.empty()) R.result["name"] = M.name;
            if (cmd == riem) {
                absorb(R, riemannian_flatness(metric_of(M), cfg), transcript);
            } else if (cmd == gauss) {
                const Metric& g = metric_of(M);
                if (g.dim() != 2) throw SpecError("gauss needs a 2-dimensional metric");
                Expr K = gaussian_curvature(g, cfg);
                R.result["K"] = to_string(K);
                const Chart& c = g.space->chart();
                auto pts = M.points.empty() ? sample_points(c, cfg, std::min(cfg.samples, 5)) : M.points;
                ordered_json vals = ordered_json::array();
                for (const auto& x : pts) {
                    ordered_json e{{"point", point_json(x)}};
                    if (auto q = eval_exact(K, c, x)) e["K"] = rat(*q);
                    else e["K"] = eval(K, c, x);
                    vals.push_back(e);
                }
                R.result["values"] = vals;
            } else {
                auto S = structure_of(M, cfg);
                if (cmd == growth) {
                    BracketTower T(S);
                    ordered_json rows = ordered_json::array();
                    bool all = true;
                    for (const auto& x : points_for(S, cfg)) {
                        auto f = flag_at_point(T, x);
                        all = all && f.bracket_generating;
                        rows.push_back({{"point", point_json(x)},
                                        {"growth", f.bracket_generating ? ordered_json(f.ranks) : ordered_json(nullptr)},
                                        {"ranks", f.ranks},
                                        {"exact", f.exact}});
                    }
                    R.result["bracket_generating"] = all;
                    R.result["points"] = rows;
                    R.exit_code = all ? 0 : 1;
                } else if (cmd == equi) {
                    auto E = equiregular_check(S, points_for(S, cfg));
                    R.result["equiregular"] = E.pass;
                    ordered_json cls = ordered_json::array();
                    for (const auto& [g, idx] : E.classes) {
                        ordered_json pts = ordered_json::array();
                        for (size_t i : idx) pts.push_back(point_json(E.points[i]));
                        cls.push_back({{"growth", g.empty() ? ordered_json("not bracket-generating") : growth_json(g)},
                                       {"points", pts}});
                    }
                    R.result["classes"] = cls;
                    R.exit_code = E.pass ? 0 : 1;
                } else if (cmd == symbol) {
                    std::vector<mpq_class> x;
                    if (!point.empty()) x = parse_vector(point);
                    else x = points_for(S, cfg).front();
                    if (x.size() != (S.space()->mode() == Mode::ConstantStructure ? 0 : S.ambient()))
                        throw SpecError("--point has the wrong number of coordinates");
                    auto sym = symbol_at_point(S, x, cfg);
                    R.result["point"] = point_json(x);
                    R.result["exact"] = sym.exact;
                    std::vector<std::string> words;
                    for (const auto& w : sym.adapted_words) words.push_back(word_name(w, S.names));
                    R.result["adapted_basis"] = words;
                    R.result["algebra"] = algebra_json(sym.algebra);
                } else if (cmd == csym) {
                    auto C = constant_symbol_check(S, points_for(S, cfg), cfg);
                    R.verdict = to_string(C.decision);
                    R.exit_code = C.decision == SymbolDecision::Constant ? 0 : C.decision == SymbolDecision::NotConstant ? 1 : 2;
                    R.result["growth_class"] = C.growth_class;
                    R.result["growth"] = C.growth;
                    if (!C.spectra.empty()) R.result["spectra"] = C.spectra;
                    if (!C.note.empty()) R.result["note"] = C.note;
                } else if (cmd == engel) {
                    absorb(R, engel_flatness(S, cfg), transcript);
                } else if (cmd == contact) {
                    absorb(R, contact_flatness(S, cfg), transcript);
                } else if (cmd == g235) {
                    absorb(R, g235_flatness(S, cfg, y2 == "symmetric" ? Y2Reading::Symmetric : Y2Reading::Printed),
                           transcript);
                }
            }
        }
    } catch (const SpecError& e) {
        err << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const AlgebraError& e) {
        err << "algebra error: " << e.what() << "\n";
        return 2;
    } catch (const GeometryError& e) {
        err << "geometry error: " << e.what() << "\n";
        return 2;
    } catch (const SubRiemannError& e) {
        err << "sub-Riemannian error: " << e.what() << "\n";
        return 2;
    } catch (const FlatnessError& e) {
        err << "flatness error: " << e.what() << "\n";
        return 2;
    } catch (const SamplingError& e) {
        err << "sampling error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
    R.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (format == "structured") {
        std::string doc = to_json(R).dump(2) + "\n";
        if (output.empty()) {
            out << doc;
        } else {
            std::ofstream f(output, std::ios::binary);
            if (!f) {
                err << "cannot write " << output << "\n";
                return 2;
            }
            f << doc;
        }
    } else {
        out << to_text(R);
    }
    return R.exit_code;
}

}  // namespace srflat
