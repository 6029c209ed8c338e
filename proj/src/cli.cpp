#include "qdef/cli.hpp"
#include "qdef/errors.hpp"
#include "qdef/geometry.hpp"
#include "qdef/hopfgen.hpp"
#include "qdef/matrep.hpp"
#include "qdef/repcls.hpp"
#include "qdef/schrod.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

namespace qdef::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct VerificationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// results land in index order whatever the thread count
template <class F>
auto parallel_map(size_t n, int threads, F f) -> std::vector<decltype(f(size_t{0}))> {
    using T = decltype(f(size_t{0}));
    std::vector<T> out(n);
    std::vector<std::exception_ptr> err(n);
    int nt = std::max(1, std::min<int>(threads, (int)n));
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (size_t i = t; i < n; i += nt) {
                try {
                    out[i] = f(i);
                } catch (...) {
                    err[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : err)
        if (e) std::rethrow_exception(e);
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

class CsvWriter {
public:
    explicit CsvWriter(const fs::path& p) : out_(p, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + p.string());
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_field(cells[i]);
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + p.string());
    out << j.dump(2) << '\n';
}

// a double as JSON; non-finite values become strings
json jnum(double x) {
    if (std::isfinite(x)) return x;
    return fmt(x);
}

struct Context {
    fs::path out_dir;
    std::string name;
    int threads = 1;
    std::vector<std::string> outputs;  // file names relative to out_dir

    fs::path file(const std::string& suffix) {
        std::string f = name + suffix;
        outputs.push_back(f);
        return out_dir / f;
    }
};

// ---------- shared potential options ----------

struct PotentialArgs {
    double s = NAN, m = NAN;
    std::string f1 = "auto", f2 = "auto", regime = "auto", assembly = "derived", grid = "-5:5:0.001";
    double d1 = 0, d2 = 0, F1 = 1, F2 = 1, F3 = 1, F4 = 1, decoupling = 0.05;
    int sign = 1;
    bool f1_second = false;
};

void add_potential_options(CLI::App* sub, PotentialArgs& a, bool required) {
    auto* s = sub->add_option("--s", a.s, "deformation parameter s in (0, pi)");
    auto* m = sub->add_option("--m", a.m, "magnetic label m");
    if (required) {
        s->required();
        m->required();
    }
    sub->add_option("--f1", a.f1, "f1 branch: auto, tan, tanh, constant, linear");
    sub->add_option("--f2", a.f2, "f2 branch: auto, sech, exponential, secant, constant, zero");
    sub->add_option("--grid", a.grid, "r grid start:stop:step");
    sub->add_option("--d1", a.d1);
    sub->add_option("--d2", a.d2);
    sub->add_option("--F1", a.F1);
    sub->add_option("--F2", a.F2);
    sub->add_option("--F3", a.F3);
    sub->add_option("--F4", a.F4);
    sub->add_option("--sign", a.sign, "sign of the constant f1 branch")->check(CLI::IsMember({-1, 1}));
    sub->add_option("--regime", a.regime, "auto, near0, nearPi, nearHalfPi");
    sub->add_option("--assembly", a.assembly, "derived or printed")->check(CLI::IsMember({"derived", "printed"}));
    sub->add_flag("--f1-second", a.f1_second, "use f1'' in place of f1' in the [2m] term");
    sub->add_option("--decoupling", a.decoupling, "threshold on |eta^2 [2m]|");
}

PotentialProfile build_from_args(const PotentialArgs& a) {
    Deformation d(a.s);
    PotentialParams p;
    p.s = a.s;
    p.m = a.m;
    p.f1 = a.f1 == "auto" ? default_f1_branch(d) : parse_f1_branch(a.f1);
    p.f2 = a.f2 == "auto" ? partner_f2_branch(p.f1) : parse_f2_branch(a.f2);
    p.k = RealizationConstants{a.d1, a.d2, a.F1, a.F2, a.F3, a.F4, a.sign};
    p.regime = parse_regime(a.regime);
    p.opt.assembly = a.assembly == "printed" ? Assembly::Printed : Assembly::Derived;
    p.opt.f1_second = a.f1_second;
    p.opt.decoupling_threshold = a.decoupling;
    GridSpec g = parse_grid(a.grid);
    p.grid = Grid::span(g.start, g.stop, g.step);
    return build_potential(p);
}

// ---------- subcommands ----------

struct ClassifyArgs {
    double s = NAN;
    std::string c, c_range;
};

void cmd_classify(const ClassifyArgs& a, Context& ctx) {
    Deformation d(a.s);
    std::vector<double> cs;
    if (!a.c.empty()) cs.push_back(std::stod(a.c));
    if (!a.c_range.empty()) {
        auto v = parse_grid(a.c_range).values();
        cs.insert(cs.end(), v.begin(), v.end());
    }
    if (cs.empty()) throw CLI::ValidationError("classify", "one of --c or --c-range is required");
    auto rows = parallel_map(cs.size(), ctx.threads, [&](size_t i) { return classify(d, cs[i]); });
    CsvWriter w(ctx.file(".csv"));
    w.row({"s", "c", "class", "N", "k", "m0", "period", "distinct", "strange", "m_rule"});
    size_t count = 0;
    for (size_t i = 0; i < cs.size(); ++i)
        for (auto& r : rows[i]) {
            w.row({fmt(a.s), fmt(cs[i]), to_string(r.cls), std::to_string(r.N), std::to_string(r.k), fmt(r.m0),
                   std::to_string(r.period), std::to_string(r.distinct_ladder_values), r.strange ? "1" : "0",
                   r.m_rule()});
            ++count;
        }
    std::cout << count << " descriptor rows for " << cs.size() << " c values\n";
}

struct RepArgs {
    double s = NAN, c = NAN;
    std::string basis;
    bool verify = false;
    int margin = -1;
};

std::vector<double> parse_basis(const std::string& b) {
    if (b.find(':') != std::string::npos) return parse_grid(b).values();
    std::vector<double> out;
    std::stringstream ss(b);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

void cmd_rep(const RepArgs& a, Context& ctx) {
    Deformation d(a.s);
    std::vector<double> basis;
    if (!a.basis.empty()) {
        basis = parse_basis(a.basis);
    } else {
        for (auto& r : classify(d, a.c))
            if (r.finite) {
                basis = r.m_list;
                break;
            }
        if (basis.empty()) throw CLI::ValidationError("rep", "no finite representation at this (s, c); pass --basis");
    }
    RepTriple t = build_rep(d, a.c, basis);
    AlgebraReport r = verify_algebra(t, d, a.c, a.margin);

    CsvWriter w(ctx.file(".csv"));
    w.row({"operator", "row", "col", "re", "im"});
    auto dump = [&](const char* nm, const OperatorMatrix& m) {
        for (long i = 0; i < m.entries.rows(); ++i)
            for (long j = 0; j < m.entries.cols(); ++j)
                w.row({nm, std::to_string(i), std::to_string(j), fmt(m.entries(i, j).real()),
                       fmt(m.entries(i, j).imag())});
    };
    dump("Jz", t.Jz);
    dump("J+", t.Jplus);
    dump("J-", t.Jminus);

    json rep;
    rep["basis"] = basis;
    rep["truncated"] = t.truncated;
    rep["edge_top"] = t.edge_top;
    rep["edge_bottom"] = t.edge_bottom;
    rep["margin"] = r.margin;
    rep["res_jz_jpm"] = r.res_jz_jpm;
    rep["res_jp_jm"] = r.res_jp_jm;
    rep["res_casimir"] = r.res_casimir;
    rep["res_casimir_forms"] = r.res_casimir_forms;
    rep["res_casimir_commute"] = r.res_casimir_commute;
    rep["hermiticity"] = r.hermiticity;
    rep["maekawa_s"] = r.maekawa_s;
    rep["maekawa_2s"] = r.maekawa_2s;
    rep["maekawa_2s_spread"] = r.maekawa_2s_spread;
    write_json(ctx.file(".report.json"), rep);

    double worst = std::max({r.res_jz_jpm, r.res_jp_jm, r.res_casimir, r.res_casimir_forms, r.hermiticity});
    std::cout << "dimension " << basis.size() << (t.truncated ? " (truncated)" : "") << ", worst residual "
              << fmt(worst) << "\n";
    if (a.verify && !(worst < 1e-10)) throw VerificationFailed("algebra residual " + fmt(worst) + " exceeds 1e-10");
}

void write_potential(const PotentialProfile& p, const fs::path& path) {
    CsvWriter w(path);
    std::vector<std::string> head = {"r", "V", "masked"};
    for (auto& [k, v] : p.terms) head.push_back(k);
    w.row(head);
    for (long i = 0; i < p.grid.count; ++i) {
        std::vector<std::string> row = {fmt(p.grid.at(i)), fmt(p.values[i]), p.pole_mask[i] ? "1" : "0"};
        for (auto& [k, v] : p.terms) row.push_back(fmt(v[i]));
        w.row(row);
    }
}

void cmd_potential(const PotentialArgs& a, Context& ctx) {
    PotentialProfile p = build_from_args(a);
    for (long i = 0; i < p.grid.count; ++i)
        if (!p.pole_mask[i] && !std::isfinite(p.values[i])) throw NumericalFailure("potential not finite at r = " + fmt(p.grid.at(i)));
    write_potential(p, ctx.file(".csv"));
    std::cout << p.grid.count << " samples, kappa " << fmt(p.kappa) << ", |eta^2 [2m]| " << fmt(p.coupling)
              << (p.decoupled ? " (decoupled)" : " (coupled regime)") << "\n";
}

struct SpectrumArgs {
    PotentialArgs pot;
    std::string input, oracle;
    double L = 1, lambda = 2;
    std::string oracle_grid;
    int n = 5;
    long min_cell = 200;
    bool vectors = false;
};

PotentialProfile read_potential_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--input", "cannot open " + path);
    std::string line;
    std::getline(in, line);
    std::vector<double> r, v;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        r.push_back(std::stod(a));
        v.push_back(b == "nan" ? NAN : std::stod(b));
    }
    if (r.size() < 2) throw CLI::ValidationError("--input", "potential CSV has fewer than two rows");
    Grid g;
    g.start = r.front();
    g.step = (r.back() - r.front()) / (double)(r.size() - 1);
    g.count = (long)r.size();
    for (size_t i = 0; i < r.size(); ++i)
        if (std::abs(r[i] - g.at((long)i)) > 1e-9 * std::max(1.0, std::abs(r[i])))
            throw CLI::ValidationError("--input", "potential CSV grid is not uniform");
    return potential_from_values(g, std::move(v));
}

void cmd_spectrum(const SpectrumArgs& a, Context& ctx) {
    PotentialProfile p;
    if (!a.input.empty()) {
        p = read_potential_csv(a.input);
    } else if (a.oracle == "box") {
        GridSpec g = parse_grid(a.oracle_grid.empty() ? "0:" + fmt(a.L) + ":" + fmt(a.L / 1000) : a.oracle_grid);
        Grid gr = Grid::span(g.start, g.stop, g.step);
        p = potential_from_values(gr, std::vector<double>(gr.count, 0.0));
    } else if (a.oracle == "poschl-teller") {
        GridSpec g = parse_grid(a.oracle_grid.empty() ? "-15:15:0.001" : a.oracle_grid);
        Grid gr = Grid::span(g.start, g.stop, g.step);
        std::vector<double> v(gr.count);
        for (long i = 0; i < gr.count; ++i) v[i] = -a.lambda * (a.lambda + 1) / std::pow(std::cosh(gr.at(i)), 2);
        p = potential_from_values(gr, std::move(v));
    } else if (!a.oracle.empty()) {
        throw CLI::ValidationError("--oracle", "unknown oracle '" + a.oracle + "'");
    } else {
        if (std::isnan(a.pot.s) || std::isnan(a.pot.m))
            throw CLI::ValidationError("spectrum", "give --input, --oracle, or --s and --m");
        p = build_from_args(a.pot);
    }
    auto runs = unmasked_runs(p.pole_mask);
    std::vector<std::pair<long, long>> cells;
    for (auto r : runs)
        if (r.second - r.first + 1 >= std::max(a.min_cell, 200L)) cells.push_back(r);
    if (cells.empty()) throw InsufficientGrid("no unmasked run is long enough to eigensolve");
    auto res = parallel_map(cells.size(), ctx.threads,
                            [&](size_t i) { return eigensolve_segment(p, cells[i].first, cells[i].second, a.n); });
    CsvWriter w(ctx.file(".csv"));
    w.row({"cell", "r_first", "r_last", "k", "eigenvalue", "self_residual"});
    for (size_t c = 0; c < res.size(); ++c)
        for (size_t k = 0; k < res[c].eigenvalues.size(); ++k) {
            if (!std::isfinite(res[c].eigenvalues[k])) throw NumericalFailure("non-finite eigenvalue");
            w.row({std::to_string(c), fmt(p.grid.at(res[c].first)), fmt(p.grid.at(res[c].last)), std::to_string(k),
                   fmt(res[c].eigenvalues[k]), fmt(res[c].self_residual[k])});
        }
    if (a.vectors) {
        CsvWriter wv(ctx.file(".vectors.csv"));
        std::vector<std::string> head = {"cell", "r"};
        for (int k = 0; k < (int)res[0].eigenvalues.size(); ++k) head.push_back("psi_" + std::to_string(k));
        wv.row(head);
        for (size_t c = 0; c < res.size(); ++c)
            for (long j = 0; j <= res[c].last - res[c].first; ++j) {
                std::vector<std::string> row = {std::to_string(c), fmt(p.grid.at(res[c].first + j))};
                for (auto& v : res[c].eigenvectors) row.push_back(fmt(v[j]));
                wv.row(row);
            }
    }
    std::cout << res.size() << " cell(s); lowest eigenvalue " << fmt(res[0].eigenvalues[0]) << "\n";
}

struct FlowArgs {
    double m_max = 4.5;
    std::string s_grid = "0.01:3.13:0.00625";
    double tol = 1e-9, gap = 1e-3;
};

void cmd_flow(const FlowArgs& a, Context& ctx) {
    FlowTable t = spectral_flow(a.m_max, parse_grid(a.s_grid).values(), a.tol, a.gap);
    CsvWriter w(ctx.file(".csv"));
    std::vector<std::string> head = {"s"};
    for (double m : t.m_values) head.push_back("m=" + fmt(m));
    w.row(head);
    for (size_t j = 0; j < t.s_grid.size(); ++j) {
        std::vector<std::string> row = {fmt(t.s_grid[j])};
        for (auto& c : t.curves) row.push_back(fmt(c[j]));
        w.row(row);
    }
    CsvWriter wc(ctx.file(".crossings.csv"));
    wc.row({"s", "m1", "m2", "tangential", "gap"});
    for (auto& c : t.crossings) wc.row({fmt(c.s), fmt(c.m1), fmt(c.m2), c.tangential ? "1" : "0", fmt(c.gap)});
    std::cout << t.curves.size() << " curves, " << t.crossings.size() << " crossings\n";
}

struct SurfaceArgs {
    double c = NAN, s = NAN;
    std::string s_grid;
    double periods = 3.0;
    int spp = 2000;
};

void cmd_surface(const SurfaceArgs& a, Context& ctx) {
    if (std::isnan(a.s) == a.s_grid.empty())
        throw CLI::ValidationError("surface", "give exactly one of --s or --s-grid");
    if (!std::isnan(a.s)) {
        Deformation d(a.s);
        LevelSection sec = level_section(d, a.c, section_window(d, a.periods, a.spp));
        CsvWriter w(ctx.file(".csv"));
        w.row({"jz", "jx", "masked"});
        for (size_t i = 0; i < sec.jz_samples.size(); ++i)
            w.row({fmt(sec.jz_samples[i]), fmt(sec.jx_values[i]), sec.mask[i] ? "1" : "0"});
        std::cout << to_string(sec.connectivity) << ", " << sec.components << " component(s)\n";
        return;
    }
    TopologyTransition t = topology_transition(a.c, parse_grid(a.s_grid).values(), a.periods, a.spp);
    auto sg = parse_grid(a.s_grid).values();
    CsvWriter w(ctx.file(".csv"));
    w.row({"s", "connectivity"});
    for (size_t i = 0; i < sg.size(); ++i) w.row({fmt(sg[i]), to_string(t.per_s[i])});
    json rep;
    rep["found"] = t.found;
    rep["s_lo"] = t.s_lo;
    rep["s_hi"] = t.s_hi;
    rep["s_star"] = t.s_star;
    write_json(ctx.file(".report.json"), rep);
    if (t.found) std::cout << "transition s* = " << fmt(t.s_star) << "\n";
    else std::cout << "no transition on this grid\n";
}

struct HopfArgs {
    double alpha = 2, c = 5;
    std::string b = "sech:1.2:2.5";
    int dim = 12;
    bool verify = false;
};

BProfile parse_bprofile(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() == 2 && parts[0] == "constant") return BProfile::constant(std::stod(parts[1]));
    if (parts.size() == 3 && parts[0] == "sech") return BProfile::sech(std::stod(parts[1]), std::stod(parts[2]));
    throw CLI::ValidationError("--b", "expected constant:<b> or sech:<f_lo>:<f_hi>");
}

void cmd_hopf(const HopfArgs& a, Context& ctx) {
    GenDeformation gd(a.alpha, parse_bprofile(a.b));
    UnitarityWindow win = unitarity_window(a.c, gd);
    GenRep r = build_gen_rep(gd, a.dim, a.c);
    GenRepChecks ch = check_gen_rep(gd, r);
    HopfReport h = hopf_axiom_report(gd, r);
    std::vector<std::pair<std::string, double>> rows = {
        {"q1", gd.q1},
        {"window_L1", win.L1},
        {"window_L2", win.L2},
        {"window_l1", win.l1},
        {"window_l2", win.l2},
        {"window_c_min", window_c_min(gd)},
        {"commutator", ch.commutator},
        {"rescale_plus", ch.rescale_plus},
        {"rescale_minus", ch.rescale_minus},
        {"casimir_spread", ch.casimir_spread},
        {"casimir_offdiag", ch.casimir_offdiag},
        {"casimir_mean", ch.casimir_mean},
        {"coassoc_jp", h.coassoc_jp},
        {"coassoc_jm", h.coassoc_jm},
        {"coassoc_g", h.coassoc_g},
        {"coassoc_ginv", h.coassoc_ginv},
        {"counit", h.counit},
        {"antipode_left", h.antipode_left},
        {"antipode_right", h.antipode_right},
        {"antipode_half_left", h.antipode_half_left},
        {"antipode_half_right", h.antipode_half_right},
        {"antipode_g", h.antipode_g},
        {"homomorphism", h.homomorphism},
    };
    CsvWriter w(ctx.file(".csv"));
    w.row({"check", "value"});
    for (auto& [k, v] : rows) w.row({k, fmt(v)});
    double worst = std::max({h.coassoc_jp, h.coassoc_jm, h.coassoc_g, h.coassoc_ginv, h.counit});
    std::cout << "coassociativity/counit worst " << fmt(worst) << "\n";
    if (a.verify && !(worst < 1e-10)) throw VerificationFailed("Hopf residual " + fmt(worst) + " exceeds 1e-10");
}

// ---------- manifest ----------

// options that shape the output; --out, --name, --config and --threads do not
json collect_params(CLI::App* sub) {
    json p = json::object();
    for (const CLI::Option* o : sub->get_options()) {
        std::string nm = o->get_name(false, true);
        if (nm.rfind("--", 0) != 0) continue;
        std::string key = nm.substr(2);
        if (key == "out" || key == "name" || key == "config" || key == "threads" || key == "help") continue;
        if (o->count() == 0) continue;
        if (o->get_expected_min() == 0) p[key] = true;
        else p[key] = o->results().back();
    }
    return p;
}

void write_manifest(const std::string& sub, const json& params, Context& ctx) {
    json m;
    m["tool"] = "qdef";
    m["version"] = kVersion;
    m["subcommand"] = sub;
    m["name"] = ctx.name;
    m["params"] = params;
    json dig = json::object();
    for (auto& f : ctx.outputs) dig[f] = sha256_file((ctx.out_dir / f).string());
    m["outputs"] = dig;
    write_json(ctx.out_dir / (ctx.name + ".manifest.json"), m);
}

int replay(const std::string& manifest, const std::string& out_dir, const std::string& prog) {
    std::ifstream in(manifest);
    if (!in) {
        std::cerr << "error: cannot open manifest " << manifest << "\n";
        return ArgError;
    }
    json m = json::parse(in);
    fs::path dir = out_dir.empty() ? fs::path(manifest).parent_path() / "replay" : fs::path(out_dir);
    std::vector<std::string> args = {prog, m.at("subcommand").get<std::string>()};
    for (auto& [k, v] : m.at("params").items()) {
        args.push_back("--" + k);
        if (!v.is_boolean()) args.push_back(v.get<std::string>());
    }
    args.push_back("--out");
    args.push_back(dir.string());
    args.push_back("--name");
    args.push_back(m.at("name").get<std::string>());
    int rc = run(args);
    if (rc != Ok) return rc;
    bool same = true;
    for (auto& [f, digest] : m.at("outputs").items()) {
        std::string now = sha256_file((dir / f).string());
        bool ok = now == digest.get<std::string>();
        std::cout << (ok ? "identical " : "DIFFERS   ") << f << "\n";
        same = same && ok;
    }
    return same ? Ok : VerifyFailure;
}

} // namespace

std::vector<double> GridSpec::values() const {
    Grid g = Grid::span(start, stop, step);
    std::vector<double> v(g.count);
    for (long i = 0; i < g.count; ++i) v[i] = g.at(i);
    return v;
}

GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw CLI::ValidationError("grid", "expected start:stop:step, got '" + text + "'");
    GridSpec g;
    try {
        g.start = std::stod(parts[0]);
        g.stop = std::stod(parts[1]);
        g.step = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw CLI::ValidationError("grid", "non-numeric field in '" + text + "'");
    }
    if (!(g.step > 0) || !(g.stop >= g.start))
        throw CLI::ValidationError("grid", "need step > 0 and stop >= start in '" + text + "'");
    return g;
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--config", "line without '=': " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

int run(const std::vector<std::string>& args_in) {
    std::vector<std::string> args = args_in;
    std::string prog = args.empty() ? "qdef" : args[0];

    // config defaults become extra flags unless the command line already sets them
    for (size_t i = 1; i + 1 < args.size(); ++i) {
        if (args[i] != "--config") continue;
        try {
            for (auto& [k, v] : read_config(args[i + 1])) {
                bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
                    return a == "--" + k || a.rfind("--" + k + "=", 0) == 0;
                });
                if (given) continue;
                args.push_back("--" + k);
                if (v != "true") args.push_back(v);
            }
        } catch (const CLI::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return ArgError;
        }
        break;
    }

    CLI::App app{"numerical toolkit for the su_q(2) deformation at q = e^{is}", "qdef"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    const char* env_out = std::getenv("QDEF_OUTPUT_DIR");
    std::string out_dir = env_out ? env_out : ".";
    std::string name, config, manifest;
    int threads = (int)std::max(1u, std::thread::hardware_concurrency());

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", out_dir, "output directory (default $QDEF_OUTPUT_DIR or .)");
        sub->add_option("--name", name, "output file stem (default: subcommand name)");
        sub->add_option("--config", config, "key=value defaults file");
        sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
    };

    ClassifyArgs ca;
    auto* s_cls = app.add_subcommand("classify", "classify unitary representations for (s, c)");
    s_cls->add_option("--s", ca.s, "deformation parameter")->required();
    s_cls->add_option("--c", ca.c, "Casimir value");
    s_cls->add_option("--c-range", ca.c_range, "Casimir sweep start:stop:step");
    common(s_cls);

    RepArgs ra;
    auto* s_rep = app.add_subcommand("rep", "build representation matrices and verify the algebra");
    s_rep->add_option("--s", ra.s)->required();
    s_rep->add_option("--c", ra.c)->required();
    s_rep->add_option("--basis", ra.basis, "m labels: comma list or start:stop:step");
    s_rep->add_option("--margin", ra.margin, "edge rows dropped from residuals (-1 automatic)");
    s_rep->add_flag("--verify", ra.verify, "exit 3 when a residual exceeds 1e-10");
    common(s_rep);

    PotentialArgs pa;
    auto* s_pot = app.add_subcommand("potential", "tabulate the potential V(r; m, s)");
    add_potential_options(s_pot, pa, true);
    common(s_pot);

    SpectrumArgs sa;
    auto* s_spec = app.add_subcommand("spectrum", "hard-wall eigenvalues of a potential");
    add_potential_options(s_spec, sa.pot, false);
    s_spec->add_option("--input", sa.input, "potential CSV from the potential subcommand");
    s_spec->add_option("--oracle", sa.oracle, "box or poschl-teller");
    s_spec->add_option("--L", sa.L, "box length");
    s_spec->add_option("--lambda", sa.lambda, "Poschl-Teller strength");
    s_spec->add_option("--oracle-grid", sa.oracle_grid, "oracle grid start:stop:step");
    s_spec->add_option("--n", sa.n, "states per cell")->check(CLI::PositiveNumber);
    s_spec->add_option("--min-cell", sa.min_cell, "smallest cell solved, in samples");
    s_spec->add_flag("--vectors", sa.vectors, "also write eigenvectors");
    common(s_spec);

    FlowArgs fa;
    auto* s_flow = app.add_subcommand("flow", "spectral flow [2m](s)");
    s_flow->add_option("--m-max", fa.m_max);
    s_flow->add_option("--s-grid", fa.s_grid);
    s_flow->add_option("--tol", fa.tol);
    s_flow->add_option("--gap", fa.gap, "tangential near-crossing threshold");
    common(s_flow);

    SurfaceArgs ua;
    auto* s_surf = app.add_subcommand("surface", "Casimir level-set sections and their connectivity");
    s_surf->add_option("--c", ua.c)->required();
    s_surf->add_option("--s", ua.s);
    s_surf->add_option("--s-grid", ua.s_grid);
    s_surf->add_option("--periods", ua.periods);
    s_surf->add_option("--spp", ua.spp, "samples per period");
    common(s_surf);

    HopfArgs ha;
    auto* s_hopf = app.add_subcommand("hopf", "generalized deformation: window, representation, Hopf checks");
    s_hopf->add_option("--alpha", ha.alpha);
    s_hopf->add_option("--c", ha.c);
    s_hopf->add_option("--b", ha.b, "constant:<b> or sech:<f_lo>:<f_hi>");
    s_hopf->add_option("--dim", ha.dim)->check(CLI::Range(3, 400));
    s_hopf->add_flag("--verify", ha.verify, "exit 3 when coassociativity or counit exceed 1e-10");
    common(s_hopf);

    std::string replay_out;
    auto* s_replay = app.add_subcommand("replay", "re-run a manifest and compare output digests");
    s_replay->add_option("manifest", manifest, "manifest JSON")->required();
    s_replay->add_option("--out", replay_out, "directory for regenerated files");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return ArgError;
    }

    if (s_replay->parsed()) {
        try {
            return replay(manifest, replay_out, prog);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return ArgError;
        }
    }

    CLI::App* sub = app.get_subcommands().front();
    Context ctx;
    ctx.out_dir = out_dir;
    ctx.name = name.empty() ? sub->get_name() : name;
    ctx.threads = threads;
    try {
        fs::create_directories(ctx.out_dir);
        if (sub == s_cls) cmd_classify(ca, ctx);
        else if (sub == s_rep) cmd_rep(ra, ctx);
        else if (sub == s_pot) cmd_potential(pa, ctx);
        else if (sub == s_spec) cmd_spectrum(sa, ctx);
        else if (sub == s_flow) cmd_flow(fa, ctx);
        else if (sub == s_surf) cmd_surface(ua, ctx);
        else if (sub == s_hopf) cmd_hopf(ha, ctx);
        write_manifest(sub->get_name(), collect_params(sub), ctx);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ArgError;
    } catch (const UnitarityViolation& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return VerifyFailure;
    } catch (const VerificationFailed& e) {
        write_manifest(sub->get_name(), collect_params(sub), ctx);
        std::cerr << "verification failed: " << e.what() << "\n";
        return VerifyFailure;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ArgError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: malformed number (" << e.what() << ")\n";
        return ArgError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return NumericFailure;
    }
    return Ok;
}

} // namespace qdef::cli
