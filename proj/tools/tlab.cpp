#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tlab/verify.hpp"

using namespace tlab;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitUnknown = 4;

struct Options {
    bool json_out = false;
    bool table_out = false;
    bool require_exact = false;
    std::string alpha = "1";
    std::string max_alpha = "w";
    int depth = 16;
    int breadth = 2;
    std::uint64_t seed = 1;
};

json load_doc(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] != '{' && arg[0] != '[') {
        std::ifstream in(arg);
        if (!in) throw SchemaError("cannot open input: " + arg);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try {
        return json::parse(text);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("JSON parse error: ") + e.what());
    }
}

Ordinal parse_ordinal(const std::string& s) {
    try {
        return Ordinal::parse(s);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("ordinal parse error: ") + e.what());
    }
}

void print_table(const json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            print_table(v, prefix.empty() ? k : prefix + "." + k);
    } else if (j.is_array()) {
        int i = 0;
        for (const auto& v : j) print_table(v, prefix + "[" + std::to_string(i++) + "]");
    } else {
        std::cout << prefix << " = " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

// Unknown verdicts stay first-class in the output; --require-exact turns any
// of them (or an inexact/indefinite payload) into exit code 4
bool has_unknown(const json& j) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (k == "verdict" && v == "unknown") return true;
            if ((k == "exact" || k == "definite" || k == "all_match") && v == false) return true;
            if (k == "plain" && v == "unknown") return true;
            if (has_unknown(v)) return true;
        }
    } else if (j.is_array()) {
        for (const auto& v : j)
            if (has_unknown(v)) return true;
    }
    return false;
}

int emit(const Options& opt, const std::string& command, json config, json result) {
    config["fundamental_rule"] = fundamental_rule_id();
    json report;
    report["command"] = command;
    report["config"] = std::move(config);
    report["result"] = std::move(result);
    bool as_json = opt.json_out;
    if (!opt.json_out && !opt.table_out) {
        const char* env = std::getenv("TLAB_FORMAT");
        as_json = env && std::string(env) == "json";
    }
    if (as_json)
        std::cout << report.dump(2) << "\n";
    else
        print_table(report, "");
    if (opt.require_exact && has_unknown(report.at("result"))) return kExitUnknown;
    return 0;
}

json tower_levels_json(const TowerPtr& t, int depth) {
    json levels = json::array();
    auto maxlev = tower_max_level(*t);
    int top = maxlev ? std::min(depth, *maxlev) : depth;
    for (int n = 0; n <= top; ++n)
        levels.push_back(json{{"level", n},
                              {"dim", tower_dim(*t, n)},
                              {"rel", lattice_to_json(tower_rel(*t, n))}});
    return levels;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact tower and colimit invariants"};
    app.require_subcommand(1);
    app.fallthrough();
    Options opt;
    app.add_flag("--json", opt.json_out, "emit the report as JSON");
    app.add_flag("--table", opt.table_out, "emit the report as a flat table");
    app.add_flag("--require-exact", opt.require_exact,
                 "exit 4 when the result carries an Unknown verdict or inexact value");

    std::string input, input2, suite, ord_a, ord_b;

    auto* lin = app.add_subcommand("lin", "exact integer linear algebra");
    for (const char* name : {"hnf", "snf", "meet", "join", "saturate", "eventual-image"}) {
        auto* sc = lin->add_subcommand(name);
        sc->add_option("input", input, "matrix/lattice JSON (path or inline)")->required();
        if (std::string(name) == "meet" || std::string(name) == "join")
            sc->add_option("other", input2, "second lattice")->required();
    }

    auto* ord = app.add_subcommand("ord", "ordinal arithmetic");
    int fund_n = 0;
    auto* ordf = ord->add_subcommand("fundamental");
    ordf->add_option("ordinal", ord_a)->required();
    ordf->add_option("n", fund_n)->required();
    auto* ordc = ord->add_subcommand("compare");
    ordc->add_option("a", ord_a)->required();
    ordc->add_option("b", ord_b)->required();

    auto* tree = app.add_subcommand("tree", "tree ranks and index trees");
    bool plain = true;
    int max_index = 4, max_depth = 3;
    for (const char* name : {"rank", "game"})
        tree->add_subcommand(name)->add_option("input", input)->required();
    for (const char* name : {"index", "linearize"}) {
        auto* sc = tree->add_subcommand(name);
        sc->add_option("--alpha", opt.alpha)->required();
        sc->add_flag("--plain,!--forest", plain, "plain index tree (default)");
        if (std::string(name) == "linearize") {
            sc->add_option("--max-index", max_index);
            sc->add_option("--max-depth", max_depth);
        }
    }

    auto* tower = app.add_subcommand("tower", "derived towers and lengths");
    for (const char* name :
         {"derive", "length", "ml", "fishbone-build", "fishbone-verify", "reduce"}) {
        auto* sc = tower->add_subcommand(name);
        sc->add_option("input", input, "tower JSON (path or inline)")->required();
        sc->add_option("--depth", opt.depth);
        if (std::string(name) == "derive") sc->add_option("--alpha", opt.alpha);
        if (std::string(name) == "length") sc->add_option("--max-alpha", opt.max_alpha);
    }

    auto* mod = app.add_subcommand("mod", "colimit-presented flat modules");
    int xi_digits = 64, xi_stages = 0;
    std::string xi_p = "5";
    for (const char* name :
         {"dual", "projective", "length", "xi", "wedge", "sigma-partial", "resolution"}) {
        auto* sc = mod->add_subcommand(name);
        if (std::string(name) == "xi") {
            sc->add_option("input", input, "digit-stream JSON; omit to sample one");
            sc->add_option("--p", xi_p);
            sc->add_option("--digits", xi_digits);
            sc->add_option("--stages", xi_stages, "0 = all available");
            sc->add_option("--seed", opt.seed);
        } else {
            sc->add_option("input", input, "colimit JSON (path or inline)")->required();
        }
        sc->add_option("--depth", opt.depth);
        if (std::string(name) == "length") sc->add_option("--max-alpha", opt.max_alpha);
        if (std::string(name) == "sigma-partial" || std::string(name) == "resolution")
            sc->add_option("--alpha", opt.alpha);
        if (std::string(name) == "resolution") sc->add_option("--breadth", opt.breadth);
    }

    auto* ver = app.add_subcommand("verify", "self-check verification suites");
    ver->add_option("suite", suite, "linalg|ordinals|trees|towers|fishbone|ext|xi|sigma")
        ->required();
    ver->add_option("--seed", opt.seed);
    ver->add_option("--depth", opt.depth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    try {
        json cfg{{"depth", opt.depth}};
        if (lin->parsed()) {
            auto* sc = lin->get_subcommands().at(0);
            const std::string& name = sc->get_name();
            if (name == "hnf" || name == "snf" || name == "eventual-image") {
                Mat m = mat_from_json(load_doc(input));
                if (name == "hnf") {
                    HnfResult h = hnf(m);
                    return emit(opt, "lin hnf", cfg,
                                json{{"h", mat_to_json(h.h)},
                                     {"u", mat_to_json(h.u)},
                                     {"rank", h.rank}});
                }
                if (name == "snf") {
                    SnfResult s = snf(m);
                    json diag = json::array();
                    for (const Int& d : s.diag) diag.push_back(int_to_json(d));
                    return emit(opt, "lin snf", cfg,
                                json{{"s", mat_to_json(s.s)},
                                     {"u", mat_to_json(s.u)},
                                     {"v", mat_to_json(s.v)},
                                     {"diag", std::move(diag)}});
                }
                if (!m.is_square()) throw std::invalid_argument("eventual-image: square input only");
                StableImage s = stable_image(m, Lattice::zero(m.rows()), Ring::Z());
                cfg["ring"] = ring_to_json(Ring::Z());
                return emit(opt, "lin eventual-image", cfg,
                            json{{"lattice", lattice_to_json(s.lat)}, {"certified", s.certified}});
            }
            if (name == "saturate") {
                Lattice l = lattice_from_json(load_doc(input));
                return emit(opt, "lin saturate", cfg, json{{"lattice", lattice_to_json(saturate(l))}});
            }
            Lattice a = lattice_from_json(load_doc(input));
            Lattice b = lattice_from_json(load_doc(input2));
            Lattice r = name == "meet" ? lat_intersect(a, b) : lat_sum(a, b);
            return emit(opt, "lin " + name, cfg, json{{"lattice", lattice_to_json(r)}});
        }
        if (ord->parsed()) {
            auto* sc = ord->get_subcommands().at(0);
            if (sc->get_name() == "fundamental") {
                Ordinal a = parse_ordinal(ord_a);
                json c{{"ordinal", a.format()}, {"n", fund_n}};
                return emit(opt, "ord fundamental", c,
                            json{{"value", fundamental(a, fund_n).format()}});
            }
            Ordinal a = parse_ordinal(ord_a), b = parse_ordinal(ord_b);
            return emit(opt, "ord compare", json{{"a", a.format()}, {"b", b.format()}},
                        json{{"cmp", a.cmp(b)}});
        }
        if (tree->parsed()) {
            auto* sc = tree->get_subcommands().at(0);
            const std::string& name = sc->get_name();
            if (name == "rank" || name == "game") {
                FiniteTree t = tree_from_json(load_doc(input));
                json c{{"nodes", t.size()}};
                if (name == "rank")
                    return emit(opt, "tree rank", c,
                                json{{"rank", int_to_json(rank_finite(t))}});
                GameRanks g = game_ranks(GameSpec{t});
                return emit(opt, "tree game", c,
                            json{{"game_rank", int_to_json(g.game_rank)},
                                 {"tree_rank", int_to_json(rank_finite(t))}});
            }
            Ordinal alpha = parse_ordinal(opt.alpha);
            IndexTree t = build_index_tree(alpha, plain);
            json c{{"alpha", alpha.format()}, {"plain", plain}};
            if (name == "index")
                return emit(opt, "tree index", c,
                            json{{"rank", rank_index_tree(t).format()}});
            json labels;
            std::function<void(NodeAddr&, int)> walk = [&](NodeAddr& addr, int d) {
                std::string key = "[";
                for (size_t i = 0; i < addr.size(); ++i)
                    key += (i ? "," : "") + addr[i].str();
                key += "]";
                try {
                    labels[key] = linearize(t, addr).format();
                } catch (const std::exception&) {
                    return;  // address not in the tree
                }
                if (d >= max_depth || node_is_leaf(t, addr)) return;
                for (int k = 0; k < max_index; ++k) {
                    addr.push_back(k);
                    walk(addr, d + 1);
                    addr.pop_back();
                }
            };
            NodeAddr root;
            walk(root, 0);
            c["max_index"] = max_index;
            c["max_depth"] = max_depth;
            return emit(opt, "tree linearize", c, json{{"labels", std::move(labels)}});
        }
        if (tower->parsed()) {
            auto* sc = tower->get_subcommands().at(0);
            const std::string& name = sc->get_name();
            TowerPtr t = tower_from_json(load_doc(input));
            cfg["ring"] = ring_to_json(t->ring);
            if (name == "derive") {
                Ordinal alpha = parse_ordinal(opt.alpha);
                cfg["alpha"] = alpha.format();
                return emit(opt, "tower derive", cfg,
                            derived_levels_to_json(derived_tower(t, alpha, opt.depth)));
            }
            if (name == "length") {
                Ordinal ma = parse_ordinal(opt.max_alpha);
                cfg["max_alpha"] = ma.format();
                return emit(opt, "tower length", cfg,
                            length_report_to_json(ml_length(t, ma, opt.depth)));
            }
            if (name == "ml")
                return emit(opt, "tower ml", cfg,
                            verdict_to_json(mittag_leffler(t, opt.depth)));
            if (name == "reduce")
                return emit(opt, "tower reduce", cfg,
                            json{{"levels", tower_levels_json(reduce(t, opt.depth), opt.depth)}});
            if (name == "fishbone-build") {
                if (t->tail != TowerSpec::Tail::Fishbone)
                    throw std::invalid_argument("fishbone-build: tower tail must be a fishbone");
                FishboneResult r = fishbone_build(t->spine, t->ribs, true, opt.depth);
                return emit(opt, "tower fishbone-build", cfg,
                            json{{"straightness", straightness_to_json(r.straightness)},
                                 {"levels", tower_levels_json(r.tower, opt.depth)}});
            }
            return emit(opt, "tower fishbone-verify", cfg,
                        fishbone_verify_to_json(fishbone_verify(t, opt.depth)));
        }
        if (mod->parsed()) {
            auto* sc = mod->get_subcommands().at(0);
            const std::string& name = sc->get_name();
            if (name == "xi") {
                PAdicDigits d = input.empty()
                                    ? PAdicDigits::random(Int(xi_p), xi_digits, opt.seed)
                                    : digits_from_json(load_doc(input));
                int stages = xi_stages > 0 ? xi_stages : d.stages() - 1;
                auto xi = xi_module(d, stages);
                cfg["seed"] = opt.seed;
                cfg["stages"] = stages;
                cfg["ring"] = ring_to_json(xi->ring);
                return emit(opt, "mod xi", cfg,
                            json{{"module", colim_to_json(xi)},
                                 {"well_pointed", well_pointed_to_json(xi_well_pointed(xi))},
                                 {"coreduced", verdict_to_json(coreduced_check(xi, opt.depth))}});
            }
            ColimPtr c = colim_from_json(load_doc(input));
            cfg["ring"] = ring_to_json(c->ring);
            if (name == "dual")
                return emit(opt, "mod dual", cfg, tower_to_json(dual_tower(c)));
            if (name == "projective")
                return emit(opt, "mod projective", cfg,
                            verdict_to_json(is_projective(c, opt.depth)));
            if (name == "length") {
                Ordinal ma = parse_ordinal(opt.max_alpha);
                cfg["max_alpha"] = ma.format();
                return emit(opt, "mod length", cfg,
                            ext_report_to_json(r_projective_length(c, ma, opt.depth)));
            }
            if (name == "wedge") {
                if (c->tail != ColimSpec::Tail::Wedge)
                    throw std::invalid_argument("wedge: input must have a wedge tail");
                json stages = json::array();
                for (int n = 0; n <= *colim_max_stage(*c); ++n) {
                    json s{{"stage", n}, {"rank", colim_rank(*c, n)}};
                    if (n < *colim_max_stage(*c)) s["pure"] = colim_pure_at(*c, n);
                    stages.push_back(std::move(s));
                }
                return emit(opt, "mod wedge", cfg,
                            json{{"stages", std::move(stages)},
                                 {"tree_length_certificate",
                                  tree_length_certificate(*c).format()}});
            }
            Ordinal alpha = parse_ordinal(opt.alpha);
            cfg["alpha"] = alpha.format();
            if (name == "sigma-partial")
                return emit(opt, "mod sigma-partial", cfg,
                            sigma_report_to_json(sigma_partial(c, alpha, opt.depth)));
            cfg["breadth"] = opt.breadth;
            return emit(opt, "mod resolution", cfg,
                        resolution_to_json(phantom_resolution(c, alpha, opt.breadth, opt.depth)));
        }
        if (ver->parsed()) {
            verify::SuiteResult r = verify::run_suite(suite, opt.seed, opt.depth);
            json c{{"suite", suite}, {"seed", opt.seed}, {"depth", opt.depth}};
            int code = emit(opt, "verify " + suite, c, r.report);
            if (!r.pass) return 1;
            return code;
        }
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPrecondition;
    }
    return 0;
}
