#include "tlab/json_io.hpp"

namespace tlab {

namespace {

const json& require(const json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key))
        throw SchemaError(std::string(what) + ": missing \"" + key + "\"");
    return j.at(key);
}

}  // namespace

json int_to_json(const Int& v) {
    static const Int lo = std::numeric_limits<std::int64_t>::min();
    static const Int hi = std::numeric_limits<std::int64_t>::max();
    if (v >= lo && v <= hi) return v.convert_to<std::int64_t>();
    return v.str();
}

Int int_from_json(const json& j) {
    if (j.is_number_integer()) return Int(j.get<std::int64_t>());
    if (j.is_string()) {
        try {
            return Int(j.get<std::string>());
        } catch (const std::exception&) {
            throw SchemaError("not an integer: " + j.dump());
        }
    }
    throw SchemaError("expected an integer, got " + j.dump());
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(int_to_json(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return json{{"rows", std::move(rows)}};
}

Mat mat_from_json(const json& j) {
    const json& rows = require(j, "rows", "matrix");
    if (!rows.is_array()) throw SchemaError("matrix: \"rows\" must be an array");
    int r = int(rows.size());
    int c = r ? int(rows[0].size()) : 0;
    Mat m(r, c);
    for (int i = 0; i < r; ++i) {
        if (int(rows[size_t(i)].size()) != c) throw SchemaError("matrix: ragged rows");
        for (int k = 0; k < c; ++k) m.at(i, k) = int_from_json(rows[size_t(i)][size_t(k)]);
    }
    return m;
}

json lattice_to_json(const Lattice& l) {
    json j;
    j["dim"] = l.dim();
    j["basis"] = mat_to_json(l.basis())["rows"];
    return j;
}

Lattice lattice_from_json(const json& j) {
    int dim = require(j, "dim", "lattice").get<int>();
    json gens{{"rows", require(j, "basis", "lattice")}};
    Mat b = mat_from_json(gens);
    if (b.rows() == 0) return Lattice::zero(dim);
    if (b.cols() != dim) throw SchemaError("lattice: basis width != dim");
    return Lattice::from_rows(dim, b);
}

json ring_to_json(const Ring& r) {
    json j;
    if (r.is_local()) {
        j["local_prime"] = int_to_json(r.local_prime);
    } else {
        json primes = json::array();
        for (const Int& p : r.inverted) primes.push_back(int_to_json(p));
        j["inverted_primes"] = std::move(primes);
    }
    return j;
}

Ring ring_from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("ring: expected an object");
    if (j.contains("local_prime")) return Ring::local(int_from_json(j.at("local_prime")));
    std::vector<Int> primes;
    if (j.contains("inverted_primes"))
        for (const json& p : j.at("inverted_primes")) primes.push_back(int_from_json(p));
    return Ring::invert(std::move(primes));
}

json ordinal_to_json(const Ordinal& o) { return o.format(); }

Ordinal ordinal_from_json(const json& j) {
    if (!j.is_string()) throw SchemaError("ordinal: expected a string");
    try {
        return Ordinal::parse(j.get<std::string>());
    } catch (const std::exception& e) {
        throw SchemaError(std::string("ordinal: ") + e.what());
    }
}

json tree_to_json(const FiniteTree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes()) nodes.push_back(n);
    return json{{"nodes", std::move(nodes)}};
}

FiniteTree tree_from_json(const json& j) {
    const json& nodes = require(j, "nodes", "tree");
    std::set<std::vector<int>> out;
    for (const json& n : nodes) out.insert(n.get<std::vector<int>>());
    try {
        return FiniteTree::from_nodes(out);
    } catch (const std::exception& e) {
        throw SchemaError(std::string("tree: ") + e.what());
    }
}

json tower_to_json(const TowerPtr& t) {
    if (!t) throw SchemaError("tower: null spec");
    json j;
    j["ring"] = ring_to_json(t->ring);
    json pre = json::array();
    for (const auto& s : t->prefix)
        pre.push_back(json{{"dim", s.dim}, {"bond", mat_to_json(s.bond)}});
    j["prefix"] = std::move(pre);
    json tail;
    switch (t->tail) {
        case TowerSpec::Tail::Zero: tail["kind"] = "zero"; break;
        case TowerSpec::Tail::Constant:
            tail["kind"] = "constant";
            tail["dim"] = t->tail_dim;
            tail["bond"] = mat_to_json(t->tail_bond);
            break;
        case TowerSpec::Tail::Sum:
            tail["kind"] = "sum";
            tail["left"] = tower_to_json(t->left);
            tail["right"] = tower_to_json(t->right);
            break;
        case TowerSpec::Tail::Fishbone: {
            tail["kind"] = "fishbone";
            tail["spine"] = tower_to_json(t->spine);
            json ribs = json::array();
            for (const auto& r : t->ribs) ribs.push_back(tower_to_json(r));
            tail["ribs"] = std::move(ribs);
            break;
        }
        case TowerSpec::Tail::Truncated: tail["kind"] = "truncated"; break;
        case TowerSpec::Tail::Shift:
            tail["kind"] = "shift";
            tail["inner"] = tower_to_json(t->inner);
            tail["by"] = t->shift_k;
            break;
    }
    j["tail"] = std::move(tail);
    return j;
}

TowerPtr tower_from_json(const json& j) {
    Ring ring = ring_from_json(require(j, "ring", "tower"));
    std::vector<PrefixStage> prefix;
    if (j.contains("prefix"))
        for (const json& s : j.at("prefix"))
            prefix.push_back({require(s, "dim", "tower prefix").get<int>(),
                              mat_from_json(require(s, "bond", "tower prefix"))});
    const json& tail = require(j, "tail", "tower");
    std::string kind = require(tail, "kind", "tower tail").get<std::string>();
    try {
        if (kind == "zero") {
            if (prefix.empty()) return TowerSpec::zero(ring);
            // a prefix followed by zero levels is a degenerate constant tail
            return TowerSpec::constant(ring, 0, Mat(0, 0), std::move(prefix));
        }
        if (kind == "constant")
            return TowerSpec::constant(ring, require(tail, "dim", "constant tail").get<int>(),
                                       mat_from_json(require(tail, "bond", "constant tail")),
                                       std::move(prefix));
        if (kind == "sum")
            return TowerSpec::sum(tower_from_json(require(tail, "left", "sum tail")),
                                  tower_from_json(require(tail, "right", "sum tail")));
        if (kind == "fishbone") {
            std::vector<TowerPtr> ribs;
            for (const json& r : require(tail, "ribs", "fishbone tail"))
                ribs.push_back(tower_from_json(r));
            return TowerSpec::fishbone(tower_from_json(require(tail, "spine", "fishbone tail")),
                                       ribs);
        }
        if (kind == "truncated") return TowerSpec::truncated(ring, std::move(prefix));
        if (kind == "shift")
            return TowerSpec::shift(tower_from_json(require(tail, "inner", "shift tail")),
                                    require(tail, "by", "shift tail").get<int>());
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(std::string("tower: ") + e.what());
    }
    throw SchemaError("tower: unknown tail kind \"" + kind + "\"");
}

json digits_to_json(const PAdicDigits& d) {
    json j;
    j["p"] = int_to_json(d.p);
    json ds = json::array();
    for (const Int& c : d.digits) ds.push_back(int_to_json(c));
    j["digits"] = std::move(ds);
    j["unit_mod_p"] = d.unit_mod_p;
    return j;
}

PAdicDigits digits_from_json(const json& j) {
    PAdicDigits d;
    d.p = int_from_json(require(j, "p", "digits"));
    for (const json& c : require(j, "digits", "digits")) d.digits.push_back(int_from_json(c));
    d.unit_mod_p = j.value("unit_mod_p", true);
    try {
        d.validate();
    } catch (const std::exception& e) {
        throw SchemaError(std::string("digits: ") + e.what());
    }
    return d;
}

json colim_to_json(const ColimPtr& c) {
    if (!c) throw SchemaError("colim: null spec");
    json j;
    j["ring"] = ring_to_json(c->ring);
    json tail;
    switch (c->tail) {
        case ColimSpec::Tail::Truncated: tail["kind"] = "truncated"; break;
        case ColimSpec::Tail::Constant:
            tail["kind"] = "constant";
            tail["rank"] = c->tail_rank;
            tail["transition"] = mat_to_json(c->tail_transition);
            break;
        case ColimSpec::Tail::Xi:
            tail["kind"] = "xi";
            tail["digits"] = digits_to_json(c->xi);
            tail["stages"] = int(c->prefix.size());
            break;
        case ColimSpec::Tail::Wedge: {
            tail["kind"] = "wedge";
            tail["m1_rank"] = c->m1_rank;
            json arms = json::array(), psi = json::array();
            for (const auto& a : c->arms) arms.push_back(colim_to_json(a));
            for (const auto& p : c->psi) psi.push_back(mat_to_json(p));
            tail["arms"] = std::move(arms);
            tail["psi"] = std::move(psi);
            break;
        }
        case ColimSpec::Tail::Sum:
            tail["kind"] = "sum";
            tail["left"] = colim_to_json(c->left);
            tail["right"] = colim_to_json(c->right);
            break;
    }
    // wedge and xi stages are derived data; emit the explicit ones only
    if (c->tail == ColimSpec::Tail::Truncated || c->tail == ColimSpec::Tail::Constant) {
        json pre = json::array();
        for (const auto& s : c->prefix)
            pre.push_back(json{{"rank", s.rank}, {"transition", mat_to_json(s.transition)}});
        j["prefix"] = std::move(pre);
    }
    j["tail"] = std::move(tail);
    return j;
}

ColimPtr colim_from_json(const json& j) {
    Ring ring = ring_from_json(require(j, "ring", "colim"));
    std::vector<ColimStage> prefix;
    if (j.contains("prefix"))
        for (const json& s : j.at("prefix"))
            prefix.push_back({require(s, "rank", "colim prefix").get<int>(),
                              mat_from_json(require(s, "transition", "colim prefix"))});
    const json& tail = require(j, "tail", "colim");
    std::string kind = require(tail, "kind", "colim tail").get<std::string>();
    try {
        if (kind == "truncated") return ColimSpec::truncated(ring, std::move(prefix));
        if (kind == "constant")
            return ColimSpec::constant(ring, require(tail, "rank", "constant tail").get<int>(),
                                       mat_from_json(require(tail, "transition", "constant tail")),
                                       std::move(prefix));
        if (kind == "xi") {
            PAdicDigits d = digits_from_json(require(tail, "digits", "xi tail"));
            int stages = tail.value("stages", d.stages() - 1);
            return xi_module(d, stages);
        }
        if (kind == "wedge") {
            std::vector<ColimPtr> arms;
            std::vector<Mat> psi;
            for (const json& a : require(tail, "arms", "wedge tail"))
                arms.push_back(colim_from_json(a));
            for (const json& p : require(tail, "psi", "wedge tail")) psi.push_back(mat_from_json(p));
            return wedge_sum(require(tail, "m1_rank", "wedge tail").get<int>(), arms, psi);
        }
        if (kind == "sum")
            return ColimSpec::sum(colim_from_json(require(tail, "left", "sum tail")),
                                  colim_from_json(require(tail, "right", "sum tail")));
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(std::string("colim: ") + e.what());
    }
    throw SchemaError("colim: unknown tail kind \"" + kind + "\"");
}

json verdict_to_json(const Verdict& v) {
    const char* k = v.holds() ? "holds" : v.fails() ? "fails" : "unknown";
    return json{{"verdict", k}, {"evidence", v.evidence}};
}

json length_report_to_json(const LengthReport& r) {
    json j;
    j["length"] = ordinal_to_json(r.length);
    j["definite"] = r.definite;
    j["plain"] = r.plain == LengthReport::Plain::Yes
                     ? "yes"
                     : r.plain == LengthReport::Plain::No ? "no" : "unknown";
    j["certificate"] = r.certificate;
    return j;
}

json derived_levels_to_json(const DerivedLevels& d) {
    json j;
    j["alpha"] = ordinal_to_json(d.alpha);
    json levels = json::array();
    for (const auto& v : d.levels)
        levels.push_back(json{{"lattice", lattice_to_json(v.lat)}, {"exact", v.exact}});
    j["levels"] = std::move(levels);
    j["note"] = d.note;
    return j;
}

json straightness_to_json(const StraightnessReport& s) {
    json j;
    j["verdict"] = verdict_to_json(s.verdict);
    json beta = json::array();
    for (const auto& b : s.beta) beta.push_back(ordinal_to_json(b));
    j["beta"] = std::move(beta);
    j["sup_beta"] = ordinal_to_json(s.sup_beta);
    j["detail"] = s.detail;
    return j;
}

json fishbone_verify_to_json(const FishboneVerifyReport& r) {
    json j;
    json entries = json::array();
    for (const auto& e : r.entries)
        entries.push_back(
            json{{"beta", ordinal_to_json(e.beta)}, {"level", e.level}, {"match", e.match}});
    j["entries"] = std::move(entries);
    j["all_match"] = r.all_match;
    return j;
}

json ext_report_to_json(const ExtReport& r) {
    json j;
    j["length"] = length_report_to_json(r.length);
    j["coreduced"] = verdict_to_json(r.coreduced);
    j["projective"] = verdict_to_json(r.projective);
    j["note"] = r.note;
    return j;
}

json well_pointed_to_json(const WellPointedReport& r) {
    return json{{"holds", r.holds}, {"stages", r.stages}, {"note", r.note}};
}

json sigma_report_to_json(const SigmaReport& r) {
    json j;
    json sig = json::array();
    for (const auto& l : r.sigma) sig.push_back(lattice_to_json(l));
    j["sigma"] = std::move(sig);
    j["partial"] = colim_to_json(r.partial);
    j["exact"] = r.exact;
    j["consistency"] = verdict_to_json(r.consistency);
    j["note"] = r.note;
    return j;
}

json resolution_to_json(const PhantomResolutionReport& r) {
    json j;
    json pieces = json::array();
    for (const auto& p : r.pieces)
        pieces.push_back(json{{"n", p.n},
                              {"piece", colim_to_json(p.piece)},
                              {"purity", verdict_to_json(p.purity)}});
    j["pieces"] = std::move(pieces);
    j["tree_bound"] = ordinal_to_json(r.tree_bound);
    j["note"] = r.note;
    return j;
}

}  // namespace tlab
