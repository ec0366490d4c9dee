#include "tlab/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace tlab {

std::set<int> derivative(const Relation& r, const std::set<int>& a) {
    std::set<int> out;
    for (int y : r.carrier)
        for (int x : a)
            if (r.pairs.count({x, y})) {
                out.insert(y);
                break;
            }
    return out;
}

DerivativeRun iterate_derivative(const Relation& r) {
    DerivativeRun run;
    std::set<int> cur(r.carrier.begin(), r.carrier.end());
    run.steps.push_back(cur);
    for (;;) {
        std::set<int> next = derivative(r, cur);
        if (next.empty()) {
            run.steps.push_back(next);
            run.well_founded = true;
            run.rank = Int(run.steps.size()) - 1;
            return run;
        }
        if (next == cur) {
            run.well_founded = false;
            return run;
        }
        run.steps.push_back(next);
        cur = next;
    }
}

FiniteTree FiniteTree::from_nodes(const std::set<std::vector<int>>& nodes) {
    for (auto& n : nodes)
        if (!n.empty()) {
            std::vector<int> parent(n.begin(), n.end() - 1);
            if (!nodes.count(parent)) throw std::invalid_argument("tree: not prefix-closed");
        }
    if (!nodes.empty() && !nodes.count({})) throw std::invalid_argument("tree: missing root");
    FiniteTree t;
    t.nodes_ = nodes;
    return t;
}

std::vector<std::vector<int>> FiniteTree::children(const std::vector<int>& n) const {
    std::vector<std::vector<int>> out;
    for (auto& m : nodes_)
        if (m.size() == n.size() + 1 && std::equal(n.begin(), n.end(), m.begin())) out.push_back(m);
    return out;
}

namespace {

Int node_rank(const FiniteTree& t, const std::vector<int>& n) {
    Int r = 0;
    for (auto& c : t.children(n)) {
        Int cr = node_rank(t, c) + 1;
        if (cr > r) r = cr;
    }
    return r;
}

}  // namespace

Int rank_finite(const FiniteTree& t) {
    if (t.empty()) return 0;
    return node_rank(t, {}) + 1;
}

GameRanks game_ranks(const GameSpec& g) {
    GameRanks out;
    // literal recursion over the finite alphabet: a position outside the
    // payoff tree is immediately winning for Alice (both ranks 0), so
    // sigma(x) = min over moves of pi(xz) + 1 and pi(x) = max of sigma(xz) + 1.
    // The escape move always exists, which collapses sigma to 1 inside the
    // tree and pi to 1 or 2 depending on whether some move stays inside.
    for (auto& x : g.payoff.nodes()) {
        out.sigma[x] = 1;
        out.pi[x] = g.payoff.children(x).empty() ? 1 : 2;
    }
    out.game_rank = rank_finite(g.payoff);
    return out;
}

IndexTree build_index_tree(const Ordinal& alpha, bool plain) {
    if (alpha.is_zero()) throw std::invalid_argument("index tree: alpha must be positive");
    if (plain && !alpha.is_successor())
        throw std::invalid_argument("index tree: plain trees need a successor ordinal");
    return IndexTree{alpha, plain};
}

namespace {

// ordinal of the plain subtree chosen by child index n under a node whose
// ordinal is beta + 1 (children are I_{beta_n}^plain, constant for
// successor beta); beta = 0 means a leaf
Ordinal child_ordinal(const Ordinal& beta, const Int& n) {
    if (beta.is_zero()) throw std::invalid_argument("index tree: address below a leaf");
    return fundamental(beta, n);
}

}  // namespace

Ordinal node_ordinal(const IndexTree& t, const NodeAddr& a) {
    size_t pos = 0;
    Ordinal cur;
    if (t.plain) {
        cur = t.alpha;
    } else {
        if (a.empty()) throw std::invalid_argument("index tree: a forest has no root");
        cur = fundamental(t.alpha, a[0]);  // component I_{alpha_n}^plain
        pos = 1;
    }
    for (; pos < a.size(); ++pos) cur = child_ordinal(cur.predecessor(), a[pos]);
    return cur;
}

Ordinal node_label(const IndexTree& t, const NodeAddr& a) {
    return node_ordinal(t, a).predecessor();
}

bool node_is_leaf(const IndexTree& t, const NodeAddr& a) {
    return node_ordinal(t, a) == Ordinal::from_nat(1);
}

bool in_partial(const IndexTree& t, const NodeAddr& a, const Ordinal& gamma) {
    // unfolding the recursion: partial_gamma of I_{gamma+1}^plain is the root,
    // partial_gamma of I_alpha^plain for larger alpha adds the root and
    // recurses into the component forest, and pairs (i; n) recurse into their
    // component.  A node ends up in partial_gamma exactly when its label is
    // at least gamma.
    return node_label(t, a) >= gamma;
}

Ordinal rank_index_tree(const IndexTree& t) {
    if (!t.plain) {
        // forest of components I_{alpha_n}^plain of ranks alpha_n, whose sup
        // is alpha (constant for successor alpha, cofinal for limit alpha)
        return t.alpha;
    }
    // rho of the root of I_alpha^plain, by recursion on alpha = beta + 1:
    //   beta = 0: leaf, rank 0;
    //   beta successor: every child is a copy of I_beta^plain, so the root
    //     rank is (root rank of I_beta^plain) + 1, telescoping to beta;
    //   beta limit: the children are I_{beta_n}^plain with root ranks
    //     beta_n - 1, and sup_n beta_n = beta by cofinality.
    // In all cases the root has rank beta, so rho(I_alpha^plain) = alpha.
    return t.alpha;
}

bool node_less(const IndexTree& t, const NodeAddr& a, const NodeAddr& b) {
    (void)t;
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return a[i] < b[i];
    // comparable nodes: the ancestor (shorter address) is the larger
    return a.size() > b.size();
}

namespace {

// w^{beta - 1} for the top label of a plain subtree; representable only for
// finite beta - 1 under the global exponent cap
Ordinal top_label_value(const Ordinal& beta) {
    auto f = beta.finite();
    if (!f) throw std::invalid_argument("linearize: label range exceeds the ordinal cap");
    return Ordinal::term(f->convert_to<int>(), 1);
}

}  // namespace

Ordinal linearize(const IndexTree& t, const NodeAddr& a) {
    if (!t.plain) throw std::invalid_argument("linearize: plain trees only");
    Ordinal cur = t.alpha;
    Ordinal acc;
    for (size_t pos = 0; pos < a.size(); ++pos) {
        Ordinal beta = cur.predecessor();
        if (beta.is_zero()) throw std::invalid_argument("linearize: address below a leaf");
        const Int& n = a[pos];
        // offset of child n: the sum over m < n of the full order types
        // w^{beta_m - 1} of the earlier siblings, in closed form (left CNF
        // addition absorbs all but the largest earlier block)
        if (n > 0) {
            if (beta.is_successor()) {
                Ordinal e = beta.predecessor();
                auto f = e.finite();
                if (!f) throw std::invalid_argument("linearize: label range exceeds the ordinal cap");
                acc = acc + (f->is_zero() ? Ordinal::from_nat(n) : Ordinal::term(f->convert_to<int>(), n));
            } else {
                acc = acc + top_label_value(fundamental(beta, n - 1).predecessor());
            }
        }
        cur = child_ordinal(beta, n);
    }
    return acc + top_label_value(cur.predecessor());
}

}  // namespace tlab
