#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "tlab/tree.hpp"

using namespace tlab;

namespace {

std::mt19937_64 rng(771204);

FiniteTree random_tree(int max_nodes) {
    std::set<std::vector<int>> nodes = {{}};
    std::vector<std::vector<int>> pool = {{}};
    std::uniform_int_distribution<int> ld(0, 3);
    std::uniform_int_distribution<size_t> pd;
    while (int(nodes.size()) < max_nodes) {
        auto parent = pool[pd(rng) % pool.size()];
        parent.push_back(ld(rng));
        if (nodes.insert(parent).second) pool.push_back(parent);
    }
    return FiniteTree::from_nodes(nodes);
}

// independent rank oracle: iterate the derivative of prec_T (descendant prec
// ancestor) starting from the full node set, count steps to empty
Int rank_by_derivative(const FiniteTree& t) {
    if (t.empty()) return 0;
    std::map<std::vector<int>, int> id;
    Relation r;
    for (auto& n : t.nodes()) {
        int k = int(id.size());
        id[n] = k;
        r.carrier.push_back(k);
    }
    for (auto& a : t.nodes())
        for (auto& b : t.nodes())
            if (a.size() > b.size() && std::equal(b.begin(), b.end(), a.begin()))
                r.pairs.insert({id[a], id[b]});
    DerivativeRun run = iterate_derivative(r);
    REQUIRE(run.well_founded);
    return run.rank;
}

}  // namespace

TEST_CASE("derivative frozen examples") {
    Relation chain{{0, 1, 2}, {{0, 1}, {0, 2}, {1, 2}}};
    CHECK(derivative(chain, {0, 1, 2}) == std::set<int>{1, 2});
    CHECK(derivative(chain, {1, 2}) == std::set<int>{2});

    Relation empty_rel{{0, 1, 2}, {}};
    CHECK(derivative(empty_rel, {0, 1, 2}).empty());

    Relation cycle{{0, 1}, {{0, 1}, {1, 0}}};
    DerivativeRun run = iterate_derivative(cycle);
    CHECK(!run.well_founded);
    CHECK(run.steps.back() == std::set<int>{0, 1});

    DerivativeRun cr = iterate_derivative(chain);
    CHECK(cr.well_founded);
    CHECK(cr.rank == 3);
}

TEST_CASE("rank_finite frozen examples") {
    CHECK(rank_finite(FiniteTree()) == 0);
    CHECK(rank_finite(FiniteTree::from_nodes({{}})) == 1);
    for (int n = 1; n <= 6; ++n) {
        std::set<std::vector<int>> nodes;
        std::vector<int> path;
        nodes.insert(path);
        for (int i = 0; i < n; ++i) {
            path.push_back(0);
            nodes.insert(path);
        }
        CHECK(rank_finite(FiniteTree::from_nodes(nodes)) == n + 1);
    }
    CHECK_THROWS(FiniteTree::from_nodes({{0}}));          // no root
    CHECK_THROWS(FiniteTree::from_nodes({{}, {0, 0}}));   // gap
}

TEST_CASE("rank_finite agrees with the derivative iteration") {
    for (int it = 0; it < 200; ++it) {
        FiniteTree t = random_tree(1 + it % 40);
        CHECK(rank_finite(t) == rank_by_derivative(t));
    }
}

TEST_CASE("game ranks") {
    CHECK(game_ranks(GameSpec{FiniteTree()}).game_rank == 0);

    // chain of depth n: game rank consistent with the tree rank
    std::set<std::vector<int>> nodes = {{}, {5}, {5, 5}};
    GameRanks g = game_ranks(GameSpec{FiniteTree::from_nodes(nodes)});
    CHECK(g.game_rank == 3);
    CHECK(g.sigma.at({}) == 1);
    CHECK(g.pi.at({}) == 2);
    CHECK(g.pi.at({5, 5}) == 1);

    // the correspondence rho(G_A) <= alpha iff rho(T) <= alpha, alpha <= 10
    for (int it = 0; it < 100; ++it) {
        FiniteTree t = random_tree(1 + (it * 7) % 200);
        GameRanks r = game_ranks(GameSpec{t});
        Int rt = rank_finite(t);
        for (int alpha = 0; alpha <= 10; ++alpha) CHECK((r.game_rank <= alpha) == (rt <= alpha));
        for (auto& [x, s] : r.sigma) CHECK(s == 1);
        for (auto& [x, p] : r.pi) CHECK((p == 1 || p == 2));
    }
}

TEST_CASE("index tree structure") {
    CHECK_THROWS(build_index_tree(Ordinal::zero(), true));
    CHECK_THROWS(build_index_tree(Ordinal::parse("w"), true));  // limit, not plain

    IndexTree i1 = build_index_tree(Ordinal::parse("1"), true);
    CHECK(node_is_leaf(i1, {}));
    CHECK(node_label(i1, {}).is_zero());

    IndexTree i2 = build_index_tree(Ordinal::parse("2"), true);
    CHECK(!node_is_leaf(i2, {}));
    CHECK(node_label(i2, {}) == Ordinal::from_nat(1));
    for (int n = 0; n < 5; ++n) {
        CHECK(node_is_leaf(i2, {n}));
        CHECK(node_label(i2, {n}).is_zero());
    }

    // I_{w+1}^plain: children are I_{n+1}^plain
    IndexTree iw1 = build_index_tree(Ordinal::parse("w+1"), true);
    CHECK(node_label(iw1, {}) == Ordinal::parse("w"));
    for (int n = 0; n < 5; ++n) CHECK(node_ordinal(iw1, {n}) == Ordinal::from_nat(n + 1));
    CHECK(node_ordinal(iw1, {3, 0}) == Ordinal::from_nat(3));

    // forest I_w: components are I_{n+1}^plain
    IndexTree fw = build_index_tree(Ordinal::parse("w"), false);
    CHECK_THROWS(node_ordinal(fw, {}));
    for (int n = 0; n < 5; ++n) CHECK(node_ordinal(fw, {n}) == Ordinal::from_nat(n + 1));

    CHECK_THROWS(node_ordinal(i1, {0}));  // below a leaf
}

TEST_CASE("sigma and partial labels partition the nodes") {
    IndexTree t = build_index_tree(Ordinal::parse("w+1"), true);
    Ordinal gamma = Ordinal::parse("3");
    // root label w >= 3: partial; deep nodes with small labels: sigma
    CHECK(in_partial(t, {}, gamma));
    CHECK(in_partial(t, {4}, gamma));           // label 4
    CHECK(!in_partial(t, {2}, gamma));          // label 2
    CHECK(in_partial(t, {4, 1}, gamma));        // label 3
    CHECK(!in_partial(t, {4, 1, 0}, gamma));    // label 2
    // sampled: every node is in exactly one of the two classes by definition;
    // check partial_gamma of I_{gamma+1}^plain is exactly the root
    IndexTree s = build_index_tree(Ordinal::parse("4"), true);
    CHECK(in_partial(s, {}, gamma));
    for (int n = 0; n < 6; ++n) {
        CHECK(!in_partial(s, {n}, gamma));
        CHECK(!in_partial(s, {n, n}, gamma));
    }
}

TEST_CASE("rank_index_tree structural values") {
    CHECK(rank_index_tree(build_index_tree(Ordinal::parse("1"), true)) == Ordinal::parse("1"));
    CHECK(rank_index_tree(build_index_tree(Ordinal::parse("2"), true)) == Ordinal::parse("2"));
    CHECK(rank_index_tree(build_index_tree(Ordinal::parse("3"), true)) == Ordinal::parse("3"));
    CHECK(rank_index_tree(build_index_tree(Ordinal::parse("w+1"), true)) == Ordinal::parse("w+1"));
    CHECK(rank_index_tree(build_index_tree(Ordinal::parse("w"), false)) == Ordinal::parse("w"));
    CHECK(rank_index_tree(build_index_tree(Ordinal::parse("w*3"), false)) == Ordinal::parse("w*3"));
    CHECK(rank_index_tree(build_index_tree(Ordinal::parse("w*3+1"), true)) == Ordinal::parse("w*3+1"));
}

TEST_CASE("linearize frozen examples") {
    IndexTree i2 = build_index_tree(Ordinal::parse("2"), true);
    CHECK(linearize(i2, {}) == Ordinal::parse("w"));
    for (int n = 0; n < 6; ++n) CHECK(linearize(i2, {n}) == Ordinal::from_nat(n + 1));

    IndexTree i3 = build_index_tree(Ordinal::parse("3"), true);
    CHECK(linearize(i3, {}) == Ordinal::parse("w^2"));
    CHECK(linearize(i3, {0}) == Ordinal::parse("w"));
    CHECK(linearize(i3, {2}) == Ordinal::parse("w*3"));
    CHECK(linearize(i3, {2, 4}) == Ordinal::parse("w*2+5"));
    // terminal nodes receive successor labels
    for (int n = 0; n < 5; ++n)
        for (int k = 0; k < 5; ++k) CHECK(linearize(i3, {n, k}).is_successor());

    CHECK_THROWS(linearize(build_index_tree(Ordinal::parse("w"), false), {0}));
}

TEST_CASE("linearize is order-preserving") {
    IndexTree i4 = build_index_tree(Ordinal::parse("4"), true);
    std::vector<NodeAddr> sample;
    std::uniform_int_distribution<int> d(0, 6);
    sample.push_back({});
    for (int i = 0; i < 40; ++i) {
        NodeAddr a;
        int depth = 1 + i % 3;
        for (int j = 0; j < depth; ++j) a.push_back(d(rng));
        sample.push_back(a);
    }
    int checked = 0;
    for (auto& a : sample)
        for (auto& b : sample) {
            if (a == b) continue;
            CHECK(node_less(i4, a, b) == (linearize(i4, a) < linearize(i4, b)));
            ++checked;
        }
    CHECK(checked >= 1000);
}
