#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tlab/int.hpp"
#include "tlab/ordinal.hpp"

namespace tlab {

// finite binary relation a "prec" b on an integer carrier
struct Relation {
    std::vector<int> carrier;
    std::set<std::pair<int, int>> pairs;  // (a, b) means a prec b
};

// D(A) = { y : exists a in A with a prec y }
std::set<int> derivative(const Relation& r, const std::set<int>& a);

struct DerivativeRun {
    std::vector<std::set<int>> steps;  // D^0(Y), D^1(Y), ... up to empty or fixpoint
    bool well_founded = false;
    Int rank = 0;  // least k with D^k(Y) empty, when well-founded
};

DerivativeRun iterate_derivative(const Relation& r);

// finite tree on the integers: prefix-closed set of tuples; nonempty trees
// contain the root (empty tuple)
class FiniteTree {
public:
    FiniteTree() = default;
    static FiniteTree from_nodes(const std::set<std::vector<int>>& nodes);

    bool empty() const { return nodes_.empty(); }
    size_t size() const { return nodes_.size(); }
    bool contains(const std::vector<int>& n) const { return nodes_.count(n) > 0; }
    const std::set<std::vector<int>>& nodes() const { return nodes_; }
    std::vector<std::vector<int>> children(const std::vector<int>& n) const;

private:
    std::set<std::vector<int>> nodes_;
};

// rho(T): least k with the k-th derivative of prec_T empty; equals
// rho_prec(root) + 1 on nonempty trees and 0 on the empty tree
Int rank_finite(const FiniteTree& t);

// closed payoff set for Bob given by a finite tree (Bob wins runs staying
// inside); alphabet = integers appearing in the tree plus one escape symbol
struct GameSpec {
    FiniteTree payoff;
};

struct GameRanks {
    // literal sigma/pi recursion values at the positions inside the payoff
    // tree; positions outside are immediately winning for Alice (rank 0)
    std::map<std::vector<int>, Int> sigma, pi;
    // rank of the game, via the tree correspondence (least alpha such that
    // rho(T) <= alpha)
    Int game_rank = 0;
};

GameRanks game_ranks(const GameSpec& g);

// symbolic index tree I_alpha (forest) or I_alpha^plain (alpha a successor).
// A node address is the list of child indices from the top; for forests the
// first index selects the component plain tree.
struct IndexTree {
    Ordinal alpha;
    bool plain = true;
};

using NodeAddr = std::vector<Int>;

IndexTree build_index_tree(const Ordinal& alpha, bool plain);

// ordinal of the plain subtree rooted at the node (its label is that minus 1)
Ordinal node_ordinal(const IndexTree& t, const NodeAddr& a);
Ordinal node_label(const IndexTree& t, const NodeAddr& a);
bool node_is_leaf(const IndexTree& t, const NodeAddr& a);

// membership in the partial_gamma part; sigma_gamma is the complement
bool in_partial(const IndexTree& t, const NodeAddr& a, const Ordinal& gamma);

// structural rank: alpha for both I_alpha and I_alpha^plain
Ordinal rank_index_tree(const IndexTree& t);

// tree order: x below y iff y is a proper ancestor of x, siblings ranked by
// child index; node_less is the linearization order (lexicographic among
// non-comparable nodes, ancestors above descendants)
bool node_less(const IndexTree& t, const NodeAddr& a, const NodeAddr& b);

// order-preserving labeling of I_alpha^plain into w^{alpha-1}+1: root to
// w^{alpha-1}, terminal nodes onto successor ordinals
Ordinal linearize(const IndexTree& t, const NodeAddr& a);

}  // namespace tlab
