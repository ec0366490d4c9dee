#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tlab/lattice.hpp"
#include "tlab/ordinal.hpp"

namespace tlab {

struct TowerSpec;
using TowerPtr = std::shared_ptr<const TowerSpec>;

// one explicit level: its dimension and the bonding matrix from the next
// level into it (shape dim(n) x dim(n+1))
struct PrefixStage {
    int dim = 0;
    Mat bond;
};

// finitely specified infinite tower of finitely generated modules.  Levels
// are Z^dim / rel (rel usually zero); the tail rule takes over after the
// prefix.  Truncated towers define only their prefix levels and are used
// internally for bounded-depth subtowers.
struct TowerSpec {
    enum class Tail { Zero, Constant, Sum, Shift, Fishbone, Truncated };

    Ring ring = Ring::Z();
    std::vector<PrefixStage> prefix;
    Tail tail = Tail::Zero;

    int tail_dim = 0;  // Constant
    Mat tail_bond;

    TowerPtr left, right;  // Sum

    TowerPtr inner;  // Shift: level n of this tower is level n + shift_k of inner
    int shift_k = 0;

    TowerPtr spine;               // Fishbone
    std::vector<TowerPtr> ribs;   // cyclic: rib k is ribs[k mod size]

    // quotient overlay: per-level relation lattice (levels are Z^dim / rel);
    // null means free levels
    std::function<Lattice(int)> rel_fn;

    static TowerPtr zero(const Ring& ring);
    static TowerPtr constant(const Ring& ring, int dim, const Mat& bond,
                             std::vector<PrefixStage> prefix = {});
    static TowerPtr sum(const TowerPtr& a, const TowerPtr& b);
    static TowerPtr shift(const TowerPtr& t, int k);
    static TowerPtr fishbone(const TowerPtr& spine, const std::vector<TowerPtr>& ribs);
    static TowerPtr truncated(const Ring& ring, std::vector<PrefixStage> stages);
    static TowerPtr with_relations(const TowerPtr& t, std::function<Lattice(int)> rel);
};

// level access; levels beyond a Truncated tower's prefix throw
int tower_dim(const TowerSpec& t, int n);
Mat tower_bond(const TowerSpec& t, int n);      // level n <- level n+1
Lattice tower_rel(const TowerSpec& t, int n);
Mat compose_bond(const TowerSpec& t, int n, int m);  // p^{(n,m)}, n <= m
// last defined level for Truncated towers (nullopt: all levels defined)
std::optional<int> tower_max_level(const TowerSpec& t);

struct Verdict {
    enum class Kind { Holds, Fails, Unknown } kind = Kind::Unknown;
    std::string evidence;
    bool holds() const { return kind == Kind::Holds; }
    bool fails() const { return kind == Kind::Fails; }
};

// one derived-level value: a lattice rel <= lat <= Z^dim standing for
// lat / rel; exact means certified equal to the infinite intersection,
// otherwise it is an upper bound valid to the stated depth
struct LevelValue {
    Lattice lat = Lattice::zero(0);
    bool exact = false;
};

struct DerivedLevels {
    Ordinal alpha;
    std::vector<LevelValue> levels;  // index = level
    std::string note;
};

struct LengthReport {
    Ordinal length;
    bool definite = false;  // false: length is only known to be >= `length`
    enum class Plain { Yes, No, Unknown } plain = Plain::Unknown;
    std::string certificate;
};

struct StraightnessReport {
    Verdict verdict;
    std::vector<Ordinal> beta;  // rib plain lengths over one cycle
    Ordinal sup_beta;
    std::string detail;
};

// memoizing derived-level calculator; safe for concurrent use
class DerivedCalc {
public:
    explicit DerivedCalc(TowerPtr t, int horizon = 24);

    const TowerSpec& tower() const;

    // A_alpha^{(n)} for zero or successor alpha (the recursion defines only
    // those; limit-indexed towers are assembled level-wise by the callers)
    LevelValue value(const Ordinal& alpha, int n);

    // straightness of a Fishbone tower, verified to the given depth
    StraightnessReport straightness(int depth);

    // plain length of the tower (smallest certified alpha with A_alpha = 0),
    // searched among ordinals <= max_alpha
    LengthReport length(const Ordinal& max_alpha, int depth);

    // is the alpha-th derived tower pro-isomorphic to zero?
    Verdict vanishes(const Ordinal& alpha, int depth);

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

DerivedLevels infinite_chain_support(const TowerPtr& t, int depth);
TowerPtr reduce(const TowerPtr& t, int depth);
Verdict mittag_leffler(const TowerPtr& t, int depth);
DerivedLevels derived_tower(const TowerPtr& t, const Ordinal& alpha, int depth);
LengthReport ml_length(const TowerPtr& t, const Ordinal& max_alpha, int depth);
Verdict essentially_monomorphic(const TowerPtr& t, int depth);

struct FishboneResult {
    TowerPtr tower;
    StraightnessReport straightness;
};
FishboneResult fishbone_build(const TowerPtr& spine, const std::vector<TowerPtr>& ribs,
                              bool check_straight, int depth);

struct FishboneVerifyEntry {
    Ordinal beta;
    int level = 0;
    bool match = false;
};
struct FishboneVerifyReport {
    std::vector<FishboneVerifyEntry> entries;
    bool all_match = false;
};
FishboneVerifyReport fishbone_verify(const TowerPtr& fb, int depth);

struct KernelIdentityReport {
    std::vector<std::pair<int, bool>> level_match;  // (level, identity held)
    bool all_match = false;
    std::string note;
};
KernelIdentityReport lim1_kernel_identity(const TowerPtr& t, int ell, const Ordinal& alpha,
                                          int depth);

}  // namespace tlab
