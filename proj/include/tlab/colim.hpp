#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tlab/tower.hpp"

namespace tlab {

// p-adic parameter given by its digit stream: tau_n = sum_{i<=n} digits[i] p^i,
// so tau_{n+1} = tau_n + digits[n+1] p^{n+1}
struct PAdicDigits {
    Int p = 0;
    std::vector<Int> digits;
    bool unit_mod_p = true;  // digits[0] != 0, i.e. tau is a unit mod p

    Int tau(int n) const;  // truncation of tau modulo p^{n+1}
    int stages() const { return int(digits.size()); }
    void validate() const;

    static PAdicDigits random(const Int& p, int count, std::uint64_t seed);
};

struct ColimSpec;
using ColimPtr = std::shared_ptr<const ColimSpec>;

// one stage of a colimit presentation: a free module of the given rank and
// the injective transition into the next stage (r_{n+1} x r_n, columns act)
struct ColimStage {
    int rank = 0;
    Mat transition{0, 0};
};

// colimit-presented countable flat module: explicit stages followed by a tail
struct ColimSpec {
    enum class Tail { Truncated, Constant, Xi, Wedge, Sum };

    Ring ring;
    Tail tail = Tail::Truncated;
    std::vector<ColimStage> prefix;  // for Truncated the last transition is unused

    int tail_rank = 0;  // Constant
    Mat tail_transition{0, 0};

    PAdicDigits xi;  // Xi

    int m1_rank = 0;  // Wedge: arm i is glued along psi_i at wedge stage i+1
    std::vector<ColimPtr> arms;
    std::vector<Mat> psi;  // psi_i: Z^{m1} -> arm_i stage 0 (arm0rank x m1)

    ColimPtr left, right;  // Sum

    std::optional<Ordinal> tree_bound;  // syntactic plain tree length bound

    static ColimPtr truncated(const Ring& ring, std::vector<ColimStage> stages);
    static ColimPtr constant(const Ring& ring, int rank, const Mat& transition,
                             std::vector<ColimStage> prefix = {});
    static ColimPtr sum(const ColimPtr& a, const ColimPtr& b);
};

int colim_rank(const ColimSpec& c, int n);
Mat colim_transition(const ColimSpec& c, int n);           // stage n -> n+1
Mat colim_compose(const ColimSpec& c, int from, int to);   // stage from -> to
std::optional<int> colim_max_stage(const ColimSpec& c);    // last materialized stage
bool colim_pure_at(const ColimSpec& c, int n);  // transition image ring-saturated
bool colim_nonzero(const ColimSpec& c);

// dual tower Hom(C_n, R) with precomposition bonds (transposed transitions)
TowerPtr dual_tower(const ColimPtr& c);

struct ExtReport {
    LengthReport length;  // R-projective length = ml_length of the reduced dual
    Verdict coreduced{Verdict::Kind::Unknown, ""};
    Verdict projective{Verdict::Kind::Unknown, ""};
    std::string note;
};

Verdict coreduced_check(const ColimPtr& c, int depth);
Verdict is_projective(const ColimPtr& c, int depth);
ExtReport r_projective_length(const ColimPtr& c, const Ordinal& max_alpha, int depth);

// rank-2 stages with basis (f, g_n); the transition sends (a,b) (coordinates
// in that basis) to (a + b c_n p, b p) where tau_{n+1} = tau_n + c_n p^{n+1};
// e = p^n g_n + tau_n f at every stage; ring is Z with all primes != p inverted
ColimPtr xi_module(const PAdicDigits& d, int stages);

struct WellPointedReport {
    bool holds = false;
    int stages = 0;
    std::string note;
};
// e is not p-divisible at any materialized stage
WellPointedReport xi_well_pointed(const ColimPtr& c);

ColimPtr wedge_sum(int m1_rank, const std::vector<ColimPtr>& arms, const std::vector<Mat>& psi);

// wedge of xi arms glued along 1 -> p^i e: plain tree length certificate 2,
// R-projective length 1
ColimPtr gap_module(const PAdicDigits& d, int arm_count);

Ordinal tree_length_certificate(const ColimSpec& c);

struct SigmaReport {
    std::vector<Lattice> sigma;  // sigma_alpha cut to stage n, saturated in Z^{r_n}
    ColimPtr partial;            // the quotient module as a truncated colimit
    bool exact = false;
    Verdict consistency{Verdict::Kind::Unknown, ""};  // reduced dual of partial vs D_alpha
    std::string note;
};
SigmaReport sigma_partial(const ColimPtr& c, const Ordinal& alpha, int depth);

struct PhantomPiece {
    int n = 0;
    ColimPtr piece;
    Verdict purity{Verdict::Kind::Unknown, ""};  // C_n pure inside the piece
};
struct PhantomResolutionReport {
    std::vector<PhantomPiece> pieces;
    Ordinal tree_bound;
    std::string note;
};
PhantomResolutionReport phantom_resolution(const ColimPtr& c, const Ordinal& alpha, int breadth,
                                           int depth);

}  // namespace tlab
