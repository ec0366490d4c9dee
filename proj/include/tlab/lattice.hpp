#pragma once

#include <optional>
#include <vector>

#include "tlab/matrix.hpp"
#include "tlab/ring.hpp"

namespace tlab {

// finitely generated subgroup of Z^dim, stored as a canonical HNF basis
// (no zero rows); equality of lattices is entrywise equality of bases
class Lattice {
public:
    Lattice() = default;
    static Lattice zero(int dim);
    static Lattice full(int dim);
    static Lattice from_rows(int dim, const Mat& gens);
    static Lattice span(const Mat& gens);  // dim = gens.cols()

    int dim() const { return dim_; }
    int rank() const { return basis_.rows(); }
    const Mat& basis() const { return basis_; }
    bool is_zero() const { return basis_.rows() == 0; }
    bool is_full() const;

    bool operator==(const Lattice&) const = default;

    bool member(const Mat& v) const;        // 1 x dim row vector
    bool contains(const Lattice& o) const;  // o subset of this

private:
    int dim_ = 0;
    Mat basis_{0, 0};
};

Lattice lat_sum(const Lattice& a, const Lattice& b);
Lattice lat_intersect(const Lattice& a, const Lattice& b);
Lattice lat_direct_sum(const Lattice& a, const Lattice& b);

// image of L under the linear map x -> x (row) applied by f: Z^dim -> Z^m,
// f given as m x dim matrix acting on column vectors; image rows are basis*f^T
Lattice map_image(const Mat& f, const Lattice& l);

// kernel of f: Z^dim -> Z^m as a lattice in Z^dim (saturated)
Lattice map_kernel(const Mat& f);

// preimage of the lattice t under f: Z^dim -> Z^m
Lattice map_preimage(const Mat& f, const Lattice& t);

// smallest saturated lattice containing l (rational saturation)
Lattice saturate(const Lattice& l);

// elementary divisors of big/small (small subset of big required),
// with inverted-prime parts stripped; entries > 1 only
std::vector<Int> quotient_shape(const Lattice& big, const Lattice& small, const Ring& ring);

// smallest ring-saturated lattice containing l: quotient by l has no
// torsion at inverted primes
Lattice ring_canonical(const Lattice& l, const Ring& ring);

struct StableImage {
    Lattice lat;
    bool certified = false;  // m(lat)+rel == lat verified exactly
};

// eventual image: intersection over k of (m^k Z^d + rel), where m: Z^d -> Z^d
// and m(rel) is contained in rel + rel-span; computed exactly with a fixpoint
// certificate over the given ring
StableImage stable_image(const Mat& m, const Lattice& rel, const Ring& ring);

inline Lattice eventual_image(const Mat& m, const Ring& ring) {
    return stable_image(m, Lattice::zero(m.rows()), ring).lat;
}

// projection/section pair for the free quotient Z^d / N (N saturated):
// proj is (d-rank) x d with kernel-lattice exactly N, sect a right inverse
struct QuotientCoords {
    Mat proj;
    Mat sect;
    int rank = 0;
};
QuotientCoords quotient_coords(int dim, const Lattice& n);

}  // namespace tlab
