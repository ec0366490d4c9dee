#include "tlab/lattice.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace tlab {

Lattice Lattice::zero(int dim) {
    Lattice l;
    l.dim_ = dim;
    l.basis_ = Mat(0, dim);
    return l;
}

Lattice Lattice::full(int dim) {
    Lattice l;
    l.dim_ = dim;
    l.basis_ = Mat::identity(dim);
    return l;
}

Lattice Lattice::from_rows(int dim, const Mat& gens) {
    if (gens.rows() > 0 && gens.cols() != dim)
        throw std::invalid_argument("lattice generator width mismatch");
    HnfResult r = hnf(gens.rows() ? gens : Mat(0, dim));
    Lattice l;
    l.dim_ = dim;
    l.basis_ = Mat(r.rank, dim);
    for (int i = 0; i < r.rank; ++i)
        for (int j = 0; j < dim; ++j) l.basis_.at(i, j) = r.h.at(i, j);
    return l;
}

Lattice Lattice::span(const Mat& gens) { return from_rows(gens.cols(), gens); }

bool Lattice::is_full() const { return basis_ == Mat::identity(dim_); }

bool Lattice::member(const Mat& v) const {
    if (v.rows() != 1 || v.cols() != dim_) throw std::invalid_argument("member: bad vector shape");
    Mat rem = v;
    for (int i = 0; i < basis_.rows(); ++i) {
        int j = 0;
        while (j < dim_ && basis_.at(i, j) == 0) ++j;
        if (j == dim_) continue;
        if (rem.at(0, j) % basis_.at(i, j) != 0) return false;
        Int q = rem.at(0, j) / basis_.at(i, j);
        if (q != 0)
            for (int k = 0; k < dim_; ++k) rem.at(0, k) -= q * basis_.at(i, k);
    }
    return rem.is_zero();
}

bool Lattice::contains(const Lattice& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("contains: dim mismatch");
    for (int i = 0; i < o.basis_.rows(); ++i)
        if (!member(o.basis_.row(i))) return false;
    return true;
}

Lattice lat_sum(const Lattice& a, const Lattice& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("lat_sum: dim mismatch");
    return Lattice::from_rows(a.dim(), Mat::vstack(a.basis(), b.basis()));
}

Lattice lat_intersect(const Lattice& a, const Lattice& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("lat_intersect: dim mismatch");
    if (a.is_zero() || b.is_zero()) return Lattice::zero(a.dim());
    Mat stacked = Mat::vstack(a.basis(), b.basis());
    Mat k = left_kernel(stacked);
    // rows (x|y) with x*A + y*B = 0; intersection spanned by x*A
    Mat xa(k.rows(), a.dim());
    for (int i = 0; i < k.rows(); ++i)
        for (int j = 0; j < a.dim(); ++j) {
            Int s = 0;
            for (int t = 0; t < a.basis().rows(); ++t) s += k.at(i, t) * a.basis().at(t, j);
            xa.at(i, j) = s;
        }
    return Lattice::from_rows(a.dim(), xa);
}

Lattice lat_direct_sum(const Lattice& a, const Lattice& b) {
    Lattice l = Lattice::from_rows(a.dim() + b.dim(), Mat::block_diag(a.basis(), b.basis()));
    return l;
}

Lattice map_image(const Mat& f, const Lattice& l) {
    if (f.cols() != l.dim()) throw std::invalid_argument("map_image: shape mismatch");
    return Lattice::from_rows(f.rows(), l.basis() * f.transpose());
}

Lattice map_kernel(const Mat& f) { return Lattice::from_rows(f.cols(), left_kernel(f.transpose())); }

Lattice map_preimage(const Mat& f, const Lattice& t) {
    if (f.rows() != t.dim()) throw std::invalid_argument("map_preimage: shape mismatch");
    // pairs (x, y) with x*f^T - y*T = 0; preimage = projection to x
    Mat stacked = Mat::vstack(f.transpose(), -t.basis());
    Mat k = left_kernel(stacked);
    Mat x(k.rows(), f.cols());
    for (int i = 0; i < k.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j) x.at(i, j) = k.at(i, j);
    return Lattice::from_rows(f.cols(), x);
}

Lattice saturate(const Lattice& l) {
    if (l.is_zero()) return l;
    Lattice w = map_kernel(l.basis());   // orthogonal complement lattice
    return map_kernel(w.basis());        // double orthogonal = rational span cap Z^d
}

std::vector<Int> quotient_shape(const Lattice& big, const Lattice& small, const Ring& ring) {
    if (big.dim() != small.dim()) throw std::invalid_argument("quotient_shape: dim mismatch");
    auto x = solve_left(big.basis(), small.basis());
    if (!x) throw std::domain_error("quotient_shape: small is not contained in big");
    SnfResult s = snf(*x);
    std::vector<Int> out;
    for (const auto& d : s.diag) {
        Int e = ring.strip_units(d);
        if (e != 1) out.push_back(e);
    }
    for (int i = int(s.diag.size()); i < big.rank(); ++i) out.push_back(0);
    std::sort(out.begin(), out.end(), [](const Int& a, const Int& b) {
        if (a == 0) return false;
        if (b == 0) return true;
        return a < b;
    });
    return out;
}

Lattice ring_canonical(const Lattice& l, const Ring& ring) {
    if (l.is_zero() || ring.is_Z()) return l;
    Lattice f = saturate(l);
    auto x = solve_left(f.basis(), l.basis());
    if (!x) throw std::logic_error("ring_canonical: saturation inconsistency");
    SnfResult s = snf(*x);
    // l = rowspace(s * v^-1 * f.basis); rescale the diagonal by its non-unit part
    Mat g = inverse_unimodular(s.v) * f.basis();
    Mat rows(int(s.diag.size()), l.dim());
    for (size_t i = 0; i < s.diag.size(); ++i) {
        Int d = ring.strip_units(s.diag[i]);
        for (int j = 0; j < l.dim(); ++j) rows.at(int(i), j) = d * g.at(int(i), j);
    }
    return Lattice::from_rows(l.dim(), rows);
}

QuotientCoords quotient_coords(int dim, const Lattice& n) {
    if (n.dim() != dim) throw std::invalid_argument("quotient_coords: dim mismatch");
    int r = n.rank();
    if (r == 0) {
        QuotientCoords q;
        q.proj = Mat::identity(dim);
        q.sect = Mat::identity(dim);
        q.rank = dim;
        return q;
    }
    SnfResult s = snf(n.basis());
    for (const auto& d : s.diag)
        if (d != 1) throw std::domain_error("quotient_coords: lattice is not saturated");
    Mat vt = s.v.transpose();
    Mat vinv = inverse_unimodular(s.v);
    QuotientCoords q;
    q.rank = dim - r;
    q.proj = Mat(q.rank, dim);
    for (int i = 0; i < q.rank; ++i)
        for (int j = 0; j < dim; ++j) q.proj.at(i, j) = vt.at(r + i, j);
    q.sect = Mat(dim, q.rank);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < q.rank; ++j) q.sect.at(i, j) = vinv.at(r + j, i);
    return q;
}


// ---------------------------------------------------------------------------
// eventual image
//
// stable_image computes the intersection over k of (m^k Z^d + rel) exactly.
// Fast path: the ring-canonical chain frequently reaches a literal fixpoint.
// General path: the intersection equals pi(V) + rel, where V is the stable
// lattice of the block matrix N = [[m, B],[0, I]] (B = columns of rel) inside
// the span of the algebraic-unit eigenvalues of N.  The candidate is then
// certified in both directions: a fixpoint check proves containment in every
// chain member, and the quotient by the candidate's span is proven to have
// zero eventual image by showing its characteristic polynomial has no monic
// integer factor with constant term +-1 (any nonzero stable sublattice would
// carry an action of determinant +-1, i.e. an algebraic-unit factor).
// ---------------------------------------------------------------------------

namespace {

using Poly = std::vector<Int>;  // coefficients, index = degree
using Rat = boost::multiprecision::cpp_rational;
using RPoly = std::vector<Rat>;

void poly_norm(Poly& f, const Int& mod) {
    if (mod != 0)
        for (auto& x : f) x = fmod(x, mod);
    while (f.size() > 1 && f.back() == 0) f.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b, const Int& mod) {
    Poly c(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    poly_norm(c, mod);
    return c;
}

Poly poly_add(const Poly& a, const Poly& b, const Int& mod) {
    Poly c(std::max(a.size(), b.size()), Int(0));
    for (size_t i = 0; i < a.size(); ++i) c[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) c[i] += b[i];
    poly_norm(c, mod);
    return c;
}

Poly poly_scale(const Poly& a, const Int& s, const Int& mod) {
    Poly c = a;
    for (auto& x : c) x *= s;
    poly_norm(c, mod);
    return c;
}

// division with remainder by a monic divisor
void poly_divmod_monic(const Poly& a, const Poly& d, const Int& mod, Poly& q, Poly& r) {
    r = a;
    poly_norm(r, mod);
    int dd = int(d.size()) - 1;
    if (int(r.size()) - 1 < dd || (r.size() == 1 && r[0] == 0)) { q = {Int(0)}; return; }
    q.assign(r.size() - dd, Int(0));
    for (int i = int(r.size()) - 1; i >= dd; --i) {
        Int c = r[i];
        if (mod != 0) c = fmod(c, mod);
        if (c == 0) continue;
        q[i - dd] = c;
        for (int j = 0; j <= dd; ++j) {
            r[i - dd + j] -= c * d[j];
            if (mod != 0) r[i - dd + j] = fmod(r[i - dd + j], mod);
        }
    }
    poly_norm(r, mod);
    poly_norm(q, mod);
}

bool poly_is_zero(const Poly& f) { return f.size() == 1 && f[0] == 0; }

Int inv_mod(const Int& a, const Int& m) {
    Int x, y;
    Int g = xgcd(fmod(a, m), m, x, y);
    if (g != 1) throw std::logic_error("inv_mod: not invertible");
    return fmod(x, m);
}

Poly poly_mod_p(const Poly& f, const Int& p) {
    Poly g = f;
    poly_norm(g, p);
    return g;
}

Poly poly_gcd_mod_p(Poly a, Poly b, const Int& p) {
    poly_norm(a, p);
    poly_norm(b, p);
    while (!poly_is_zero(b)) {
        Poly bm = poly_scale(b, inv_mod(b.back(), p), p);
        Poly q, r;
        poly_divmod_monic(a, bm, p, q, r);
        a = b;
        b = r;
    }
    if (!poly_is_zero(a)) a = poly_scale(a, inv_mod(a.back(), p), p);
    return a;
}

Poly poly_derivative(const Poly& f) {
    if (f.size() <= 1) return {Int(0)};
    Poly d(f.size() - 1);
    for (size_t i = 1; i < f.size(); ++i) d[i - 1] = Int(i) * f[i];
    poly_norm(d, 0);
    return d;
}

// extended Euclid over Z/p: g0*s + h0*t = 1
void poly_bezout_mod_p(const Poly& g0, const Poly& h0, const Int& p, Poly& s, Poly& t) {
    Poly r0 = poly_mod_p(g0, p), r1 = poly_mod_p(h0, p);
    Poly s0 = {Int(1)}, s1 = {Int(0)};
    Poly t0 = {Int(0)}, t1 = {Int(1)};
    while (!poly_is_zero(r1)) {
        Poly r1m = poly_scale(r1, inv_mod(r1.back(), p), p);
        Poly q, rem;
        poly_divmod_monic(r0, r1m, p, q, rem);
        // q was computed against the monic scaling of r1: qeff = q / lead(r1)
        Poly qeff = poly_scale(q, inv_mod(r1.back(), p), p);
        Poly nr = poly_add(r0, poly_scale(poly_mul(qeff, r1, p), Int(-1), p), p);
        Poly ns = poly_add(s0, poly_scale(poly_mul(qeff, s1, p), Int(-1), p), p);
        Poly nt = poly_add(t0, poly_scale(poly_mul(qeff, t1, p), Int(-1), p), p);
        r0 = r1; r1 = nr;
        s0 = s1; s1 = ns;
        t0 = t1; t1 = nt;
    }
    if (poly_is_zero(r0)) throw std::logic_error("poly_bezout: zero gcd");
    Int li = inv_mod(r0.back(), p);
    if (r0.size() != 1) throw std::logic_error("poly_bezout: inputs not coprime mod p");
    s = poly_scale(s0, li, p);
    t = poly_scale(t0, li, p);
}

// Hensel-lift f = g*h from mod p to mod p^K (g, h monic, coprime mod p)
void hensel_lift(const Poly& f, Poly& g, Poly& h, const Int& p, int bigK) {
    Poly s, t;
    poly_bezout_mod_p(g, h, p, s, t);
    Int mod = p;
    int prec = 1;
    while (prec < bigK) {
        Int newmod = mod * mod;
        prec *= 2;
        Poly e = poly_add(f, poly_scale(poly_mul(g, h, newmod), Int(-1), newmod), newmod);
        Poly et = poly_mul(e, t, newmod);
        Poly q, r;
        poly_divmod_monic(et, g, newmod, q, r);
        Poly g1 = poly_add(g, r, newmod);
        Poly h1 = poly_add(h, poly_add(poly_mul(e, s, newmod), poly_mul(q, h, newmod), newmod), newmod);
        Poly b = poly_add({Int(1)},
                          poly_scale(poly_add(poly_mul(s, g1, newmod), poly_mul(t, h1, newmod), newmod),
                                     Int(-1), newmod),
                          newmod);
        Poly bt = poly_mul(b, t, newmod);
        Poly q2, r2;
        poly_divmod_monic(bt, g1, newmod, q2, r2);
        Poly t1 = poly_add(t, r2, newmod);
        Poly s1 = poly_add(s, poly_add(poly_mul(b, s, newmod), poly_mul(q2, h1, newmod), newmod), newmod);
        g = g1; h = h1; s = s1; t = t1;
        mod = newmod;
    }
}

// characteristic polynomial via Faddeev-LeVerrier (exact integer divisions)
Poly char_poly(const Mat& a) {
    int n = a.rows();
    Poly c(n + 1, Int(0));
    c[n] = 1;
    Mat m = Mat::zero(n, n);
    for (int k = 1; k <= n; ++k) {
        Mat t = m;
        for (int i = 0; i < n; ++i) t.at(i, i) += c[n - k + 1];
        m = a * t;
        Int tr = 0;
        for (int i = 0; i < n; ++i) tr += m.at(i, i);
        c[n - k] = -tr / k;
    }
    return c;
}

Mat poly_eval_mat(const Poly& f, const Mat& a) {
    int n = a.rows();
    Mat r = Mat::zero(n, n);
    for (int i = int(f.size()) - 1; i >= 0; --i) {
        r = r * a;
        for (int d = 0; d < n; ++d) r.at(d, d) += f[i];
    }
    return r;
}

// squarefree radical of a monic integer polynomial, via rational Euclid
Poly poly_radical(const Poly& f) {
    auto to_r = [](const Poly& p) {
        RPoly r(p.size());
        for (size_t i = 0; i < p.size(); ++i) r[i] = Rat(p[i]);
        return r;
    };
    auto norm_r = [](RPoly& p) { while (p.size() > 1 && p.back() == 0) p.pop_back(); };
    auto is_zero_r = [](const RPoly& p) { return p.empty() || (p.size() == 1 && p[0] == 0); };
    auto rem_r = [&](RPoly a, const RPoly& b) {
        while (a.size() >= b.size() && !is_zero_r(a)) {
            Rat c = a.back() / b.back();
            size_t off = a.size() - b.size();
            for (size_t j = 0; j < b.size(); ++j) a[off + j] -= c * b[j];
            a.pop_back();
            norm_r(a);
            if (a.size() < b.size()) break;
        }
        return a;
    };
    RPoly a = to_r(f), b = to_r(poly_derivative(f));
    norm_r(a); norm_r(b);
    while (!is_zero_r(b)) {
        RPoly r = rem_r(a, b);
        a = b;
        b = r;
    }
    // a = gcd(f, f') up to scalar; divide f by it exactly over Q
    RPoly g = a;
    for (auto& x : g) x /= a.back();
    RPoly q(f.size() - g.size() + 1, Rat(0));
    RPoly rem = to_r(f);
    for (int i = int(rem.size()) - 1; i >= int(g.size()) - 1; --i) {
        Rat c = rem[i];
        if (c == 0) continue;
        size_t off = i - (g.size() - 1);
        q[off] = c;
        for (size_t j = 0; j < g.size(); ++j) rem[off + j] -= c * g[j];
    }
    Poly out(q.size());
    for (size_t i = 0; i < q.size(); ++i) {
        if (boost::multiprecision::denominator(q[i]) != 1)
            throw std::logic_error("poly_radical: non-integral quotient");
        out[i] = boost::multiprecision::numerator(q[i]);
    }
    poly_norm(out, 0);
    return out;
}

// brute-force factorization of a monic squarefree polynomial mod small q
std::vector<Poly> factor_mod_q(Poly f, const Int& q) {
    std::vector<Poly> out;
    poly_norm(f, q);
    f = poly_scale(f, inv_mod(f.back(), q), q);
    int dd = 1;
    while (int(f.size()) - 1 >= 2 * dd) {
        bool found = false;
        long qq = q.convert_to<long>();
        long total = 1;
        for (int i = 0; i < dd; ++i) total *= qq;
        for (long code = 0; code < total && !found; ++code) {
            Poly cand(dd + 1, Int(0));
            long c = code;
            for (int i = 0; i < dd; ++i) { cand[i] = c % qq; c /= qq; }
            cand[dd] = 1;
            Poly quo, rem;
            poly_divmod_monic(f, cand, q, quo, rem);
            if (poly_is_zero(rem)) {
                out.push_back(cand);
                f = quo;
                found = true;
            }
        }
        if (!found) ++dd;
    }
    if (int(f.size()) - 1 >= 1) out.push_back(f);
    return out;
}

// true irreducible integer factors of a monic squarefree polynomial;
// empty result means the factorization gave up (degree/prime limits)
std::vector<Poly> factor_int_squarefree(const Poly& f) {
    int d = int(f.size()) - 1;
    if (d == 0) return {};
    if (d > 16) return {};
    Int q = 0;
    for (int cand : {2, 3, 5, 7, 11}) {
        Poly fq = poly_mod_p(f, cand);
        if (int(fq.size()) - 1 != d) continue;  // leading coeff vanished (monic: cannot)
        Poly g = poly_gcd_mod_p(fq, poly_derivative(fq), cand);
        if (g.size() == 1) { q = cand; break; }
    }
    if (q == 0) return {};
    std::vector<Poly> modf = factor_mod_q(poly_mod_p(f, q), q);
    if (modf.size() > 16) return {};
    // coefficient bound for monic factors, and lifting precision
    Int norm1 = 0;
    for (const auto& c : f) norm1 += abs_int(c);
    Int bound = (norm1 + 1) << unsigned(d + 3);
    int bigK = 1;
    Int qK = q;
    while (qK <= 2 * bound) { qK *= q; ++bigK; }
    // lift the factorization to mod q^bigK by recursive two-way splits
    std::function<std::vector<Poly>(const Poly&, const std::vector<Poly>&)> lift =
        [&](const Poly& target, const std::vector<Poly>& parts) -> std::vector<Poly> {
        if (parts.size() == 1) {
            Poly t = target;
            poly_norm(t, qK);
            return {t};
        }
        size_t half = parts.size() / 2;
        Poly g = {Int(1)}, h = {Int(1)};
        for (size_t i = 0; i < half; ++i) g = poly_mul(g, parts[i], q);
        for (size_t i = half; i < parts.size(); ++i) h = poly_mul(h, parts[i], q);
        Poly gl = g, hl = h;
        hensel_lift(target, gl, hl, q, bigK);
        auto l = lift(gl, {parts.begin(), parts.begin() + long(half)});
        auto r = lift(hl, {parts.begin() + long(half), parts.end()});
        l.insert(l.end(), r.begin(), r.end());
        return l;
    };
    std::vector<Poly> lifted = lift(f, modf);
    auto symm = [&](Poly p) {
        for (auto& x : p) {
            x = fmod(x, qK);
            if (2 * x > qK) x -= qK;
        }
        poly_norm(p, 0);
        return p;
    };
    // subset recombination
    std::vector<Poly> out;
    Poly rem_poly = f;
    std::vector<int> alive(lifted.size());
    for (size_t i = 0; i < alive.size(); ++i) alive[i] = int(i);
    int size = 1;
    while (!alive.empty() && size <= int(alive.size())) {
        bool found = false;
        std::vector<int> pick(size);
        std::function<bool(int, int)> rec = [&](int start, int depth) -> bool {
            if (depth == size) {
                Poly prod = {Int(1)};
                for (int i = 0; i < size; ++i) prod = poly_mul(prod, lifted[size_t(alive[size_t(pick[size_t(i)])])], qK);
                prod = symm(prod);
                if (abs_int(prod[0]) > bound) return false;
                Poly quo, rr;
                poly_divmod_monic(rem_poly, prod, 0, quo, rr);
                if (!poly_is_zero(rr)) return false;
                out.push_back(prod);
                rem_poly = quo;
                std::vector<int> next;
                for (size_t i = 0, pi = 0; i < alive.size(); ++i) {
                    if (pi < pick.size() && int(i) == pick[pi]) { ++pi; continue; }
                    next.push_back(alive[i]);
                }
                alive = next;
                return true;
            }
            for (int i = start; i <= int(alive.size()) - (size - depth); ++i) {
                pick[size_t(depth)] = i;
                if (rec(i + 1, depth + 1)) return true;
            }
            return false;
        };
        found = rec(0, 0);
        if (!found) ++size;
    }
    if (int(rem_poly.size()) - 1 >= 1) out.push_back(rem_poly);
    return out;
}

// monic integer factors of char(a) whose roots are algebraic units
// (constant term +-1); nullopt when factorization gave up
std::optional<Poly> unit_radical_of_char(const Mat& a) {
    Poly f = char_poly(a);
    Poly rad = poly_radical(f);
    if (int(rad.size()) - 1 == 0) return Poly{Int(1)};
    auto factors = factor_int_squarefree(rad);
    if (factors.empty()) return std::nullopt;
    Poly u = {Int(1)};
    for (const auto& g : factors)
        if (abs_int(g[0]) == 1) u = poly_mul(u, g, 0);
    return u;
}

}  // namespace

StableImage stable_image(const Mat& m, const Lattice& rel, const Ring& ring) {
    if (!m.is_square()) throw std::invalid_argument("stable_image: matrix must be square");
    int d = m.rows();
    if (rel.dim() != d) throw std::invalid_argument("stable_image: rel dim mismatch");
    auto rc = [&](const Lattice& l) { return ring_canonical(l, ring); };
    Lattice r = rc(rel);
    if (rc(lat_sum(map_image(m, r), r)) != r)
        throw std::domain_error("stable_image: rel is not invariant under m");

    auto step = [&](const Lattice& l) { return rc(lat_sum(map_image(m, l), r)); };

    // fast path: the ring-canonical chain frequently stabilizes outright
    Lattice cur = Lattice::full(d);
    for (int k = 0; k < 8 * d + 16; ++k) {
        Lattice nxt = step(cur);
        if (nxt == cur) return {cur, true};
        cur = nxt;
    }

    // general path
    Lattice span_stab = saturate(rc(lat_sum(map_image(m.pow(unsigned(d)), Lattice::full(d)), r)));
    if (span_stab.is_zero()) return {rc(r), r.is_zero()};
    const Mat& pb = span_stab.basis();
    int s = pb.rows();
    auto coeffs = solve_left(pb, pb * m.transpose());
    if (!coeffs) throw std::logic_error("stable_image: restriction failed");
    Mat mm = coeffs->transpose();  // s x s action on restricted coordinates
    auto rr = solve_left(pb, r.basis());
    if (!rr) throw std::logic_error("stable_image: rel restriction failed");
    Lattice rl = Lattice::from_rows(s, *rr);
    auto rcs = [&](const Lattice& l) { return ring_canonical(l, ring); };
    auto rstep = [&](const Lattice& l) { return rcs(lat_sum(map_image(mm, l), rl)); };

    // block matrix N = [[M, B],[0, I]] carries rel along the iteration
    int rk = rl.rank();
    Mat nb(s + rk, s + rk);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) nb.at(i, j) = mm.at(i, j);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < rk; ++j) nb.at(i, s + j) = rl.basis().at(j, i);
    for (int j = 0; j < rk; ++j) nb.at(s + j, s + j) = 1;

    Mat proj(s, s + rk);
    for (int i = 0; i < s; ++i) proj.at(i, i) = 1;

    bool have_unit = false;
    Lattice cand = Lattice::zero(s);
    auto up = unit_radical_of_char(nb);
    if (up) {
        // V = stable lattice inside the unit-eigenvalue span of N
        Mat un = poly_eval_mat(*up, nb).pow(unsigned(s + rk));
        Lattice ku = map_kernel(un);
        Lattice img = Lattice::full(s + rk);
        Lattice v = ku, prev = ku;
        int stable_run = 0;
        for (int k = 0; k < 16 * (s + rk) + 32 && stable_run < 3; ++k) {
            img = Lattice::from_rows(s + rk, img.basis() * nb.transpose());
            v = ring_canonical(lat_intersect(img, ku), ring);
            if (v == prev) ++stable_run; else stable_run = 0;
            prev = v;
        }
        if (stable_run >= 3) {
            cand = rcs(lat_sum(map_image(proj, v), rl));
            have_unit = true;
        }
    }

    bool certified = false;
    if (have_unit && rstep(cand) == cand) {
        // upper direction: quotient by the candidate span has zero stable part
        Lattice u = saturate(cand);
        if (u.rank() == s) {
            // full span: the chain would have to stabilize; re-check directly
            Lattice l = Lattice::full(s);
            for (int k = 0; k < 16 * s + 64; ++k) {
                Lattice nx = rstep(l);
                if (nx == l) break;
                l = nx;
            }
            certified = (l == cand);
        } else {
            Lattice mu = map_image(mm, u);
            if (u.contains(Lattice::from_rows(s, mu.basis()))) {
                QuotientCoords qc = quotient_coords(s, u);
                Mat mbar = qc.proj * (mm * qc.sect);
                auto uq = unit_radical_of_char(mbar);
                certified = uq && (int(uq->size()) - 1 == 0);
            }
        }
    }

    if (!certified) {
        // honest truncation: the chain value at a generous depth, uncertified
        Lattice l = Lattice::full(s);
        for (int k = 0; k < 8 * s + 32; ++k) l = rstep(l);
        Mat back = l.basis() * pb;
        return {rc(Lattice::from_rows(d, back)), false};
    }

    Mat back = cand.basis() * pb;
    Lattice out = rc(Lattice::from_rows(d, back));
    bool ok = rc(lat_sum(map_image(m, out), r)) == out;
    return {out, ok};
}

}  // namespace tlab
