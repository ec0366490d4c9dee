#include "tlab/matrix.hpp"

#include <stdexcept>

namespace tlab {

Mat::Mat(std::initializer_list<std::initializer_list<Int>> rows) {
    r_ = int(rows.size());
    c_ = r_ ? int(rows.begin()->size()) : 0;
    a_.reserve(size_t(r_) * c_);
    for (const auto& row : rows) {
        if (int(row.size()) != c_) throw std::invalid_argument("ragged matrix literal");
        for (const auto& x : row) a_.push_back(x);
    }
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Mat Mat::diag(const std::vector<Int>& d) {
    Mat m(int(d.size()), int(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m.at(int(i), int(i)) = d[i];
    return m;
}

Mat Mat::transpose() const {
    Mat t(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) t.at(j, i) = at(i, j);
    return t;
}

Mat Mat::operator*(const Mat& o) const {
    if (c_ != o.r_) throw std::invalid_argument("matmul shape mismatch");
    Mat p(r_, o.c_);
    for (int i = 0; i < r_; ++i)
        for (int k = 0; k < c_; ++k) {
            const Int& x = at(i, k);
            if (x == 0) continue;
            for (int j = 0; j < o.c_; ++j) p.at(i, j) += x * o.at(k, j);
        }
    return p;
}

Mat Mat::operator+(const Mat& o) const {
    if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("matadd shape mismatch");
    Mat s = *this;
    for (size_t i = 0; i < a_.size(); ++i) s.a_[i] += o.a_[i];
    return s;
}

Mat Mat::operator-() const {
    Mat s = *this;
    for (auto& x : s.a_) x = -x;
    return s;
}

Mat Mat::scaled(const Int& c) const {
    Mat s = *this;
    for (auto& x : s.a_) x *= c;
    return s;
}

Mat Mat::pow(unsigned long k) const {
    if (!is_square()) throw std::invalid_argument("pow of non-square matrix");
    Mat r = identity(r_), b = *this;
    while (k) {
        if (k & 1) r = r * b;
        b = b * b;
        k >>= 1;
    }
    return r;
}

Mat Mat::row(int i) const {
    Mat v(1, c_);
    for (int j = 0; j < c_; ++j) v.at(0, j) = at(i, j);
    return v;
}

void Mat::swap_rows(int i, int j) {
    if (i == j) return;
    for (int k = 0; k < c_; ++k) std::swap(at(i, k), at(j, k));
}

void Mat::negate_row(int i) {
    for (int k = 0; k < c_; ++k) at(i, k) = -at(i, k);
}

void Mat::addmul_row(int i, int j, const Int& q) {
    if (q == 0) return;
    for (int k = 0; k < c_; ++k) at(i, k) -= q * at(j, k);
}

Mat Mat::vstack(const Mat& a, const Mat& b) {
    if (a.r_ == 0 && (a.c_ == b.c_ || a.c_ == 0)) return b;
    if (b.r_ == 0 && (b.c_ == a.c_ || b.c_ == 0)) return a;
    if (a.c_ != b.c_) throw std::invalid_argument("vstack width mismatch");
    Mat s(a.r_ + b.r_, a.c_);
    for (int i = 0; i < a.r_; ++i)
        for (int j = 0; j < a.c_; ++j) s.at(i, j) = a.at(i, j);
    for (int i = 0; i < b.r_; ++i)
        for (int j = 0; j < b.c_; ++j) s.at(a.r_ + i, j) = b.at(i, j);
    return s;
}

Mat Mat::block_diag(const Mat& a, const Mat& b) {
    Mat s(a.r_ + b.r_, a.c_ + b.c_);
    for (int i = 0; i < a.r_; ++i)
        for (int j = 0; j < a.c_; ++j) s.at(i, j) = a.at(i, j);
    for (int i = 0; i < b.r_; ++i)
        for (int j = 0; j < b.c_; ++j) s.at(a.r_ + i, a.c_ + j) = b.at(i, j);
    return s;
}

Mat Mat::hcat(const Mat& a, const Mat& b) {
    if (a.r_ != b.r_) throw std::invalid_argument("hcat height mismatch");
    Mat s(a.r_, a.c_ + b.c_);
    for (int i = 0; i < a.r_; ++i) {
        for (int j = 0; j < a.c_; ++j) s.at(i, j) = a.at(i, j);
        for (int j = 0; j < b.c_; ++j) s.at(i, a.c_ + j) = b.at(i, j);
    }
    return s;
}

Mat Mat::submatrix(int i0, int j0, int nrows, int ncols) const {
    Mat s(nrows, ncols);
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j) s.at(i, j) = at(i0 + i, j0 + j);
    return s;
}

bool Mat::is_zero() const {
    for (const auto& x : a_)
        if (x != 0) return false;
    return true;
}

bool Mat::is_zero_row(int i) const {
    for (int j = 0; j < c_; ++j)
        if (at(i, j) != 0) return false;
    return true;
}

HnfResult hnf(const Mat& m) {
    HnfResult res{m, Mat::identity(m.rows()), 0};
    Mat& h = res.h;
    Mat& u = res.u;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int piv = -1;
        for (int i = r; i < h.rows(); ++i)
            if (h.at(i, c) != 0) { piv = i; break; }
        if (piv < 0) continue;
        h.swap_rows(r, piv);
        u.swap_rows(r, piv);
        for (int i = r + 1; i < h.rows(); ++i) {
            if (h.at(i, c) == 0) continue;
            Int x, y;
            Int g = xgcd(h.at(r, c), h.at(i, c), x, y);
            Int a = h.at(r, c) / g, b = h.at(i, c) / g;
            // (row_r, row_i) <- (x*row_r + y*row_i, -b*row_r + a*row_i); det 1
            for (int k = 0; k < h.cols(); ++k) {
                Int hr = h.at(r, k), hi = h.at(i, k);
                h.at(r, k) = x * hr + y * hi;
                h.at(i, k) = -b * hr + a * hi;
            }
            for (int k = 0; k < u.cols(); ++k) {
                Int ur = u.at(r, k), ui = u.at(i, k);
                u.at(r, k) = x * ur + y * ui;
                u.at(i, k) = -b * ur + a * ui;
            }
        }
        if (h.at(r, c) < 0) { h.negate_row(r); u.negate_row(r); }
        for (int i = 0; i < r; ++i) {
            Int q = fdiv(h.at(i, c), h.at(r, c));
            h.addmul_row(i, r, q);
            u.addmul_row(i, r, q);
        }
        ++r;
    }
    res.rank = r;
    return res;
}

SnfResult snf(const Mat& m) {
    SnfResult res{m, Mat::identity(m.rows()), Mat::identity(m.cols()), {}};
    Mat& s = res.s;
    Mat& u = res.u;
    Mat& v = res.v;
    int n = std::min(m.rows(), m.cols());
    auto col_swap = [&](int i, int j) {
        if (i == j) return;
        for (int k = 0; k < s.rows(); ++k) std::swap(s.at(k, i), s.at(k, j));
        for (int k = 0; k < v.rows(); ++k) std::swap(v.at(k, i), v.at(k, j));
    };
    for (int t = 0; t < n; ++t) {
        // find a nonzero pivot in the trailing submatrix
        int pi = -1, pj = -1;
        for (int i = t; i < s.rows() && pi < 0; ++i)
            for (int j = t; j < s.cols(); ++j)
                if (s.at(i, j) != 0) { pi = i; pj = j; break; }
        if (pi < 0) break;
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        col_swap(t, pj);
        for (;;) {
            bool touched = false;
            for (int i = t + 1; i < s.rows(); ++i) {
                if (s.at(i, t) == 0) continue;
                touched = true;
                Int x, y;
                Int g = xgcd(s.at(t, t), s.at(i, t), x, y);
                Int a = s.at(t, t) / g, b = s.at(i, t) / g;
                for (int k = 0; k < s.cols(); ++k) {
                    Int sr = s.at(t, k), si = s.at(i, k);
                    s.at(t, k) = x * sr + y * si;
                    s.at(i, k) = -b * sr + a * si;
                }
                for (int k = 0; k < u.cols(); ++k) {
                    Int ur = u.at(t, k), ui = u.at(i, k);
                    u.at(t, k) = x * ur + y * ui;
                    u.at(i, k) = -b * ur + a * ui;
                }
            }
            for (int j = t + 1; j < s.cols(); ++j) {
                if (s.at(t, j) == 0) continue;
                touched = true;
                Int x, y;
                Int g = xgcd(s.at(t, t), s.at(t, j), x, y);
                Int a = s.at(t, t) / g, b = s.at(t, j) / g;
                for (int k = 0; k < s.rows(); ++k) {
                    Int sc = s.at(k, t), sj = s.at(k, j);
                    s.at(k, t) = x * sc + y * sj;
                    s.at(k, j) = -b * sc + a * sj;
                }
                for (int k = 0; k < v.rows(); ++k) {
                    Int vc = v.at(k, t), vj = v.at(k, j);
                    v.at(k, t) = x * vc + y * vj;
                    v.at(k, j) = -b * vc + a * vj;
                }
            }
            if (touched) continue;
            // pivot clean; enforce divisibility into the trailing block
            bool fixed = true;
            for (int i = t + 1; i < s.rows() && fixed; ++i)
                for (int j = t + 1; j < s.cols(); ++j)
                    if (s.at(i, j) % s.at(t, t) != 0) {
                        // add row i to row t and restart clearing
                        for (int k = 0; k < s.cols(); ++k) s.at(t, k) += s.at(i, k);
                        for (int k = 0; k < u.cols(); ++k) u.at(t, k) += u.at(i, k);
                        fixed = false;
                        break;
                    }
            if (fixed) break;
        }
        if (s.at(t, t) < 0) { s.negate_row(t); u.negate_row(t); }
    }
    for (int t = 0; t < n; ++t)
        if (s.at(t, t) != 0) res.diag.push_back(s.at(t, t));
    return res;
}

Int det(const Mat& m) {
    if (!m.is_square()) throw std::invalid_argument("det of non-square matrix");
    int n = m.rows();
    if (n == 0) return 1;
    Mat a = m;
    Int sign = 1, prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a.at(k, k) == 0) {
            int sw = -1;
            for (int i = k + 1; i < n; ++i)
                if (a.at(i, k) != 0) { sw = i; break; }
            if (sw < 0) return 0;
            a.swap_rows(k, sw);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                a.at(i, j) = (a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j)) / prev;
        prev = a.at(k, k);
    }
    return sign * a.at(n - 1, n - 1);
}

int rank_of(const Mat& m) { return hnf(m).rank; }

Mat left_kernel(const Mat& m) {
    HnfResult r = hnf(m);
    int zero_rows = m.rows() - r.rank;
    Mat k(zero_rows, m.rows());
    for (int i = 0; i < zero_rows; ++i)
        for (int j = 0; j < m.rows(); ++j) k.at(i, j) = r.u.at(r.rank + i, j);
    return k;
}

Mat inverse_unimodular(const Mat& m) {
    HnfResult r = hnf(m);
    if (r.h != Mat::identity(m.rows()))
        throw std::invalid_argument("inverse_unimodular: matrix is not unimodular");
    return r.u;
}

std::optional<Mat> solve_left(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("solve_left shape mismatch");
    HnfResult r = hnf(a);
    // express each row of b in terms of the echelon rows of h, then map back via u
    std::vector<int> pivcol(r.rank);
    for (int i = 0; i < r.rank; ++i) {
        int j = 0;
        while (j < r.h.cols() && r.h.at(i, j) == 0) ++j;
        pivcol[i] = j;
    }
    Mat coeff(b.rows(), a.rows());
    for (int bi = 0; bi < b.rows(); ++bi) {
        Mat rem = b.row(bi);
        for (int i = 0; i < r.rank; ++i) {
            const Int& p = r.h.at(i, pivcol[i]);
            Int q = rem.at(0, pivcol[i]);
            if (q % p != 0) return std::nullopt;
            q /= p;
            if (q != 0)
                for (int j = 0; j < rem.cols(); ++j) rem.at(0, j) -= q * r.h.at(i, j);
            coeff.at(bi, i) = q;
        }
        if (!rem.is_zero()) return std::nullopt;
    }
    // x = coeff * (first rank rows of u)
    Mat ur(r.rank, a.rows());
    for (int i = 0; i < r.rank; ++i)
        for (int j = 0; j < a.rows(); ++j) ur.at(i, j) = r.u.at(i, j);
    Mat coeff_r(b.rows(), r.rank);
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < r.rank; ++j) coeff_r.at(i, j) = coeff.at(i, j);
    return coeff_r * ur;
}

}  // namespace tlab
