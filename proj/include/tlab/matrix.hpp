#pragma once

#include <initializer_list>
#include <optional>
#include <vector>

#include "tlab/int.hpp"

namespace tlab {

// dense row-major integer matrix
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : r_(rows), c_(cols), a_(size_t(rows) * cols, Int(0)) {}
    Mat(std::initializer_list<std::initializer_list<Int>> rows);

    static Mat identity(int n);
    static Mat zero(int rows, int cols) { return Mat(rows, cols); }
    static Mat diag(const std::vector<Int>& d);

    int rows() const { return r_; }
    int cols() const { return c_; }
    Int& at(int i, int j) { return a_[size_t(i) * c_ + j]; }
    const Int& at(int i, int j) const { return a_[size_t(i) * c_ + j]; }

    bool operator==(const Mat&) const = default;

    Mat transpose() const;
    Mat operator*(const Mat& o) const;
    Mat operator+(const Mat& o) const;
    Mat operator-() const;
    Mat scaled(const Int& c) const;
    Mat pow(unsigned long k) const;  // square only

    Mat row(int i) const;
    void swap_rows(int i, int j);
    void negate_row(int i);
    // row i -= q * row j
    void addmul_row(int i, int j, const Int& q);

    // stack vertically (same cols)
    static Mat vstack(const Mat& a, const Mat& b);
    // block diagonal
    static Mat block_diag(const Mat& a, const Mat& b);
    // horizontal concat (same rows)
    static Mat hcat(const Mat& a, const Mat& b);
    Mat submatrix(int i0, int j0, int nrows, int ncols) const;

    bool is_zero() const;
    bool is_zero_row(int i) const;
    bool is_square() const { return r_ == c_; }

private:
    int r_ = 0, c_ = 0;
    std::vector<Int> a_;
};

struct HnfResult {
    Mat h;  // canonical row HNF of input
    Mat u;  // unimodular, u * input == h
    int rank = 0;
};

// canonical row Hermite normal form: row echelon, positive pivots,
// entries above each pivot reduced into [0, pivot)
HnfResult hnf(const Mat& m);

struct SnfResult {
    Mat s;        // diagonal with divisibility chain d1 | d2 | ...
    Mat u, v;     // unimodular, u * input * v == s
    std::vector<Int> diag;  // nonzero diagonal entries
};

SnfResult snf(const Mat& m);

// exact determinant (Bareiss)
Int det(const Mat& m);

int rank_of(const Mat& m);

// rows x spanning the left kernel {x : x*m == 0}, saturated lattice basis
Mat left_kernel(const Mat& m);

// inverse of a unimodular integer matrix
Mat inverse_unimodular(const Mat& m);

// solve x * a == b for integer x (rows of b in the row space of a);
// nullopt if no integral solution
std::optional<Mat> solve_left(const Mat& a, const Mat& b);

}  // namespace tlab
