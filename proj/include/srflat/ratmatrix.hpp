#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace srflat {

using RatVec = std::vector<mpq_class>;

// Dense exact rational matrix, row-major.
class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(size_t rows, size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}
    static RatMatrix identity(size_t n);
    static RatMatrix diagonal(const RatVec& d);
    static RatMatrix from_rows(const std::vector<RatVec>& rows);
    static RatMatrix from_cols(const std::vector<RatVec>& cols);

    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    mpq_class& operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
    const mpq_class& operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }

    RatVec row(size_t i) const;
    RatVec col(size_t j) const;
    RatMatrix transpose() const;
    RatMatrix block(size_t i0, size_t j0, size_t nr, size_t nc) const;
    void set_block(size_t i0, size_t j0, const RatMatrix& b);
    bool is_zero() const;
    mpq_class trace() const;

    friend bool operator==(const RatMatrix& a, const RatMatrix& b) {
        return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
    }

private:
    size_t r_ = 0, c_ = 0;
    std::vector<mpq_class> a_;
};

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator*(const mpq_class& s, const RatMatrix& a);
RatVec operator*(const RatMatrix& a, const RatVec& v);
RatMatrix kron(const RatMatrix& a, const RatMatrix& b);

mpq_class dot(const RatVec& a, const RatVec& b);
// a^T G b
mpq_class bilinear(const RatVec& a, const RatMatrix& G, const RatVec& b);
bool is_zero(const RatVec& v);

// Fraction-free (Bareiss) elimination on the denominator-cleared integer matrix.
mpq_class determinant(const RatMatrix& m);
size_t rank(const RatMatrix& m);

// Reduced row echelon form; pivots receives the pivot columns.
RatMatrix rref(RatMatrix m, std::vector<size_t>* pivots = nullptr);
std::vector<RatVec> nullspace(const RatMatrix& m);
std::optional<RatMatrix> inverse(const RatMatrix& m);
std::optional<RatVec> solve(const RatMatrix& m, const RatVec& rhs);
bool positive_definite(const RatMatrix& m);

Eigen::MatrixXd to_eigen(const RatMatrix& m);
std::string to_string(const RatMatrix& m);

}  // namespace srflat
