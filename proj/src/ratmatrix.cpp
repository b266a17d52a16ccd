#include "srflat/ratmatrix.hpp"

#include <sstream>
#include <stdexcept>

namespace srflat {

RatMatrix RatMatrix::identity(size_t n) {
    RatMatrix m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RatMatrix RatMatrix::diagonal(const RatVec& d) {
    RatMatrix m(d.size(), d.size());
    for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

RatMatrix RatMatrix::from_rows(const std::vector<RatVec>& rows) {
    if (rows.empty()) return {};
    RatMatrix m(rows.size(), rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) throw std::invalid_argument("ragged rows");
        for (size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

RatMatrix RatMatrix::from_cols(const std::vector<RatVec>& cols) { return from_rows(cols).transpose(); }

RatVec RatMatrix::row(size_t i) const { return RatVec(a_.begin() + i * c_, a_.begin() + (i + 1) * c_); }

RatVec RatMatrix::col(size_t j) const {
    RatVec v(r_);
    for (size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
}

RatMatrix RatMatrix::transpose() const {
    RatMatrix t(c_, r_);
    for (size_t i = 0; i < r_; ++i)
        for (size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

RatMatrix RatMatrix::block(size_t i0, size_t j0, size_t nr, size_t nc) const {
    RatMatrix b(nr, nc);
    for (size_t i = 0; i < nr; ++i)
        for (size_t j = 0; j < nc; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
    return b;
}

void RatMatrix::set_block(size_t i0, size_t j0, const RatMatrix& b) {
    for (size_t i = 0; i < b.rows(); ++i)
        for (size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

bool RatMatrix::is_zero() const {
    for (const auto& x : a_)
        if (sgn(x) != 0) return false;
    return true;
}

mpq_class RatMatrix::trace() const {
    mpq_class t = 0;
    for (size_t i = 0; i < std::min(r_, c_); ++i) t += (*this)(i, i);
    return t;
}

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) {
    RatMatrix m(a.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j) + b(i, j);
    return m;
}

RatMatrix operator-(const RatMatrix& a, const RatMatrix& b) {
    RatMatrix m(a.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j) - b(i, j);
    return m;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix shape mismatch");
    RatMatrix m(a.rows(), b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t k = 0; k < a.cols(); ++k) {
            if (sgn(a(i, k)) == 0) continue;
            for (size_t j = 0; j < b.cols(); ++j)
                if (sgn(b(k, j)) != 0) m(i, j) += a(i, k) * b(k, j);
        }
    return m;
}

RatMatrix operator*(const mpq_class& s, const RatMatrix& a) {
    RatMatrix m = a;
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) m(i, j) *= s;
    return m;
}

RatVec operator*(const RatMatrix& a, const RatVec& v) {
    if (a.cols() != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
    RatVec out(a.rows());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j)
            if (sgn(a(i, j)) != 0 && sgn(v[j]) != 0) out[i] += a(i, j) * v[j];
    return out;
}

RatMatrix kron(const RatMatrix& a, const RatMatrix& b) {
    RatMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) {
            if (sgn(a(i, j)) == 0) continue;
            for (size_t k = 0; k < b.rows(); ++k)
                for (size_t l = 0; l < b.cols(); ++l) m(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return m;
}

mpq_class dot(const RatVec& a, const RatVec& b) {
    mpq_class s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

mpq_class bilinear(const RatVec& a, const RatMatrix& G, const RatVec& b) { return dot(a, G * b); }

bool is_zero(const RatVec& v) {
    for (const auto& x : v)
        if (sgn(x) != 0) return false;
    return true;
}

namespace {

// Rows scaled to integers.
std::vector<std::vector<mpz_class>> integer_rows(const RatMatrix& m) {
    std::vector<std::vector<mpz_class>> a(m.rows(), std::vector<mpz_class>(m.cols()));
    for (size_t i = 0; i < m.rows(); ++i) {
        mpz_class l = 1;
        for (size_t j = 0; j < m.cols(); ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
        for (size_t j = 0; j < m.cols(); ++j) a[i][j] = m(i, j).get_num() * (l / m(i, j).get_den());
    }
    return a;
}

// Bareiss forward elimination with row swaps; returns rank, sets sign and the last pivot.
size_t bareiss(std::vector<std::vector<mpz_class>>& a, size_t cols, int& sign) {
    size_t rows = a.size(), r = 0;
    mpz_class prev = 1;
    sign = 1;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        if (p != r) {
            std::swap(a[p], a[r]);
            sign = -sign;
        }
        for (size_t i = r + 1; i < rows; ++i) {
            for (size_t j = c + 1; j < cols; ++j) {
                a[i][j] = a[r][c] * a[i][j] - a[i][c] * a[r][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        ++r;
    }
    return r;
}

}  // namespace

mpq_class determinant(const RatMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
    size_t n = m.rows();
    if (n == 0) return 1;
    mpq_class scale = 1;
    for (size_t i = 0; i < n; ++i) {
        mpz_class l = 1;
        for (size_t j = 0; j < n; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
        scale *= mpq_class(l);
    }
    auto a = integer_rows(m);
    int sign;
    if (bareiss(a, n, sign) < n) return 0;
    mpq_class d(a[n - 1][n - 1]);
    d *= sign;
    return d / scale;
}

size_t rank(const RatMatrix& m) {
    auto a = integer_rows(m);
    int sign;
    return bareiss(a, m.cols(), sign);
}

RatMatrix rref(RatMatrix m, std::vector<size_t>* pivots) {
    size_t r = 0;
    if (pivots) pivots->clear();
    for (size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        size_t p = r;
        while (p < m.rows() && sgn(m(p, c)) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != r)
            for (size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
        mpq_class inv = 1 / m(r, c);
        for (size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i == r || sgn(m(i, c)) == 0) continue;
            mpq_class f = m(i, c);
            for (size_t j = c; j < m.cols(); ++j)
                if (sgn(m(r, j)) != 0) m(i, j) -= f * m(r, j);
        }
        if (pivots) pivots->push_back(c);
        ++r;
    }
    return m;
}

std::vector<RatVec> nullspace(const RatMatrix& m) {
    std::vector<size_t> piv;
    RatMatrix R = rref(m, &piv);
    std::vector<bool> is_piv(m.cols(), false);
    for (size_t p : piv) is_piv[p] = true;
    std::vector<RatVec> basis;
    for (size_t f = 0; f < m.cols(); ++f) {
        if (is_piv[f]) continue;
        RatVec v(m.cols());
        v[f] = 1;
        for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -R(i, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<RatMatrix> inverse(const RatMatrix& m) {
    size_t n = m.rows();
    if (n != m.cols()) return std::nullopt;
    RatMatrix aug(n, 2 * n);
    aug.set_block(0, 0, m);
    aug.set_block(0, n, RatMatrix::identity(n));
    std::vector<size_t> piv;
    RatMatrix R = rref(aug, &piv);
    if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
    return R.block(0, n, n, n);
}

std::optional<RatVec> solve(const RatMatrix& m, const RatVec& rhs) {
    RatMatrix aug(m.rows(), m.cols() + 1);
    aug.set_block(0, 0, m);
    for (size_t i = 0; i < m.rows(); ++i) aug(i, m.cols()) = rhs[i];
    std::vector<size_t> piv;
    RatMatrix R = rref(aug, &piv);
    if (!piv.empty() && piv.back() == m.cols()) return std::nullopt;
    RatVec x(m.cols());
    for (size_t i = 0; i < piv.size(); ++i) x[piv[i]] = R(i, m.cols());
    return x;
}

bool positive_definite(const RatMatrix& m) {
    if (m.rows() != m.cols() || !(m == m.transpose())) return false;
    for (size_t k = 1; k <= m.rows(); ++k)
        if (sgn(determinant(m.block(0, 0, k, k))) <= 0) return false;
    return true;
}

Eigen::MatrixXd to_eigen(const RatMatrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j).get_d();
    return e;
}

std::string to_string(const RatMatrix& m) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < m.rows(); ++i) {
        os << (i ? ", [" : "[");
        for (size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j).get_str();
        os << "]";
    }
    os << "]";
    return os.str();
}

}  // namespace srflat
