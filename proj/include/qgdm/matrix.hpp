#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgdm {

using cx = std::complex<double>;

enum class Subsystem { A, B };

// Dense complex matrix, row-major.
//
// Index convention used throughout: qubit 0 is the most significant bit of a
// computational-basis index, and a composite system A (x) B keeps A in the
// high bits.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::vector<cx>& data() { return a_; }
    const std::vector<cx>& data() const { return a_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cx> a_;
};

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions differ (" +
                                    std::to_string(a.cols()) + " vs " +
                                    std::to_string(b.rows()) + ")");
    ComplexMatrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), m = a.cols(), p = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        cx* ci = &c.data()[i * p];
        for (std::size_t k = 0; k < m; ++k) {
            const cx aik = a(i, k);
            if (aik == cx{}) continue;
            const cx* bk = &b.data()[k * p];
            for (std::size_t j = 0; j < p; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    const std::size_t p = b.rows(), q = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cx aij = a(i, j);
            if (aij == cx{}) continue;
            for (std::size_t k = 0; k < p; ++k)
                for (std::size_t l = 0; l < q; ++l)
                    c(i * p + k, j * q + l) = aij * b(k, l);
        }
    return c;
}

inline cx trace(const ComplexMatrix& a) {
    if (!a.square()) throw std::invalid_argument("trace: matrix must be square");
    cx t{};
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

// Reduced matrix of a composite system of dimension dim_a * dim_b, with A on
// the most significant index block. Trace is preserved.
inline ComplexMatrix partial_trace(const ComplexMatrix& a, std::size_t dim_a,
                                   std::size_t dim_b, Subsystem keep) {
    if (!a.square() || a.rows() != dim_a * dim_b)
        throw std::invalid_argument("partial_trace: matrix dimension is not dim_a*dim_b");
    if (keep == Subsystem::A) {
        ComplexMatrix out(dim_a, dim_a);
        for (std::size_t i = 0; i < dim_a; ++i)
            for (std::size_t j = 0; j < dim_a; ++j) {
                cx sum{};
                for (std::size_t k = 0; k < dim_b; ++k)
                    sum += a(i * dim_b + k, j * dim_b + k);
                out(i, j) = sum;
            }
        return out;
    }
    ComplexMatrix out(dim_b, dim_b);
    for (std::size_t k = 0; k < dim_b; ++k)
        for (std::size_t l = 0; l < dim_b; ++l) {
            cx sum{};
            for (std::size_t i = 0; i < dim_a; ++i)
                sum += a(i * dim_b + k, i * dim_b + l);
            out(k, l) = sum;
        }
    return out;
}

inline ComplexMatrix dagger(const ComplexMatrix& a) {
    ComplexMatrix c(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
    return c;
}

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix add: shape mismatch");
    ComplexMatrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix sub: shape mismatch");
    ComplexMatrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

inline ComplexMatrix operator*(cx s, const ComplexMatrix& a) {
    ComplexMatrix c = a;
    for (auto& v : c.data()) v *= s;
    return c;
}

// u * m * u^dagger
inline ComplexMatrix unitary_conjugate(const ComplexMatrix& u, const ComplexMatrix& m) {
    return matmul(matmul(u, m), dagger(u));
}

inline double frobenius_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (const auto& v : a.data()) s += std::norm(v);
    return std::sqrt(s);
}

// ||a - a^dagger||_F
inline double hermiticity_defect(const ComplexMatrix& a) {
    if (!a.square()) throw std::invalid_argument("hermiticity_defect: matrix must be square");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            s += std::norm(a(i, j) - std::conj(a(j, i)));
    return std::sqrt(s);
}

}  // namespace qgdm
