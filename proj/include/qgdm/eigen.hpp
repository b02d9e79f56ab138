#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qgdm/matrix.hpp"

namespace qgdm {

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // columns, orthonormal
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

// One complex Jacobi rotation zeroing m(p,q). The 2x2 pivot block is phased
// into a real symmetric block, rotated by the classic Givens angle, and the
// rotation is accumulated into v.
inline void jacobi_rotate(ComplexMatrix& m, ComplexMatrix& v, std::size_t p, std::size_t q) {
    const cx apq = m(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;
    const double app = m(p, p).real();
    const double aqq = m(q, q).real();
    const cx w = apq / r;  // unit modulus

    const double tau = (aqq - app) / (2.0 * r);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;

    // rotation in the (p,q) plane: R = [[c, s], [-s*conj(w), c*conj(w)]]
    const cx rpp = c, rpq = s;
    const cx rqp = -s * std::conj(w), rqq = c * std::conj(w);

    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {  // columns: m <- m R
        const cx mip = m(i, p), miq = m(i, q);
        m(i, p) = mip * rpp + miq * rqp;
        m(i, q) = mip * rpq + miq * rqq;
    }
    for (std::size_t j = 0; j < n; ++j) {  // rows: m <- R^dagger m
        const cx mpj = m(p, j), mqj = m(q, j);
        m(p, j) = std::conj(rpp) * mpj + std::conj(rqp) * mqj;
        m(q, j) = std::conj(rpq) * mpj + std::conj(rqq) * mqj;
    }
    // pin the analytically known results against round-off
    m(p, q) = 0.0;
    m(q, p) = 0.0;
    m(p, p) = app - t * r;
    m(q, q) = aqq + t * r;

    for (std::size_t i = 0; i < n; ++i) {  // v <- v R
        const cx vip = v(i, p), viq = v(i, q);
        v(i, p) = vip * rpp + viq * rqp;
        v(i, q) = vip * rpq + viq * rqq;
    }
}

}  // namespace detail

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps. Sweeps
// run until the off-diagonal Frobenius mass drops below 1e-12, capped at 100.
inline EigenDecomposition hermitian_eig(const ComplexMatrix& a) {
    if (!a.square()) throw std::invalid_argument("hermitian_eig: matrix must be square");
    if (hermiticity_defect(a) > 1e-10)
        throw std::invalid_argument("hermitian_eig: input is not Hermitian within 1e-10");

    const std::size_t n = a.rows();
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {  // exact Hermitian symmetrization
        m(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);

    constexpr double kOffTol = 1e-12;
    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        if (detail::off_diagonal_norm(m) < kOffTol) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(m, v, p, q);
    }
    if (sweep == kMaxSweeps && detail::off_diagonal_norm(m) >= kOffTol)
        throw std::runtime_error("hermitian_eig: Jacobi iteration did not converge");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return m(i, i).real() < m(j, j).real(); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = m(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

// Principal square root of a Hermitian PSD matrix. Eigenvalues in (-1e-8, 0)
// are treated as round-off and clamped to zero; anything below -1e-8 is a
// genuine PSD violation and rejected.
inline ComplexMatrix hermitian_sqrt(const ComplexMatrix& a) {
    EigenDecomposition eig = hermitian_eig(a);
    const std::size_t n = a.rows();
    std::vector<double> roots(n);
    for (std::size_t k = 0; k < n; ++k) {
        double lambda = eig.eigenvalues[k];
        if (lambda < -1e-8)
            throw std::runtime_error("hermitian_sqrt: eigenvalue " + std::to_string(lambda) +
                                     " below PSD tolerance");
        roots[k] = std::sqrt(std::max(lambda, 0.0));
    }
    const ComplexMatrix& vec = eig.eigenvectors;
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cx sum{};
            for (std::size_t k = 0; k < n; ++k)
                sum += vec(i, k) * roots[k] * std::conj(vec(j, k));
            out(i, j) = sum;
        }
    return out;
}

}  // namespace qgdm
