#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qgdm/eigen.hpp"
#include "qgdm/matrix.hpp"

// Invariant checks on state construction are active in test/debug builds and
// compiled out of optimized builds (they cost an O(d^3) eigendecomposition).
#ifndef QGDM_VALIDATE
#ifdef NDEBUG
#define QGDM_VALIDATE 0
#else
#define QGDM_VALIDATE 1
#endif
#endif

namespace qgdm {

struct PureState {
    std::size_t n_qubits = 0;
    std::vector<cx> amplitudes;

    PureState() = default;
    PureState(std::size_t n, std::vector<cx> amps)
        : n_qubits(n), amplitudes(std::move(amps)) {
#if QGDM_VALIDATE
        validate();
#endif
    }

    std::size_t dim() const { return std::size_t{1} << n_qubits; }

    void validate() const {
        if (amplitudes.size() != dim())
            throw std::invalid_argument("PureState: amplitude count is not 2^n_qubits");
        double norm2 = 0.0;
        for (const auto& a : amplitudes) norm2 += std::norm(a);
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-10)
            throw std::invalid_argument("PureState: amplitudes are not unit norm");
    }
};

// Hermitian, unit-trace, PSD matrix over 2^n dimensions.
struct DensityMatrix {
    std::size_t n_qubits = 0;
    ComplexMatrix mat;

    DensityMatrix() = default;
    DensityMatrix(std::size_t n, ComplexMatrix m) : n_qubits(n), mat(std::move(m)) {
#if QGDM_VALIDATE
        validate();
#endif
    }

    // For hot loops that construct states whose invariants hold by
    // construction (unitary conjugation, partial trace of a valid state).
    static DensityMatrix unchecked(std::size_t n, ComplexMatrix m) {
        DensityMatrix rho;
        rho.n_qubits = n;
        rho.mat = std::move(m);
        return rho;
    }

    std::size_t dim() const { return std::size_t{1} << n_qubits; }

    void validate() const {
        if (!mat.square() || mat.rows() != dim())
            throw std::invalid_argument("DensityMatrix: dimension is not 2^n_qubits");
        if (hermiticity_defect(mat) > 1e-10)
            throw std::invalid_argument("DensityMatrix: not Hermitian within 1e-10");
        if (std::abs(trace(mat) - cx{1.0}) > 1e-10)
            throw std::invalid_argument("DensityMatrix: trace differs from 1 beyond 1e-10");
        const auto eig = hermitian_eig(mat);
        if (eig.eigenvalues.front() < -1e-10)
            throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
    }
};

// I / 2^n, the maximum-entropy state.
inline DensityMatrix completely_mixed(std::size_t n) {
    if (n < 1) throw std::invalid_argument("completely_mixed: need at least one qubit");
    const std::size_t d = std::size_t{1} << n;
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0 / static_cast<double>(d);
    return DensityMatrix::unchecked(n, std::move(m));
}

inline DensityMatrix from_pure(const PureState& psi) {
    const std::size_t d = psi.dim();
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            m(i, j) = psi.amplitudes[i] * std::conj(psi.amplitudes[j]);
    return DensityMatrix(psi.n_qubits, std::move(m));
}

// sum_i p_i |psi_i><psi_i|
inline DensityMatrix mix(const std::vector<PureState>& states, const std::vector<double>& probs) {
    if (states.empty() || states.size() != probs.size())
        throw std::invalid_argument("mix: need one probability per state");
    double total = 0.0;
    for (double p : probs) {
        if (p <= 0.0) throw std::invalid_argument("mix: probabilities must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("mix: probabilities must sum to 1");
    const std::size_t n = states.front().n_qubits;
    const std::size_t d = states.front().dim();
    ComplexMatrix m(d, d);
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (states[k].n_qubits != n) throw std::invalid_argument("mix: qubit counts differ");
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                m(i, j) += probs[k] * states[k].amplitudes[i] * std::conj(states[k].amplitudes[j]);
    }
    return DensityMatrix(n, std::move(m));
}

// (1 - alpha) I/d + alpha rho
inline DensityMatrix depolarize(const DensityMatrix& rho, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("depolarize: alpha must lie in [0, 1]");
    const std::size_t d = rho.dim();
    ComplexMatrix m = alpha * rho.mat;
    const double off = (1.0 - alpha) / static_cast<double>(d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) += off;
    return DensityMatrix(rho.n_qubits, std::move(m));
}

namespace detail {

// (Re tr sqrt(H(sqrt_rho sigma sqrt_rho)))^2 with the inner product
// Hermitized; round-off in sqrt_rho makes it slightly non-Hermitian
// otherwise, which the Jacobi solver rejects.
inline double fidelity_from_sqrt(const ComplexMatrix& sqrt_rho, const ComplexMatrix& sigma) {
    ComplexMatrix inner = matmul(matmul(sqrt_rho, sigma), sqrt_rho);
    const std::size_t d = inner.rows();
    for (std::size_t i = 0; i < d; ++i) {  // Hermitize (M + M^dagger)/2
        inner(i, i) = inner(i, i).real();
        for (std::size_t j = i + 1; j < d; ++j) {
            const cx avg = 0.5 * (inner(i, j) + std::conj(inner(j, i)));
            inner(i, j) = avg;
            inner(j, i) = std::conj(avg);
        }
    }
    const double t = trace(hermitian_sqrt(inner)).real();
    const double f = t * t;
    return std::min(1.0, std::max(0.0, f));
}

}  // namespace detail

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("fidelity: state dimensions differ");
    return detail::fidelity_from_sqrt(hermitian_sqrt(rho.mat), sigma.mat);
}

// sqrt(tr[(rho - sigma)^2])
inline double hs_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim())
        throw std::invalid_argument("hs_distance: state dimensions differ");
    const ComplexMatrix diff = rho.mat - sigma.mat;
    return std::sqrt(trace(matmul(diff, diff)).real());
}

// (tr(rho X), tr(rho Y), tr(rho Z)) for a single qubit.
inline std::array<double, 3> bloch_coordinates(const DensityMatrix& rho) {
    if (rho.n_qubits != 1)
        throw std::invalid_argument("bloch_coordinates: single-qubit states only");
    const double x = 2.0 * rho.mat(0, 1).real();
    const double y = -2.0 * rho.mat(0, 1).imag();
    const double z = rho.mat(0, 0).real() - rho.mat(1, 1).real();
    return {x, y, z};
}

}  // namespace qgdm
