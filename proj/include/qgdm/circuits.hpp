#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgdm/matrix.hpp"
#include "qgdm/qstate.hpp"
#include "qgdm/rng.hpp"

namespace qgdm {

enum class GateKind { RX, RY, RZ, ZZ, XX };

inline std::size_t gate_arity(GateKind kind) {
    return (kind == GateKind::ZZ || kind == GateKind::XX) ? 2 : 1;
}

// A gate's angle comes either from a trainable parameter vector slot or from
// the circuit's fixed scalar input (the timestep value t').
inline constexpr int kFixedParam = -1;

struct GateSpec {
    GateKind kind;
    std::size_t qubits[2];
    int param_index;  // >= 0: trainable slot, kFixedParam: fixed scalar
};

struct CircuitTemplate {
    std::size_t n_qubits = 0;
    std::vector<GateSpec> gates;
    std::size_t n_params = 0;

    std::size_t dim() const { return std::size_t{1} << n_qubits; }

    void validate() const {
        std::vector<bool> seen(n_params, false);
        for (const auto& g : gates) {
            const std::size_t arity = gate_arity(g.kind);
            for (std::size_t k = 0; k < arity; ++k)
                if (g.qubits[k] >= n_qubits)
                    throw std::invalid_argument("CircuitTemplate: qubit index out of range");
            if (arity == 2 && g.qubits[0] == g.qubits[1])
                throw std::invalid_argument("CircuitTemplate: two-qubit gate needs distinct qubits");
            if (g.param_index != kFixedParam) {
                if (g.param_index < 0 || static_cast<std::size_t>(g.param_index) >= n_params)
                    throw std::invalid_argument("CircuitTemplate: parameter index out of range");
                seen[g.param_index] = true;
            }
        }
        for (std::size_t i = 0; i < n_params; ++i)
            if (!seen[i])
                throw std::invalid_argument("CircuitTemplate: parameter " + std::to_string(i) +
                                            " is never referenced");
    }
};

// R_P(phi) = exp(-i phi P / 2) for P in {X, Y, Z}; exp(-i phi (P x P) / 2)
// for the two-qubit ZZ / XX entanglers.
inline ComplexMatrix gate_unitary(GateKind kind, double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("gate_unitary: angle must be finite");
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    switch (kind) {
        case GateKind::RX: {
            ComplexMatrix u(2, 2);
            u(0, 0) = c;
            u(0, 1) = cx{0, -s};
            u(1, 0) = cx{0, -s};
            u(1, 1) = c;
            return u;
        }
        case GateKind::RY: {
            ComplexMatrix u(2, 2);
            u(0, 0) = c;
            u(0, 1) = -s;
            u(1, 0) = s;
            u(1, 1) = c;
            return u;
        }
        case GateKind::RZ: {
            ComplexMatrix u(2, 2);
            u(0, 0) = cx{c, -s};
            u(1, 1) = cx{c, s};
            return u;
        }
        case GateKind::ZZ: {
            ComplexMatrix u(4, 4);
            u(0, 0) = cx{c, -s};
            u(1, 1) = cx{c, s};
            u(2, 2) = cx{c, s};
            u(3, 3) = cx{c, -s};
            return u;
        }
        case GateKind::XX: {
            // cos(phi/2) I - i sin(phi/2) (X x X)
            ComplexMatrix u(4, 4);
            for (std::size_t i = 0; i < 4; ++i) {
                u(i, i) = c;
                u(i, 3 - i) = cx{0, -s};
            }
            return u;
        }
    }
    throw std::invalid_argument("gate_unitary: unknown gate kind");
}

// Embeds a 1- or 2-qubit unitary into the full register: identity on every
// other qubit, with arbitrary (also non-adjacent) target positions. Qubit 0
// is the most significant index bit.
inline ComplexMatrix embed_gate(const ComplexMatrix& u, std::size_t n_qubits,
                                std::span<const std::size_t> qubits) {
    const std::size_t d = std::size_t{1} << n_qubits;
    const std::size_t k = qubits.size();
    if (u.rows() != (std::size_t{1} << k))
        throw std::invalid_argument("embed_gate: unitary size does not match qubit count");

    std::vector<std::size_t> shift(k);
    std::size_t rest_mask = d - 1;
    for (std::size_t a = 0; a < k; ++a) {
        shift[a] = n_qubits - 1 - qubits[a];
        rest_mask &= ~(std::size_t{1} << shift[a]);
    }
    auto sub_index = [&](std::size_t i) {
        std::size_t s = 0;
        for (std::size_t a = 0; a < k; ++a) s = (s << 1) | ((i >> shift[a]) & 1);
        return s;
    };

    ComplexMatrix full(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t rest = i & rest_mask;
        const std::size_t si = sub_index(i);
        // columns j agreeing with i outside the gate's qubits
        for (std::size_t sj = 0; sj < u.cols(); ++sj) {
            std::size_t j = rest;
            for (std::size_t a = 0; a < k; ++a)
                j |= ((sj >> (k - 1 - a)) & 1) << shift[a];
            full(i, j) = u(si, sj);
        }
    }
    return full;
}

inline double gate_angle(const GateSpec& g, std::span<const double> params, double fixed) {
    return g.param_index == kFixedParam ? fixed : params[static_cast<std::size_t>(g.param_index)];
}

// Product of all embedded gate unitaries, first gate rightmost.
inline ComplexMatrix circuit_unitary(const CircuitTemplate& tmpl, std::span<const double> params,
                                     double fixed) {
    if (params.size() != tmpl.n_params)
        throw std::invalid_argument("circuit_unitary: parameter count mismatch");
    ComplexMatrix total = ComplexMatrix::identity(tmpl.dim());
    for (const auto& g : tmpl.gates) {
        const ComplexMatrix u = gate_unitary(g.kind, gate_angle(g, params, fixed));
        const ComplexMatrix full = embed_gate(u, tmpl.n_qubits, {g.qubits, gate_arity(g.kind)});
        total = matmul(full, total);
    }
    return total;
}

// Sequential conjugation of rho by each gate in order.
inline DensityMatrix apply_circuit(const CircuitTemplate& tmpl, std::span<const double> params,
                                   double fixed, const DensityMatrix& rho) {
    if (params.size() != tmpl.n_params)
        throw std::invalid_argument("apply_circuit: parameter count mismatch");
    if (rho.n_qubits != tmpl.n_qubits)
        throw std::invalid_argument("apply_circuit: state and template qubit counts differ");
    ComplexMatrix m = rho.mat;
    for (const auto& g : tmpl.gates) {
        const ComplexMatrix u = gate_unitary(g.kind, gate_angle(g, params, fixed));
        const ComplexMatrix full = embed_gate(u, tmpl.n_qubits, {g.qubits, gate_arity(g.kind)});
        m = unitary_conjugate(full, m);
    }
    return DensityMatrix(rho.n_qubits, std::move(m));
}

namespace detail {

inline void add_zz_ring(CircuitTemplate& tmpl, std::size_t n, std::size_t& next) {
    if (n < 2) return;
    for (std::size_t q = 0; q < n; ++q)
        tmpl.gates.push_back({GateKind::ZZ, {q, (q + 1) % n}, static_cast<int>(next++)});
}

}  // namespace detail

// Per layer: RX(fixed scalar) then RY(trainable) on every qubit, then a
// nearest-neighbour ring of trainable ZZ entanglers. The fixed scalar is
// re-injected in every layer.
inline CircuitTemplate timestep_embedding_template(std::size_t n_tau, std::size_t layers) {
    if (n_tau < 1 || layers < 1)
        throw std::invalid_argument("timestep_embedding_template: need n_tau >= 1, layers >= 1");
    CircuitTemplate tmpl;
    tmpl.n_qubits = n_tau;
    std::size_t next = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t q = 0; q < n_tau; ++q) {
            tmpl.gates.push_back({GateKind::RX, {q, 0}, kFixedParam});
            tmpl.gates.push_back({GateKind::RY, {q, 0}, static_cast<int>(next++)});
        }
        detail::add_zz_ring(tmpl, n_tau, next);
    }
    tmpl.n_params = next;
    return tmpl;
}

// Per layer: RZ, RX, RZ on every qubit, then a trainable XX entangler on
// every unordered qubit pair.
inline CircuitTemplate denoising_template(std::size_t n, std::size_t layers) {
    if (n < 1 || layers < 1)
        throw std::invalid_argument("denoising_template: need n >= 1, layers >= 1");
    CircuitTemplate tmpl;
    tmpl.n_qubits = n;
    std::size_t next = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            tmpl.gates.push_back({GateKind::RZ, {q, 0}, static_cast<int>(next++)});
            tmpl.gates.push_back({GateKind::RX, {q, 0}, static_cast<int>(next++)});
            tmpl.gates.push_back({GateKind::RZ, {q, 0}, static_cast<int>(next++)});
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                tmpl.gates.push_back({GateKind::XX, {i, j}, static_cast<int>(next++)});
    }
    tmpl.n_params = next;
    return tmpl;
}

// Per layer: RY and RZ on every qubit plus a ZZ ring; used to draw target
// states with angles sampled uniformly from [0, pi].
inline CircuitTemplate state_prep_template(std::size_t n, std::size_t layers) {
    if (n < 1 || layers < 1)
        throw std::invalid_argument("state_prep_template: need n >= 1, layers >= 1");
    CircuitTemplate tmpl;
    tmpl.n_qubits = n;
    std::size_t next = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t q = 0; q < n; ++q) {
            tmpl.gates.push_back({GateKind::RY, {q, 0}, static_cast<int>(next++)});
            tmpl.gates.push_back({GateKind::RZ, {q, 0}, static_cast<int>(next++)});
        }
        detail::add_zz_ring(tmpl, n, next);
    }
    tmpl.n_params = next;
    return tmpl;
}

inline PureState random_pure_state(std::size_t n, std::size_t prep_layers, Xoshiro256ss& rng) {
    const CircuitTemplate tmpl = state_prep_template(n, prep_layers);
    std::vector<double> params(tmpl.n_params);
    for (auto& p : params) p = rng.uniform(0.0, M_PI);
    const ComplexMatrix u = circuit_unitary(tmpl, params, 0.0);
    std::vector<cx> amps(tmpl.dim());
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = u(i, 0);  // u |0...0>
    return PureState(n, std::move(amps));
}

// Mixture of k random pure states with probabilities given by a softmax over
// k uniform draws from (0, 1].
inline DensityMatrix random_mixed_state(std::size_t n, std::size_t k, std::size_t prep_layers,
                                        Xoshiro256ss& rng) {
    if (k < 2) throw std::invalid_argument("random_mixed_state: need k >= 2 components");
    std::vector<PureState> states;
    states.reserve(k);
    for (std::size_t i = 0; i < k; ++i) states.push_back(random_pure_state(n, prep_layers, rng));
    std::vector<double> logits(k);
    for (auto& v : logits) v = rng.uniform_open_closed();
    double denom = 0.0;
    for (double v : logits) denom += std::exp(v);
    std::vector<double> probs(k);
    for (std::size_t i = 0; i < k; ++i) probs[i] = std::exp(logits[i]) / denom;
    return mix(states, probs);
}

}  // namespace qgdm
