#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qgdm/circuits.hpp"
#include "qgdm/matrix.hpp"
#include "qgdm/qstate.hpp"

namespace qgdm {

enum class Variant { QGDM, RQGDM, Naive };

inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::QGDM: return "qgdm";
        case Variant::RQGDM: return "rqgdm";
        case Variant::Naive: return "naive";
    }
    throw std::invalid_argument("variant_name: unknown variant");
}

inline Variant variant_from_name(const std::string& name) {
    if (name == "qgdm") return Variant::QGDM;
    if (name == "rqgdm") return Variant::RQGDM;
    if (name == "naive") return Variant::Naive;
    throw std::invalid_argument("unknown variant '" + name + "' (expected qgdm, rqgdm or naive)");
}

// Trainable parameters: omega for the timestep embedding, plus either theta
// (single denoising circuit) or theta1/theta2 (compress + recombine).
struct ModelParams {
    std::vector<double> omega;
    std::vector<double> theta;
    std::vector<double> theta1;
    std::vector<double> theta2;

    std::size_t total() const {
        return omega.size() + theta.size() + theta1.size() + theta2.size();
    }

    std::vector<double> flatten() const {
        std::vector<double> flat;
        flat.reserve(total());
        for (const auto* v : {&omega, &theta, &theta1, &theta2})
            flat.insert(flat.end(), v->begin(), v->end());
        return flat;
    }

    void assign_flat(std::span<const double> flat) {
        if (flat.size() != total())
            throw std::invalid_argument("ModelParams: flat vector length mismatch");
        std::size_t off = 0;
        for (auto* v : {&omega, &theta, &theta1, &theta2}) {
            std::copy(flat.begin() + off, flat.begin() + off + v->size(), v->begin());
            off += v->size();
        }
    }
};

// The trainable backward process f(rho_t, t). One parameter set serves every
// timestep; t enters through the embedding state.
struct BackwardModel {
    Variant variant = Variant::QGDM;
    std::size_t n = 0;      // target register qubits
    std::size_t n_tau = 0;  // embedding register qubits
    std::size_t T = 0;
    std::size_t embed_layers = 0;
    std::size_t denoise_layers = 0;
    CircuitTemplate embed_template;
    CircuitTemplate denoise_template;    // QGDM / Naive
    CircuitTemplate compress_template;   // RQGDM U1 (n qubits)
    CircuitTemplate recombine_template;  // RQGDM U2 (n + 1 qubits)
    ModelParams params;

    std::size_t composite_qubits() const {
        return variant == Variant::RQGDM ? n + 1 : n_tau + n;
    }
};

inline BackwardModel make_model(Variant variant, std::size_t n, std::size_t n_tau, std::size_t T,
                                std::size_t embed_layers, std::size_t denoise_layers) {
    if (n < 1) throw std::invalid_argument("make_model: need n >= 1");
    if (T < 1) throw std::invalid_argument("make_model: need T >= 1");
    BackwardModel model;
    model.variant = variant;
    model.n = n;
    model.T = T;
    model.embed_layers = embed_layers;
    model.denoise_layers = denoise_layers;
    if (variant == Variant::RQGDM) {
        if (n < 2) throw std::invalid_argument("make_model: rqgdm needs n >= 2");
        // the recombine circuit spans the embedding register plus one
        // compressed qubit, so the embedding register is fixed at n qubits
        model.n_tau = n;
        model.embed_template = timestep_embedding_template(model.n_tau, embed_layers);
        model.compress_template = denoising_template(n, denoise_layers);
        model.recombine_template = denoising_template(n + 1, denoise_layers);
        model.params.theta1.assign(model.compress_template.n_params, 0.0);
        model.params.theta2.assign(model.recombine_template.n_params, 0.0);
    } else {
        if (n_tau < 1) throw std::invalid_argument("make_model: need n_tau >= 1");
        model.n_tau = n_tau;
        model.embed_template = timestep_embedding_template(n_tau, embed_layers);
        model.denoise_template = denoising_template(n_tau + n, denoise_layers);
        model.params.theta.assign(model.denoise_template.n_params, 0.0);
    }
    model.params.omega.assign(model.embed_template.n_params, 0.0);
    return model;
}

namespace detail {

inline DensityMatrix pure_zero_conjugate(const ComplexMatrix& u, std::size_t n_qubits) {
    // u (|0..0><0..0|) u^dagger from the first column of u
    const std::size_t d = u.rows();
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = u(i, 0) * std::conj(u(j, 0));
    return DensityMatrix::unchecked(n_qubits, std::move(m));
}

}  // namespace detail

// Timestep embedding state tau_t produced by the embedding circuit on
// |0...0> with fixed scalar t' = t*pi/T. Always a pure state.
inline DensityMatrix embed_timestep(const BackwardModel& model, std::size_t t) {
    if (t < 1 || t > model.T) throw std::invalid_argument("embed_timestep: t outside 1..T");
    const double t_prime = static_cast<double>(t) * M_PI / static_cast<double>(model.T);
    const ComplexMatrix u = circuit_unitary(model.embed_template, model.params.omega, t_prime);
    return detail::pure_zero_conjugate(u, model.n_tau);
}

// Caches the composed circuit unitaries for one parameter setting. The
// composition is parameter-dependent but timestep-independent, so training
// and generation reuse it across every t they touch.
class PreparedBackward {
public:
    explicit PreparedBackward(const BackwardModel& model) : model_(&model) {
        if (model.variant == Variant::RQGDM) {
            compress_u_ = circuit_unitary(model.compress_template, model.params.theta1, 0.0);
            recombine_u_ = circuit_unitary(model.recombine_template, model.params.theta2, 0.0);
        } else {
            denoise_u_ = circuit_unitary(model.denoise_template, model.params.theta, 0.0);
        }
    }

    const BackwardModel& model() const { return *model_; }

    DensityMatrix embed(std::size_t t) const { return embed_timestep(*model_, t); }

    DensityMatrix apply(const DensityMatrix& rho_t, std::size_t t) const {
        return apply_impl(rho_t, t, nullptr);
    }

    // As apply(), additionally reporting the Hilbert-Schmidt distance between
    // the denoising circuit's composite input and output (QGDM/Naive only).
    DensityMatrix apply_tracking_hs(const DensityMatrix& rho_t, std::size_t t,
                                    double* hs_out) const {
        return apply_impl(rho_t, t, hs_out);
    }

private:
    DensityMatrix apply_impl(const DensityMatrix& rho_t, std::size_t t, double* hs_out) const {
        const BackwardModel& m = *model_;
        if (rho_t.n_qubits != m.n)
            throw std::invalid_argument("backward: input state has wrong qubit count");
        if (t < 1 || t > m.T) throw std::invalid_argument("backward: t outside 1..T");
        const DensityMatrix tau = embed(t);

        if (m.variant == Variant::RQGDM) {
            // compress rho_t into its last qubit
            const ComplexMatrix c1 = unitary_conjugate(compress_u_, rho_t.mat);
            const ComplexMatrix rho_prime =
                partial_trace(c1, std::size_t{1} << (m.n - 1), 2, Subsystem::B);
            // recombine with tau over n+1 qubits, then drop the last qubit
            const ComplexMatrix joint = kron(tau.mat, rho_prime);
            const ComplexMatrix c2 = unitary_conjugate(recombine_u_, joint);
            return DensityMatrix::unchecked(
                m.n, partial_trace(c2, std::size_t{1} << m.n, 2, Subsystem::A));
        }

        const ComplexMatrix joint = kron(tau.mat, rho_t.mat);
        const ComplexMatrix out = unitary_conjugate(denoise_u_, joint);
        if (hs_out) {
            const ComplexMatrix diff = out - joint;
            *hs_out = std::sqrt(trace(matmul(diff, diff)).real());
        }
        if (m.variant == Variant::Naive) {
            // trace out the whole embedding register, keep the input register
            return DensityMatrix::unchecked(
                m.n,
                partial_trace(out, std::size_t{1} << m.n_tau, std::size_t{1} << m.n, Subsystem::B));
        }
        // regroup: subsystem A = first n qubits of the composite
        return DensityMatrix::unchecked(
            m.n, partial_trace(out, std::size_t{1} << m.n, std::size_t{1} << m.n_tau, Subsystem::A));
    }

    const BackwardModel* model_;
    ComplexMatrix denoise_u_;
    ComplexMatrix compress_u_;
    ComplexMatrix recombine_u_;
};

inline DensityMatrix backward_qgdm(const BackwardModel& model, const DensityMatrix& rho_t,
                                   std::size_t t) {
    if (model.variant != Variant::QGDM)
        throw std::invalid_argument("backward_qgdm: model variant mismatch");
    return PreparedBackward(model).apply(rho_t, t);
}

inline DensityMatrix backward_rqgdm(const BackwardModel& model, const DensityMatrix& rho_t,
                                    std::size_t t) {
    if (model.variant != Variant::RQGDM)
        throw std::invalid_argument("backward_rqgdm: model variant mismatch");
    return PreparedBackward(model).apply(rho_t, t);
}

inline DensityMatrix backward_naive(const BackwardModel& model, const DensityMatrix& rho_t,
                                    std::size_t t) {
    if (model.variant != Variant::Naive)
        throw std::invalid_argument("backward_naive: model variant mismatch");
    return PreparedBackward(model).apply(rho_t, t);
}

inline DensityMatrix backward(const BackwardModel& model, const DensityMatrix& rho_t,
                              std::size_t t) {
    return PreparedBackward(model).apply(rho_t, t);
}

// --- checkpoint io ----------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

inline void save_checkpoint(const BackwardModel& model, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "qgdm-checkpoint";
    j["version"] = kCheckpointVersion;
    j["variant"] = variant_name(model.variant);
    j["n"] = model.n;
    j["n_tau"] = model.n_tau;
    j["T"] = model.T;
    j["embed_layers"] = model.embed_layers;
    j["denoise_layers"] = model.denoise_layers;
    j["omega"] = model.params.omega;
    if (model.variant == Variant::RQGDM) {
        j["theta1"] = model.params.theta1;
        j["theta2"] = model.params.theta2;
    } else {
        j["theta"] = model.params.theta;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

inline BackwardModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "qgdm-checkpoint")
        throw std::runtime_error("load_checkpoint: not a checkpoint file");
    if (j.value("version", 0) != kCheckpointVersion)
        throw std::runtime_error("load_checkpoint: unsupported checkpoint version");
    BackwardModel model =
        make_model(variant_from_name(j.at("variant").get<std::string>()), j.at("n").get<std::size_t>(),
                   j.at("n_tau").get<std::size_t>(), j.at("T").get<std::size_t>(),
                   j.at("embed_layers").get<std::size_t>(), j.at("denoise_layers").get<std::size_t>());
    model.params.omega = j.at("omega").get<std::vector<double>>();
    if (model.variant == Variant::RQGDM) {
        model.params.theta1 = j.at("theta1").get<std::vector<double>>();
        model.params.theta2 = j.at("theta2").get<std::vector<double>>();
    } else {
        model.params.theta = j.at("theta").get<std::vector<double>>();
    }
    if (model.params.omega.size() != model.embed_template.n_params ||
        (model.variant == Variant::RQGDM
             ? model.params.theta1.size() != model.compress_template.n_params ||
                   model.params.theta2.size() != model.recombine_template.n_params
             : model.params.theta.size() != model.denoise_template.n_params))
        throw std::runtime_error("load_checkpoint: parameter vector lengths do not match layout");
    return model;
}

}  // namespace qgdm
