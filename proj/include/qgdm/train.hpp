#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qgdm/denoise.hpp"
#include "qgdm/diffusion.hpp"
#include "qgdm/qstate.hpp"
#include "qgdm/rng.hpp"

namespace qgdm {

struct TrainConfig {
    std::size_t T = 30;
    double s = 0.008;
    std::size_t batch_size = 16;
    double lambda = 0.02;
    std::size_t epochs = 200;
    double lr_initial = 0.3;
    double lr_final = 0.01;
    std::size_t lr_decay_steps = 200;
    std::size_t embed_layers = 5;
    std::size_t denoise_layers = 1;
    double fd_step = 1e-3;
    std::uint64_t seed = 1;

    void validate() const {
        if (T < 2) throw std::invalid_argument("TrainConfig: T must be >= 2");
        if (batch_size < 1 || batch_size > T - 1)
            throw std::invalid_argument(
                "TrainConfig: batch_size must satisfy 1 <= batch_size <= T - 1");
        if (lambda < 0.0) throw std::invalid_argument("TrainConfig: lambda must be >= 0");
        if (!(lr_final > 0.0) || lr_initial < lr_final)
            throw std::invalid_argument("TrainConfig: need lr_initial >= lr_final > 0");
        if (lr_decay_steps < 1) throw std::invalid_argument("TrainConfig: lr_decay_steps must be >= 1");
        if (!(fd_step > 0.0)) throw std::invalid_argument("TrainConfig: fd_step must be positive");
        if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
        if (embed_layers < 1 || denoise_layers < 1)
            throw std::invalid_argument("TrainConfig: layer counts must be >= 1");
    }
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t size) : m(size, 0.0), v(size, 0.0) {}
};

// Standard bias-corrected Adam update, in place.
inline void adam_step(AdamState& state, std::vector<double>& params, std::span<const double> grad,
                      double lr) {
    if (params.size() != grad.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: vector length mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

// Cosine decay from lr_initial to lr_final over lr_decay_steps, then flat.
inline double lr_at(std::size_t step, const TrainConfig& cfg) {
    const double frac =
        static_cast<double>(std::min(step, cfg.lr_decay_steps)) / static_cast<double>(cfg.lr_decay_steps);
    return cfg.lr_final + 0.5 * (cfg.lr_initial - cfg.lr_final) * (1.0 + std::cos(M_PI * frac));
}

struct TrainRecord {
    std::size_t epoch;
    double loss;
    double loss_L0;
    double loss_batch_mean;
    double learning_rate;
    double wall_time;  // seconds; 0 unless timing was requested
};

namespace detail {

inline void check_batch(std::span<const std::size_t> ts, std::size_t T) {
    std::set<std::size_t> seen;
    for (std::size_t t : ts) {
        if (t < 2 || t > T)
            throw std::invalid_argument("batch timesteps must lie in 2..T (t=1 has its own term)");
        if (!seen.insert(t).second)
            throw std::invalid_argument("batch timesteps must be unique");
    }
    if (ts.empty()) throw std::invalid_argument("batch must contain at least one timestep");
}

// Per-run constants of the loss: the forward trajectory of the target and
// the matrix square roots of the denoising targets. Everything that varies
// with the trainable parameters stays out of here.
struct LossContext {
    const NoiseSchedule* sched;
    std::vector<DensityMatrix> rho_at;     // index t = 0..T, rho_at[0] = target
    std::vector<ComplexMatrix> sqrt_rho;   // sqrt(rho_at[t]) for t = 0..T-1

    LossContext(const DensityMatrix& rho0, const NoiseSchedule& schedule) : sched(&schedule) {
        const std::size_t T = schedule.T;
        rho_at.reserve(T + 1);
        rho_at.push_back(rho0);
        for (std::size_t t = 1; t <= T; ++t) rho_at.push_back(forward_to(rho0, t, schedule));
        sqrt_rho.reserve(T);
        for (std::size_t t = 0; t < T; ++t) sqrt_rho.push_back(hermitian_sqrt(rho_at[t].mat));
    }

    double term(const PreparedBackward& prep, std::size_t t, double* hs_out = nullptr) const {
        const DensityMatrix pred = hs_out ? prep.apply_tracking_hs(rho_at[t], t, hs_out)
                                          : prep.apply(rho_at[t], t);
        return 1.0 - fidelity_from_sqrt(sqrt_rho[t - 1], pred.mat);
    }

    struct Breakdown {
        double total;
        double l0;
        double batch_mean;
        double hs_mean;  // valid only when tracking was requested
    };

    Breakdown eval(const BackwardModel& model, std::span<const std::size_t> ts, double lambda,
                   bool track_hs = false) const {
        const PreparedBackward prep(model);
        double hs_sum = 0.0;
        double hs = 0.0;
        const double l0 = term(prep, 1, track_hs ? &hs : nullptr);
        hs_sum += hs;
        double batch_sum = 0.0;
        for (std::size_t t : ts) {
            batch_sum += term(prep, t, track_hs ? &hs : nullptr);
            hs_sum += hs;
        }
        const double batch_mean = batch_sum / static_cast<double>(ts.size());
        return {l0 + lambda * batch_mean, l0, batch_mean,
                hs_sum / static_cast<double>(ts.size() + 1)};
    }
};

inline std::vector<std::size_t> sample_unique_timesteps(Xoshiro256ss& rng, std::size_t T,
                                                        std::size_t batch) {
    std::vector<std::size_t> pool(T - 1);
    std::iota(pool.begin(), pool.end(), std::size_t{2});
    for (std::size_t i = 0; i < batch; ++i) {
        const std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(batch);
    return pool;
}

// Central finite differences over the flattened parameter vector, evaluated
// against a fixed timestep batch (common random numbers). Entries are
// independent, so they are sharded across threads.
inline std::vector<double> fd_gradient(const BackwardModel& model, const LossContext& ctx,
                                       std::span<const std::size_t> ts, double lambda, double h,
                                       std::size_t threads) {
    const std::vector<double> flat = model.params.flatten();
    std::vector<double> grad(flat.size());
    auto worker = [&](std::size_t begin, std::size_t end) {
        BackwardModel scratch = model;
        std::vector<double> probe = flat;
        for (std::size_t i = begin; i < end; ++i) {
            probe[i] = flat[i] + h;
            scratch.params.assign_flat(probe);
            const double plus = ctx.eval(scratch, ts, lambda).total;
            probe[i] = flat[i] - h;
            scratch.params.assign_flat(probe);
            const double minus = ctx.eval(scratch, ts, lambda).total;
            probe[i] = flat[i];
            grad[i] = (plus - minus) / (2.0 * h);
        }
    };
    const std::size_t n_jobs = std::max<std::size_t>(1, std::min(threads, flat.size()));
    if (n_jobs == 1) {
        worker(0, flat.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (flat.size() + n_jobs - 1) / n_jobs;
        for (std::size_t k = 0; k < n_jobs; ++k) {
            const std::size_t begin = k * chunk;
            const std::size_t end = std::min(flat.size(), begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return grad;
}

}  // namespace detail

// 1 - F(rho_{t-1}, f(rho_t, t)) with both forward states derived from rho_0.
inline double loss_t(const BackwardModel& model, const DensityMatrix& rho0, std::size_t t,
                     const NoiseSchedule& sched) {
    sched.check_range(t);
    const DensityMatrix target = t == 1 ? rho0 : forward_to(rho0, t - 1, sched);
    const DensityMatrix pred = PreparedBackward(model).apply(forward_to(rho0, t, sched), t);
    return 1.0 - fidelity(target, pred);
}

// loss at t=1 plus lambda times the batch mean over the sampled timesteps.
inline double total_loss(const BackwardModel& model, const DensityMatrix& rho0,
                         std::span<const std::size_t> sampled_ts, const NoiseSchedule& sched,
                         double lambda) {
    detail::check_batch(sampled_ts, sched.T);
    double batch_sum = 0.0;
    for (std::size_t t : sampled_ts) batch_sum += loss_t(model, rho0, t, sched);
    return loss_t(model, rho0, 1, sched) +
           lambda * batch_sum / static_cast<double>(sampled_ts.size());
}

// Central-difference gradient of total_loss, using the same timestep batch
// for every evaluation.
inline std::vector<double> gradient(const BackwardModel& model, const DensityMatrix& rho0,
                                    std::span<const std::size_t> sampled_ts,
                                    const NoiseSchedule& sched, double lambda, double h,
                                    std::size_t threads = 1) {
    if (!(h > 0.0)) throw std::invalid_argument("gradient: step h must be positive");
    detail::check_batch(sampled_ts, sched.T);
    const detail::LossContext ctx(rho0, sched);
    return detail::fd_gradient(model, ctx, sampled_ts, lambda, h, threads);
}

struct TrainOptions {
    bool track_hs = false;  // record mean input/output HS distance per epoch
    bool timing = false;    // record wall time per epoch (breaks run-to-run byte identity)
    std::size_t threads = 1;
};

struct TrainResult {
    BackwardModel model;
    std::vector<TrainRecord> records;
    std::vector<double> hs_per_epoch;  // filled when track_hs was set
};

// Full training loop: uniform parameter init on [0, pi], per-epoch unique
// timestep batches, finite-difference gradients and Adam with cosine decay.
// Stops at the epoch cap or once the loss moved less than 1e-6 across a
// 10-epoch window.
inline TrainResult train(const TrainConfig& cfg, Variant variant, std::size_t n_tau,
                         const DensityMatrix& rho0, const TrainOptions& opts = {}) {
    cfg.validate();
    const NoiseSchedule sched = cosine_schedule(cfg.T, cfg.s);

    TrainResult result;
    result.model =
        make_model(variant, rho0.n_qubits, n_tau, cfg.T, cfg.embed_layers, cfg.denoise_layers);

    Xoshiro256ss init_rng = Xoshiro256ss::stream(cfg.seed, streams::kParamInit);
    std::vector<double> flat(result.model.params.total());
    for (auto& p : flat) p = init_rng.uniform(0.0, M_PI);
    result.model.params.assign_flat(flat);

    Xoshiro256ss batch_rng = Xoshiro256ss::stream(cfg.seed, streams::kBatchSampling);
    const detail::LossContext ctx(rho0, sched);
    AdamState adam(flat.size());

    constexpr std::size_t kStallWindow = 10;
    constexpr double kStallEps = 1e-6;

    const auto run_start = std::chrono::steady_clock::now();
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const std::vector<std::size_t> ts =
            detail::sample_unique_timesteps(batch_rng, cfg.T, cfg.batch_size);

        const auto breakdown = ctx.eval(result.model, ts, cfg.lambda, opts.track_hs);
        const std::vector<double> grad =
            detail::fd_gradient(result.model, ctx, ts, cfg.lambda, cfg.fd_step, opts.threads);

        const double lr = lr_at(epoch, cfg);
        flat = result.model.params.flatten();
        adam_step(adam, flat, grad, lr);
        result.model.params.assign_flat(flat);

        double elapsed = 0.0;
        if (opts.timing)
            elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start)
                          .count();
        result.records.push_back(
            {epoch, breakdown.total, breakdown.l0, breakdown.batch_mean, lr, elapsed});
        if (opts.track_hs) result.hs_per_epoch.push_back(breakdown.hs_mean);

        if (result.records.size() >= kStallWindow) {
            double lo = result.records.back().loss, hi = lo;
            for (std::size_t k = result.records.size() - kStallWindow; k < result.records.size();
                 ++k) {
                lo = std::min(lo, result.records[k].loss);
                hi = std::max(hi, result.records[k].loss);
            }
            if (hi - lo < kStallEps) break;
        }
    }
    return result;
}

}  // namespace qgdm
