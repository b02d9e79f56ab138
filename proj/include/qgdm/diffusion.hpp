#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qgdm/qstate.hpp"

namespace qgdm {

// Depolarization strengths for t = 1..T. alpha_bar is computed from the
// schedule function directly and alpha derived by ratio, which avoids the
// round-off drift a running product would accumulate.
struct NoiseSchedule {
    std::size_t T = 0;
    double s = 0.0;
    std::vector<double> alpha;      // alpha[t-1] = alpha_t
    std::vector<double> alpha_bar;  // alpha_bar[t-1] = cumulative product

    double alpha_at(std::size_t t) const {
        check_range(t);
        return alpha[t - 1];
    }
    // alpha_bar_at(0) == 1 by definition
    double alpha_bar_at(std::size_t t) const {
        if (t == 0) return 1.0;
        check_range(t);
        return alpha_bar[t - 1];
    }

    void check_range(std::size_t t) const {
        if (t < 1 || t > T) throw std::invalid_argument("NoiseSchedule: timestep out of 1..T");
    }
};

// alpha_bar_t = g(t)/g(0), g(t) = cos(((t/T + s)/(1 + s)) * pi/2)^2
inline NoiseSchedule cosine_schedule(std::size_t T, double s) {
    if (T < 2) throw std::invalid_argument("cosine_schedule: need T >= 2");
    if (!(s > 0.0)) throw std::invalid_argument("cosine_schedule: offset s must be positive");
    auto g = [&](double t) {
        const double c = std::cos((t / static_cast<double>(T) + s) / (1.0 + s) * M_PI / 2.0);
        return c * c;
    };
    NoiseSchedule sched;
    sched.T = T;
    sched.s = s;
    sched.alpha.resize(T);
    sched.alpha_bar.resize(T);
    const double g0 = g(0.0);
    double prev_bar = 1.0;
    for (std::size_t t = 1; t <= T; ++t) {
        const double bar = g(static_cast<double>(t)) / g0;
        sched.alpha_bar[t - 1] = bar;
        sched.alpha[t - 1] = bar / prev_bar;
        prev_bar = bar;
    }
    if (!(sched.alpha_bar[T - 2] > 0.0))
        throw std::runtime_error("cosine_schedule: alpha_bar vanishes before the final step");
    return sched;
}

// Single diffusion step: depolarize by alpha_t.
inline DensityMatrix forward_step(const DensityMatrix& rho_prev, std::size_t t,
                                  const NoiseSchedule& sched) {
    return depolarize(rho_prev, sched.alpha_at(t));
}

// Direct jump from rho_0 to timestep t: (1 - alpha_bar_t) I/d + alpha_bar_t rho_0.
inline DensityMatrix forward_to(const DensityMatrix& rho0, std::size_t t,
                                const NoiseSchedule& sched) {
    sched.check_range(t);
    return depolarize(rho0, sched.alpha_bar_at(t));
}

}  // namespace qgdm
