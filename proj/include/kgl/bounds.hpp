#pragma once

// Finite-memory approximation diagnostics: the kernel mismatch
//
//   eps_N(alpha; c*) = sum_{j<=N} |c*_j - w_j(alpha)| + sum_{j>N} |c*_j|,
//
// the disturbance bound ||d_k|| <= M_z eps_N + xi_bar, and the pure GL truncation
// rate M_z (C_alpha / alpha) N^{-alpha}.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kgl/errors.hpp"
#include "kgl/gl_kernel.hpp"
#include "kgl/hereditary_sim.hpp"
#include "kgl/lifting.hpp"

namespace kgl {

struct KernelMismatchReport {
    double alpha = 0.0;
    std::size_t n_mem = 0;
    double retained_mismatch = 0.0;
    double tail = 0.0;
    double epsilon = 0.0;
    double m_z = 0.0;
    double xi_bar = 0.0;
    double d_bound = 0.0;
};

/// `c_star[j-1]` holds c*_j; lags past the end of the sequence count as zero.
inline KernelMismatchReport kernel_mismatch(double alpha, std::size_t n_mem, std::span<const double> c_star) {
    const auto kernel = gl_weights(alpha, n_mem);
    KernelMismatchReport r;
    r.alpha = alpha;
    r.n_mem = n_mem;
    for (std::size_t j = 1; j <= n_mem; ++j) {
        const double c = j <= c_star.size() ? c_star[j - 1] : 0.0;
        r.retained_mismatch += std::abs(c - kernel.weights[j]);
    }
    for (std::size_t j = n_mem + 1; j <= c_star.size(); ++j) r.tail += std::abs(c_star[j - 1]);
    r.epsilon = r.retained_mismatch + r.tail;
    return r;
}

inline double disturbance_bound(double epsilon, double m_z, double xi_bar) {
    if (epsilon < 0.0 || m_z < 0.0 || xi_bar < 0.0) throw DomainError("bound inputs must be nonnegative");
    return m_z * epsilon + xi_bar;
}

/// M_z (C_alpha / alpha) N^{-alpha}; the residual term is added by the caller.
inline double gl_truncation_bound(double alpha, std::size_t n_mem, double m_z, double c_alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("fractional order must lie in (0,1)");
    if (n_mem == 0) throw DomainError("memory length must be at least 1");
    if (m_z < 0.0 || c_alpha < 0.0) throw DomainError("bound inputs must be nonnegative");
    return m_z * (c_alpha / alpha) * std::pow(static_cast<double>(n_mem), -alpha);
}

/// max ||psi(x)||_2 over every measured state of the given trajectories.
inline double empirical_mz(std::span<const Trajectory> trajectories, const Dictionary& dict) {
    if (trajectories.empty()) throw InsufficientDataError("empirical M_z needs at least one trajectory");
    double best = 0.0;
    Eigen::VectorXd z(static_cast<Eigen::Index>(dict.lifted_dim()));
    for (const auto& t : trajectories) {
        for (Eigen::Index k = 0; k < t.states.cols(); ++k) {
            lift_into(t.states.col(k), dict, z);
            best = std::max(best, z.norm());
        }
    }
    return best;
}

/// Full report: mismatch against c*, M_z from `trajectories`, and the disturbance bound.
inline KernelMismatchReport bound_report(double alpha, std::size_t n_mem, std::span<const double> c_star,
                                         std::span<const Trajectory> trajectories, const Dictionary& dict,
                                         double xi_bar = 0.0) {
    auto r = kernel_mismatch(alpha, n_mem, c_star);
    r.m_z = empirical_mz(trajectories, dict);
    r.xi_bar = xi_bar;
    r.d_bound = disturbance_bound(r.epsilon, r.m_z, xi_bar);
    return r;
}

/// The benchmark's Prony kernel in reference-model sign convention: the truth adds +h_j g(x),
/// while the reference lifted model subtracts c*_j z, so c*_j = -h_j.
inline std::vector<double> reference_kernel_from_prony(const BenchmarkConfig& config) {
    auto h = prony_kernel(config);
    for (double& v : h) v = -v;
    return h;
}

/// c*_j = w_j(alpha) for j = 1..j_max: the exact-GL reference kernel.
inline std::vector<double> gl_reference_kernel(double alpha, std::size_t j_max) {
    const auto k = gl_weights(alpha, j_max);
    return {k.weights.begin() + 1, k.weights.end()};
}

}  // namespace kgl
