#pragma once

// Truncated Grünwald–Letnikov weights, their tail mass and an empirical decay constant.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kgl/errors.hpp"

namespace kgl {

inline constexpr std::size_t kDefaultTailHorizon = 1'000'000;

/// Weights w_0..w_N of the truncated GL fractional difference of order alpha.
///
/// n_mem == 0 encodes a memory-free (Markov) model: weights == {1} and alpha is unused.
struct GLKernel {
    double alpha = 0.0;
    std::size_t n_mem = 0;
    std::vector<double> weights{1.0};

    [[nodiscard]] bool is_markov() const noexcept { return n_mem == 0; }
    [[nodiscard]] double weight(std::size_t j) const { return weights.at(j); }

    friend bool operator==(const GLKernel&, const GLKernel&) = default;
};

namespace detail {

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("fractional order must lie in (0,1), got " + std::to_string(alpha));
    }
}

/// Advances w_{j-1} -> w_j.
inline double next_weight(double prev, double alpha, std::size_t j) {
    return -prev * (alpha - static_cast<double>(j - 1)) / static_cast<double>(j);
}

}  // namespace detail

/// Memory-free kernel used by the Markov baselines.
inline GLKernel markov_kernel() { return GLKernel{}; }

/// GL weights by the multiplicative recursion w_j = -w_{j-1} (alpha - (j-1)) / j, w_0 = 1.
/// No time-step scaling is applied.
inline GLKernel gl_weights(double alpha, std::size_t n_mem) {
    detail::check_alpha(alpha);
    if (n_mem == 0) throw DomainError("memory length must be at least 1");
    GLKernel kernel;
    kernel.alpha = alpha;
    kernel.n_mem = n_mem;
    kernel.weights.resize(n_mem + 1);
    kernel.weights[0] = 1.0;
    for (std::size_t j = 1; j <= n_mem; ++j) {
        kernel.weights[j] = detail::next_weight(kernel.weights[j - 1], alpha, j);
    }
    return kernel;
}

/// Finite-horizon tail mass sum_{j=n_mem+1}^{j_max} |w_j(alpha)|.
inline double tail_mass(double alpha, std::size_t n_mem, std::size_t j_max = kDefaultTailHorizon) {
    detail::check_alpha(alpha);
    if (n_mem == 0) throw DomainError("memory length must be at least 1");
    if (j_max <= n_mem) throw DomainError("tail horizon must exceed the memory length");
    double w = 1.0;
    for (std::size_t j = 1; j <= n_mem; ++j) w = detail::next_weight(w, alpha, j);
    // Terms are summed smallest-first so that the result does not depend on n_mem through rounding.
    std::vector<double> terms;
    terms.reserve(j_max - n_mem);
    for (std::size_t j = n_mem + 1; j <= j_max; ++j) {
        w = detail::next_weight(w, alpha, j);
        terms.push_back(std::abs(w));
    }
    double sum = 0.0;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) sum += *it;
    return sum;
}

/// Empirical constant C_alpha = max_{1<=j<=j_max} |w_j(alpha)| j^{1+alpha}, so that
/// |w_j| <= C_alpha j^{-(1+alpha)} holds for every computed term.
inline double fit_decay_constant(double alpha, std::size_t j_max) {
    detail::check_alpha(alpha);
    if (j_max < 10) throw DomainError("decay fit needs at least 10 terms");
    double w = 1.0;
    double best = 0.0;
    for (std::size_t j = 1; j <= j_max; ++j) {
        w = detail::next_weight(w, alpha, j);
        best = std::max(best, std::abs(w) * std::pow(static_cast<double>(j), 1.0 + alpha));
    }
    return best;
}

}  // namespace kgl
