#pragma once

// One-step realization of the finite-memory model on the stacked state
// z_aug = [z_k; z_{k-1}; ...; z_{k-N+1}] with block-companion matrices
//
//   A_aug = [ A - w_1 I   -w_2 I  ...  -w_N I ]      B_aug = [ B ]
//           [ I           0       ...   0     ]              [ 0 ]
//           [      ...         I        0     ]              [...]
//
// Only the top block row is stored; the lower rows are the implicit shift.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "kgl/errors.hpp"
#include "kgl/identification.hpp"

namespace kgl {

inline constexpr Eigen::Index kDenseSpectrumLimit = 2000;

struct AugmentedRealization {
    Eigen::MatrixXd top_row;  // p x pN
    Eigen::MatrixXd B_bar;    // p x m
    std::size_t p = 0;
    std::size_t n_mem = 0;
    std::size_t m = 0;
    std::uint64_t source_hash = 0;

    [[nodiscard]] Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(p * n_mem); }

    /// z_aug(k+1) = A_aug z_aug(k) + B_aug u_k.
    [[nodiscard]] Eigen::VectorXd step(const Eigen::VectorXd& z_aug, const Eigen::Ref<const Eigen::VectorXd>& u) const {
        const auto pp = static_cast<Eigen::Index>(p);
        Eigen::VectorXd next(dim());
        next.head(pp).noalias() = top_row * z_aug;
        next.head(pp).noalias() += B_bar * u;
        next.tail(dim() - pp) = z_aug.head(dim() - pp);
        return next;
    }

    [[nodiscard]] Eigen::MatrixXd dense_A() const {
        const auto pp = static_cast<Eigen::Index>(p);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim(), dim());
        a.topRows(pp) = top_row;
        for (std::size_t b = 1; b < n_mem; ++b) {
            a.block(static_cast<Eigen::Index>(b) * pp, static_cast<Eigen::Index>(b - 1) * pp, pp, pp).setIdentity();
        }
        return a;
    }

    [[nodiscard]] Eigen::MatrixXd dense_B() const {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim(), static_cast<Eigen::Index>(m));
        b.topRows(static_cast<Eigen::Index>(p)) = B_bar;
        return b;
    }
};

inline AugmentedRealization build_augmented(const KoopmanGLModel& model) {
    model.validate();
    if (model.kernel.is_markov()) throw DegenerateModelError("a memory-free model has no augmented realization");
    const auto p = static_cast<Eigen::Index>(model.p());
    const std::size_t n_mem = model.kernel.n_mem;
    AugmentedRealization real;
    real.p = model.p();
    real.n_mem = n_mem;
    real.m = model.m();
    real.source_hash = model.fingerprint();
    real.B_bar = model.B_bar;
    real.top_row = Eigen::MatrixXd::Zero(p, p * static_cast<Eigen::Index>(n_mem));
    real.top_row.leftCols(p) = model.A_bar;
    for (std::size_t j = 1; j <= n_mem; ++j) {
        real.top_row.block(0, static_cast<Eigen::Index>(j - 1) * p, p, p).diagonal().array() -= model.kernel.weights[j];
    }
    return real;
}

/// Stacks a newest-first history [z_{N-1}, ..., z_0] into z_aug.
inline Eigen::VectorXd stack_history(const AugmentedRealization& real, std::span<const Eigen::VectorXd> newest_first) {
    if (newest_first.size() != real.n_mem) {
        throw ShapeError("augmented rollout needs exactly " + std::to_string(real.n_mem) + " history states, got " +
                         std::to_string(newest_first.size()));
    }
    const auto p = static_cast<Eigen::Index>(real.p);
    Eigen::VectorXd z_aug(real.dim());
    for (std::size_t b = 0; b < newest_first.size(); ++b) {
        if (newest_first[b].size() != p) throw ShapeError("history state has the wrong lifted dimension");
        z_aug.segment(static_cast<Eigen::Index>(b) * p, p) = newest_first[b];
    }
    return z_aug;
}

/// Iterates the augmented system without disturbance; returns the first block after each step.
/// `inputs` is m x (>= horizon), column i applied at the i-th step.
inline std::vector<Eigen::VectorXd> rollout_augmented(const AugmentedRealization& real,
                                                      std::span<const Eigen::VectorXd> initial_history_newest_first,
                                                      const Eigen::MatrixXd& inputs, std::size_t horizon) {
    Eigen::VectorXd z_aug = stack_history(real, initial_history_newest_first);
    if (static_cast<std::size_t>(inputs.cols()) < horizon) throw ShapeError("fewer inputs than the requested horizon");
    if (horizon > 0 && inputs.rows() != static_cast<Eigen::Index>(real.m)) throw ShapeError("input dimension mismatch");
    std::vector<Eigen::VectorXd> out;
    out.reserve(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
        z_aug = real.step(z_aug, inputs.col(static_cast<Eigen::Index>(k)));
        out.emplace_back(z_aug.head(static_cast<Eigen::Index>(real.p)));
    }
    return out;
}

struct SpectralRadius {
    double value = 0.0;
    bool estimate = false;  // power-iteration growth rate instead of an eigen-decomposition
};

/// max |lambda(A_aug)|; above kDenseSpectrumLimit states it falls back to the asymptotic growth
/// rate of ||A_aug^k v|| and flags the result as an estimate. The shift blocks form a nilpotent
/// part of index N, so the burn-in must outlast N steps before growth reflects the spectrum.
inline SpectralRadius spectral_radius(const AugmentedRealization& real, std::size_t power_iterations = 4000) {
    if (real.dim() <= kDenseSpectrumLimit) {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(real.dense_A(), /*computeEigenvectors=*/false);
        if (solver.info() != Eigen::Success) throw NumericError("eigenvalue iteration did not converge");
        return {solver.eigenvalues().cwiseAbs().maxCoeff(), false};
    }
    Eigen::VectorXd v = Eigen::VectorXd::Ones(real.dim()).normalized();
    const Eigen::VectorXd zero_u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(real.m));
    power_iterations = std::max(power_iterations, 4 * real.n_mem);
    const std::size_t burn_in = power_iterations / 2;
    double log_growth = 0.0;
    for (std::size_t k = 0; k < power_iterations; ++k) {
        v = real.step(v, zero_u);
        const double norm = v.norm();
        if (norm == 0.0) return {0.0, true};
        if (k >= burn_in) log_growth += std::log(norm);
        v /= norm;
    }
    return {std::exp(log_growth / static_cast<double>(power_iterations - burn_in)), true};
}

}  // namespace kgl
