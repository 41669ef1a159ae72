#pragma once

// Memory-compensated least-squares identification of the finite-memory lifted model
//
//   z_{k+1} = A z_k + B u_k - sum_{j=1}^{N} w_j(alpha) z_{k+1-j} + d_k,   k >= N-1.
//
// Moving the known GL term to the left gives targets y_k = z_{k+1} + sum_j w_j z_{k+1-j}
// and the linear regression Y = [A B] [Z; U] + D.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "kgl/errors.hpp"
#include "kgl/gl_kernel.hpp"
#include "kgl/hereditary_sim.hpp"
#include "kgl/lifting.hpp"
#include "kgl/parallel.hpp"
#include "kgl/text.hpp"

namespace kgl {

/// Relative singular-value floor below which an unregularized fit is refused.
inline constexpr double kRankTolerance = 1e-10;

/// Targets y_k for k = first_k, first_k+1, ...; column c holds y_{first_k + c}.
struct TargetBlock {
    std::size_t first_k = 0;
    Eigen::MatrixXd values;
};

/// First regression index: N-1 for GL kernels, 0 for Markov ones.
inline std::size_t first_regression_index(const GLKernel& kernel) {
    return std::max<std::size_t>(kernel.n_mem, 1) - 1;
}

/// `lifted` is p x (T+1) with column k = z_k.
inline TargetBlock build_targets(const Eigen::MatrixXd& lifted, const GLKernel& kernel) {
    const std::size_t first = first_regression_index(kernel);
    const auto cols = static_cast<std::size_t>(lifted.cols());
    if (cols < std::max<std::size_t>(kernel.n_mem, 1) + 1) {
        throw InsufficientDataError("trajectory with " + std::to_string(cols) + " snapshots is too short for memory length " +
                                    std::to_string(kernel.n_mem));
    }
    const auto count = static_cast<Eigen::Index>(cols - 1 - first);
    const auto f = static_cast<Eigen::Index>(first);
    TargetBlock block{first, lifted.middleCols(f + 1, count)};
    for (std::size_t j = 1; j <= kernel.n_mem; ++j) {
        block.values.noalias() += kernel.weights[j] * lifted.middleCols(f + 1 - static_cast<Eigen::Index>(j), count);
    }
    return block;
}

struct ColumnOrigin {
    std::size_t trajectory = 0;
    std::size_t k = 0;
};

struct RegressionData {
    Eigen::MatrixXd Y;      // p x K
    Eigen::MatrixXd Omega;  // (p+m) x K
    double mu = 0.0;        // sigma_min(Omega)^2
    std::vector<ColumnOrigin> origins;
    std::size_t p = 0;
    std::size_t m = 0;
    bool rank_deficient = false;  // K < p+m

    [[nodiscard]] std::size_t row_count() const noexcept { return static_cast<std::size_t>(Y.cols()); }

    [[nodiscard]] std::uint64_t fingerprint() const {
        text::Fnv1a h;
        h.update(std::span<const double>(Y.data(), static_cast<std::size_t>(Y.size())));
        h.update(std::span<const double>(Omega.data(), static_cast<std::size_t>(Omega.size())));
        return h.digest();
    }
};

/// Smallest and largest singular values of Omega (zero smallest when Omega is wide-short).
inline std::pair<double, double> singular_value_range(const Eigen::MatrixXd& omega) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(omega.transpose());
    const auto& s = svd.singularValues();
    if (s.size() == 0) return {0.0, 0.0};
    const double smin = omega.cols() < omega.rows() ? 0.0 : s[s.size() - 1];
    return {smin, s[0]};
}

/// Wraps a hand-built (Y, Omega) pair, filling mu and the rank flag.
inline RegressionData make_regression(Eigen::MatrixXd Y, Eigen::MatrixXd omega) {
    if (Y.cols() != omega.cols()) throw ShapeError("Y and Omega have different column counts");
    if (omega.rows() < Y.rows()) throw ShapeError("Omega must have at least p rows");
    RegressionData data;
    data.p = static_cast<std::size_t>(Y.rows());
    data.m = static_cast<std::size_t>(omega.rows() - Y.rows());
    data.Y = std::move(Y);
    data.Omega = std::move(omega);
    data.rank_deficient = data.Omega.cols() < data.Omega.rows();
    const double smin = singular_value_range(data.Omega).first;
    data.mu = smin * smin;
    return data;
}

/// Lifts measured states, builds targets per trajectory (history never crosses trajectories)
/// and concatenates columns by trajectory index, then k. Trajectories too short for the
/// kernel contribute no columns.
inline RegressionData assemble(std::span<const Trajectory> trajectories, const Dictionary& dict, const GLKernel& kernel,
                               std::size_t threads = 1) {
    if (trajectories.empty()) throw InsufficientDataError("no trajectories to assemble");
    const auto p = static_cast<Eigen::Index>(dict.lifted_dim());
    const auto m = static_cast<Eigen::Index>(trajectories.front().input_dim());

    struct Piece {
        TargetBlock targets;
        Eigen::MatrixXd regressors;
    };
    std::vector<Piece> pieces(trajectories.size());
    const std::size_t needed = std::max<std::size_t>(kernel.n_mem, 1) + 1;
    parallel_for(trajectories.size(), threads, [&](std::size_t t) {
        const auto& traj = trajectories[t];
        if (traj.input_dim() != static_cast<std::size_t>(m)) throw ShapeError("trajectories disagree on input dimension");
        if (static_cast<std::size_t>(traj.states.cols()) < needed) return;
        const Eigen::MatrixXd lifted = lift_columns(traj.states, dict);
        auto targets = build_targets(lifted, kernel);
        const auto count = targets.values.cols();
        const auto first = static_cast<Eigen::Index>(targets.first_k);
        Eigen::MatrixXd regressors(p + m, count);
        regressors.topRows(p) = lifted.middleCols(first, count);
        regressors.bottomRows(m) = traj.inputs.middleCols(first, count);
        pieces[t] = Piece{std::move(targets), std::move(regressors)};
    });

    Eigen::Index total = 0;
    for (const auto& piece : pieces) total += piece.targets.values.cols();
    if (total == 0) throw InsufficientDataError("every trajectory is shorter than the memory length requires");

    Eigen::MatrixXd Y(p, total);
    Eigen::MatrixXd omega(p + m, total);
    std::vector<ColumnOrigin> origins;
    origins.reserve(static_cast<std::size_t>(total));
    Eigen::Index col = 0;
    for (std::size_t t = 0; t < pieces.size(); ++t) {
        const auto count = pieces[t].targets.values.cols();
        if (count == 0) continue;
        Y.middleCols(col, count) = pieces[t].targets.values;
        omega.middleCols(col, count) = pieces[t].regressors;
        for (Eigen::Index c = 0; c < count; ++c) {
            origins.push_back({t, pieces[t].targets.first_k + static_cast<std::size_t>(c)});
        }
        col += count;
    }
    auto data = make_regression(std::move(Y), std::move(omega));
    data.origins = std::move(origins);
    return data;
}

struct LeastSquaresFit {
    Eigen::MatrixXd theta;  // p x (p+m)
    double residual_norm = 0.0;  // ||Y - theta Omega||_F
    double ridge = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;

    [[nodiscard]] Eigen::MatrixXd A_bar(std::size_t p) const { return theta.leftCols(static_cast<Eigen::Index>(p)); }
    [[nodiscard]] Eigen::MatrixXd B_bar(std::size_t p) const {
        return theta.rightCols(theta.cols() - static_cast<Eigen::Index>(p));
    }
};

/// argmin ||Y - Theta Omega||_F^2 + ridge ||Theta||_F^2 through a thin SVD of Omega^T.
inline LeastSquaresFit solve_ls(const RegressionData& data, double ridge = 0.0) {
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw DomainError("ridge must be a finite nonnegative number");
    if (data.Omega.cols() == 0) throw InsufficientDataError("regression has no columns");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(data.Omega.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();

    LeastSquaresFit fit;
    fit.ridge = ridge;
    fit.sigma_max = s.size() ? s[0] : 0.0;
    fit.sigma_min = data.rank_deficient || s.size() == 0 ? 0.0 : s[s.size() - 1];
    if (ridge == 0.0 && (data.rank_deficient || fit.sigma_min <= kRankTolerance * fit.sigma_max)) {
        throw RankDeficiencyError("regressor matrix is rank deficient (sigma_min = " + text::fmt(fit.sigma_min) +
                                  ", sigma_max = " + text::fmt(fit.sigma_max) +
                                  ", columns = " + std::to_string(data.Omega.cols()) +
                                  "); add data or pass a positive ridge");
    }
    Eigen::VectorXd gain(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        gain[i] = ridge == 0.0 ? 1.0 / s[i] : (s[i] > 0.0 ? s[i] / (s[i] * s[i] + ridge) : 0.0);
    }
    // Theta^T = V diag(gain) U^T Y^T
    const Eigen::MatrixXd projected = svd.matrixU().transpose() * data.Y.transpose();
    fit.theta = (svd.matrixV() * gain.asDiagonal() * projected).transpose();
    fit.residual_norm = (data.Y - fit.theta * data.Omega).norm();
    return fit;
}

/// ||D||_F / sqrt(mu).
inline double error_bound(double d_norm, double mu) {
    if (!(mu > 0.0)) throw DomainError("error bound needs mu > 0");
    return d_norm / std::sqrt(mu);
}

struct FitReport {
    double residual_norm = 0.0;
    double mu = 0.0;
    double ridge = 0.0;
    std::size_t row_count = 0;
    std::uint64_t data_hash = 0;
    bool rank_deficient = false;

    /// ‖D‖_F / sqrt(mu), or +inf when mu == 0.
    [[nodiscard]] double identification_bound() const {
        return mu > 0.0 ? error_bound(residual_norm, mu) : std::numeric_limits<double>::infinity();
    }
};

struct KoopmanGLModel {
    Eigen::MatrixXd A_bar;
    Eigen::MatrixXd B_bar;
    GLKernel kernel;
    Dictionary dict;
    FitReport fit;
    std::uint64_t dataset_hash = 0;

    [[nodiscard]] std::size_t n() const noexcept { return dict.state_dim(); }
    [[nodiscard]] std::size_t p() const noexcept { return dict.lifted_dim(); }
    [[nodiscard]] std::size_t m() const noexcept { return static_cast<std::size_t>(B_bar.cols()); }
    [[nodiscard]] std::size_t n_mem() const noexcept { return kernel.n_mem; }
    /// Number of measured states needed to seed a prediction.
    [[nodiscard]] std::size_t history_length() const noexcept { return std::max<std::size_t>(kernel.n_mem, 1); }

    void validate() const {
        const auto p_ = static_cast<Eigen::Index>(p());
        if (A_bar.rows() != p_ || A_bar.cols() != p_) throw ShapeError("A_bar must be p x p");
        if (B_bar.rows() != p_) throw ShapeError("B_bar must have p rows");
        if (kernel.weights.size() != kernel.n_mem + 1) throw ShapeError("kernel weight count does not match memory length");
    }

    [[nodiscard]] std::uint64_t fingerprint() const {
        text::Fnv1a h;
        h.update(dict.descriptor());
        h.update(std::span<const double>(kernel.weights));
        h.update(std::span<const double>(A_bar.data(), static_cast<std::size_t>(A_bar.size())));
        h.update(std::span<const double>(B_bar.data(), static_cast<std::size_t>(B_bar.size())));
        return h.digest();
    }
};

/// Kernel for memory length n_mem: GL weights for n_mem >= 1, the Markov kernel for 0.
inline GLKernel kernel_for(double alpha, std::size_t n_mem) {
    return n_mem == 0 ? markov_kernel() : gl_weights(alpha, n_mem);
}

inline KoopmanGLModel identify(std::span<const Trajectory> trajectories, const Dictionary& dict, const GLKernel& kernel,
                               double ridge = 0.0, std::size_t threads = 1) {
    const auto data = assemble(trajectories, dict, kernel, threads);
    const auto fit = solve_ls(data, ridge);
    KoopmanGLModel model;
    model.A_bar = fit.A_bar(data.p);
    model.B_bar = fit.B_bar(data.p);
    model.kernel = kernel;
    model.dict = dict;
    model.fit = FitReport{fit.residual_norm, data.mu, ridge, data.row_count(), data.fingerprint(), data.rank_deficient};
    return model;
}

/// gl_weights -> assemble -> solve_ls on the training split. n_mem == 0 gives the Markov (EDMDc) model.
inline KoopmanGLModel identify(const Dataset& dataset, const Dictionary& dict, double alpha, std::size_t n_mem,
                               double ridge = 0.0, std::size_t threads = 1) {
    return identify(std::span<const Trajectory>(dataset.train), dict, kernel_for(alpha, n_mem), ridge, threads);
}

/// The four compared model families.
enum class Method { koopman_gl, koopman_markov, state_gl, state_markov };

inline constexpr Method kAllMethods[] = {Method::koopman_gl, Method::koopman_markov, Method::state_gl,
                                         Method::state_markov};

inline const char* method_name(Method m) {
    switch (m) {
        case Method::koopman_gl: return "koopman-gl";
        case Method::koopman_markov: return "koopman-markov";
        case Method::state_gl: return "state-gl";
        case Method::state_markov: return "state-markov";
    }
    return "?";
}

inline const char* method_label(Method m) {
    switch (m) {
        case Method::koopman_gl: return "Koopman-GL";
        case Method::koopman_markov: return "Koopman-Markov";
        case Method::state_gl: return "State-GL";
        case Method::state_markov: return "State-Markov";
    }
    return "?";
}

inline Method parse_method(std::string_view s) {
    for (Method m : kAllMethods) {
        if (s == method_name(m)) return m;
    }
    throw ConfigError("unknown method '" + std::string(s) + "'");
}

inline bool method_uses_memory(Method m) { return m == Method::koopman_gl || m == Method::state_gl; }
inline bool method_is_lifted(Method m) { return m == Method::koopman_gl || m == Method::koopman_markov; }

/// Identifies one of the compared families; state-space methods use the affine lifting [1; x].
inline KoopmanGLModel identify_method(const Dataset& dataset, Method method, const Dictionary& dict, double alpha,
                                      std::size_t n_mem, double ridge = 0.0, std::size_t threads = 1) {
    const Dictionary used = method_is_lifted(method) ? dict : Dictionary::affine(dict.state_dim());
    return identify(dataset, used, alpha, method_uses_memory(method) ? n_mem : 0, ridge, threads);
}

}  // namespace kgl
