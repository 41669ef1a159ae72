#pragma once

// Open-loop rollout and teacher-forced one-step prediction, scored by NRMSE.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kgl/errors.hpp"
#include "kgl/hereditary_sim.hpp"
#include "kgl/identification.hpp"
#include "kgl/lifting.hpp"
#include "kgl/parallel.hpp"

namespace kgl {

inline constexpr std::size_t kDefaultHorizon = 100;
inline constexpr double kRelativeErrorFloor = 1e-8;
/// Lifted magnitudes beyond this count as divergence.
inline constexpr double kDivergenceThreshold = 1e150;

/// sqrt(mean ||x - xhat||^2) / sqrt(mean ||x||^2).
inline double nrmse(std::span<const Eigen::VectorXd> truth, std::span<const Eigen::VectorXd> pred) {
    if (truth.size() != pred.size()) throw ShapeError("nrmse needs sequences of equal length");
    if (truth.empty()) throw ShapeError("nrmse needs at least one sample");
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (truth[k].size() != pred[k].size()) throw ShapeError("nrmse samples differ in dimension");
        err += (truth[k] - pred[k]).squaredNorm();
        ref += truth[k].squaredNorm();
    }
    if (ref == 0.0) throw DomainError("nrmse is undefined for an identically zero truth sequence");
    return std::sqrt(err) / std::sqrt(ref);
}

/// ||x - xhat|| / (||x|| + 1e-8) per step.
inline std::vector<double> relative_errors(std::span<const Eigen::VectorXd> truth, std::span<const Eigen::VectorXd> pred) {
    std::vector<double> out(truth.size(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < std::min(truth.size(), pred.size()); ++k) {
        out[k] = (truth[k] - pred[k]).norm() / (truth[k].norm() + kRelativeErrorFloor);
    }
    return out;
}

struct RolloutResult {
    std::vector<Eigen::VectorXd> predicted_states;
    std::size_t horizon = 0;
    double nrmse = 0.0;
    bool nrmse_defined = false;  // false for horizon 0 or when no truth was supplied
    std::vector<double> per_step_relative_error;
    bool diverged = false;
    std::size_t divergence_step = 0;
};

struct RolloutOptions {
    /// Re-lift C z through psi after every step. Experimental; breaks the augmented equivalence.
    bool relift = false;
};

namespace detail {

inline bool lifted_ok(const Eigen::VectorXd& z) {
    return z.allFinite() && z.cwiseAbs().maxCoeff() < kDivergenceThreshold;
}

inline void score(RolloutResult& result, std::span<const Eigen::VectorXd> truth) {
    if (truth.empty() || result.horizon == 0) return;
    if (truth.size() != result.horizon) throw ShapeError("truth length does not match the horizon");
    result.per_step_relative_error = relative_errors(truth, result.predicted_states);
    result.nrmse_defined = true;
    result.nrmse = result.diverged ? std::numeric_limits<double>::infinity() : nrmse(truth, result.predicted_states);
}

}  // namespace detail

/// Seeds the lifted history from the measured prefix (chronological, exactly max(N,1) states)
/// and propagates z_{k+1} = A z_k + B u_k - sum_j w_j z_{k+1-j} for `horizon` steps.
/// Column i of `inputs` drives the i-th step. A divergent rollout stops early and scores +inf.
inline RolloutResult rollout(const KoopmanGLModel& model, std::span<const Eigen::VectorXd> true_prefix,
                             const Eigen::MatrixXd& inputs, std::size_t horizon,
                             std::span<const Eigen::VectorXd> truth = {}, RolloutOptions options = {}) {
    model.validate();
    const std::size_t hist = model.history_length();
    if (true_prefix.size() != hist) {
        throw ShapeError("rollout needs exactly " + std::to_string(hist) + " prefix states, got " +
                         std::to_string(true_prefix.size()));
    }
    if (static_cast<std::size_t>(inputs.cols()) < horizon) throw ShapeError("fewer inputs than the requested horizon");
    if (horizon > 0 && inputs.rows() != static_cast<Eigen::Index>(model.m())) throw ShapeError("input dimension mismatch");

    const std::size_t N = model.kernel.n_mem;
    const std::size_t n = model.n();
    std::vector<Eigen::VectorXd> z;
    z.reserve(hist + horizon);
    for (const auto& x : true_prefix) z.push_back(lift(x, model.dict).values);

    RolloutResult result;
    result.horizon = horizon;
    result.predicted_states.reserve(horizon);
    for (std::size_t step = 0; step < horizon; ++step) {
        const std::size_t k = z.size() - 1;
        Eigen::VectorXd next = model.A_bar * z[k];
        next.noalias() += model.B_bar * inputs.col(static_cast<Eigen::Index>(step));
        for (std::size_t j = 1; j <= N; ++j) next -= model.kernel.weights[j] * z[k + 1 - j];
        if (!detail::lifted_ok(next)) {
            result.diverged = true;
            result.divergence_step = step;
            break;
        }
        if (options.relift) {
            try {
                next = lift(readout(next, n), model.dict).values;
            } catch (const NumericError&) {
                result.diverged = true;
                result.divergence_step = step;
                break;
            }
        }
        result.predicted_states.push_back(readout(next, n));
        z.push_back(std::move(next));
    }
    detail::score(result, truth);
    return result;
}

/// Prediction window on a trajectory: states start .. start+horizon-1 are predicted.
struct EvalWindow {
    std::size_t start = 0;
    std::size_t horizon = 0;
};

namespace detail {

inline std::vector<Eigen::VectorXd> columns(const Eigen::MatrixXd& mat, std::size_t first, std::size_t count) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    for (std::size_t c = first; c < first + count; ++c) out.emplace_back(mat.col(static_cast<Eigen::Index>(c)));
    return out;
}

inline void check_window(const KoopmanGLModel& model, const Trajectory& traj, const EvalWindow& w) {
    if (traj.state_dim() != model.n() || traj.input_dim() != model.m()) {
        throw ShapeError("model (n=" + std::to_string(model.n()) + ", m=" + std::to_string(model.m()) +
                         ") does not match trajectory (n=" + std::to_string(traj.state_dim()) +
                         ", m=" + std::to_string(traj.input_dim()) + ")");
    }
    if (w.start < model.history_length()) throw InsufficientDataError("window starts before a full history is available");
    if (w.start + w.horizon > static_cast<std::size_t>(traj.states.cols())) {
        throw InsufficientDataError("window runs past the end of the trajectory");
    }
}

}  // namespace detail

/// Default window: predict from the first full history to the end of the trajectory.
inline EvalWindow full_window(const KoopmanGLModel& model, const Trajectory& traj) {
    const std::size_t start = model.history_length();
    const auto states = static_cast<std::size_t>(traj.states.cols());
    if (states <= start) throw InsufficientDataError("trajectory is not longer than the model history");
    return {start, states - start};
}

/// Open-loop rollout over `window`, seeded by the measured states just before it.
inline RolloutResult rollout_on(const KoopmanGLModel& model, const Trajectory& traj, const EvalWindow& window,
                                RolloutOptions options = {}) {
    detail::check_window(model, traj, window);
    const std::size_t hist = model.history_length();
    const auto prefix = detail::columns(traj.states, window.start - hist, hist);
    const auto truth = detail::columns(traj.states, window.start, window.horizon);
    const Eigen::MatrixXd inputs = traj.inputs.middleCols(static_cast<Eigen::Index>(window.start - 1),
                                                           static_cast<Eigen::Index>(window.horizon));
    return rollout(model, prefix, inputs, window.horizon, truth, options);
}

/// Teacher-forced prediction: every x_{k+1} in the window is predicted from the measured history.
inline RolloutResult one_step(const KoopmanGLModel& model, const Trajectory& traj, std::optional<EvalWindow> window = {}) {
    model.validate();
    const EvalWindow w = window ? *window : full_window(model, traj);
    detail::check_window(model, traj, w);
    const std::size_t N = model.kernel.n_mem;
    const std::size_t n = model.n();
    // Measured states first_needed .. start+horizon-2 are the only ones any target depends on.
    const std::size_t first_needed = w.start - model.history_length();
    const std::size_t last_needed = w.start + std::max<std::size_t>(w.horizon, 1) - 2;
    const Eigen::MatrixXd lifted =
        lift_columns(traj.states.middleCols(static_cast<Eigen::Index>(first_needed),
                                            static_cast<Eigen::Index>(last_needed + 1 - first_needed)),
                     model.dict);
    auto measured = [&](std::size_t index) { return lifted.col(static_cast<Eigen::Index>(index - first_needed)); };

    RolloutResult result;
    result.horizon = w.horizon;
    result.predicted_states.reserve(w.horizon);
    for (std::size_t t = w.start; t < w.start + w.horizon; ++t) {
        const std::size_t k = t - 1;
        Eigen::VectorXd next = model.A_bar * measured(k);
        next.noalias() += model.B_bar * traj.inputs.col(static_cast<Eigen::Index>(k));
        for (std::size_t j = 1; j <= N; ++j) next -= model.kernel.weights[j] * measured(k + 1 - j);
        if (!detail::lifted_ok(next)) {
            result.diverged = true;
            result.divergence_step = t - w.start;
            break;
        }
        result.predicted_states.push_back(readout(next, n));
    }
    detail::score(result, detail::columns(traj.states, w.start, w.horizon));
    return result;
}

/// Per-trajectory scores of one model on a set of trajectories, all over the same window.
struct Evaluation {
    std::vector<double> rollout_nrmse;
    std::vector<double> onestep_nrmse;
    std::vector<double> mean_relative_error;  // per rollout step, averaged over trajectories
    std::size_t diverged = 0;

    [[nodiscard]] static double mean(const std::vector<double>& v) {
        if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    }
    [[nodiscard]] double mean_rollout() const { return mean(rollout_nrmse); }
    [[nodiscard]] double mean_onestep() const { return mean(onestep_nrmse); }
};

inline Evaluation evaluate(const KoopmanGLModel& model, std::span<const Trajectory> trajectories, std::size_t start,
                           std::size_t horizon, std::size_t threads = 1) {
    if (horizon == 0) throw ConfigError("evaluation horizon must be positive");
    Evaluation ev;
    ev.rollout_nrmse.resize(trajectories.size());
    ev.onestep_nrmse.resize(trajectories.size());
    std::vector<std::vector<double>> curves(trajectories.size());
    std::vector<char> diverged(trajectories.size(), 0);
    parallel_for(trajectories.size(), threads, [&](std::size_t t) {
        const EvalWindow w{start, horizon};
        auto roll = rollout_on(model, trajectories[t], w);
        auto one = one_step(model, trajectories[t], w);
        ev.rollout_nrmse[t] = roll.nrmse;
        ev.onestep_nrmse[t] = one.diverged ? std::numeric_limits<double>::infinity() : one.nrmse;
        curves[t] = std::move(roll.per_step_relative_error);
        diverged[t] = roll.diverged ? 1 : 0;
    });
    ev.mean_relative_error.assign(horizon, 0.0);
    for (std::size_t t = 0; t < trajectories.size(); ++t) {
        ev.diverged += static_cast<std::size_t>(diverged[t]);
        for (std::size_t k = 0; k < horizon; ++k) ev.mean_relative_error[k] += curves[t][k];
    }
    for (double& v : ev.mean_relative_error) v /= static_cast<double>(trajectories.size());
    return ev;
}

}  // namespace kgl
