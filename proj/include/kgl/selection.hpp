#pragma once

// (N, alpha) grid search on validation rollouts and the four-method comparison on the test split.
// Every model compared in one call predicts the same states: windows start at the largest
// memory length in play.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kgl/augmented.hpp"
#include "kgl/errors.hpp"
#include "kgl/hereditary_sim.hpp"
#include "kgl/identification.hpp"
#include "kgl/parallel.hpp"
#include "kgl/prediction.hpp"

namespace kgl {

struct GridCell {
    std::size_t n_mem = 0;
    double alpha = 0.0;
    double rollout_nrmse = std::numeric_limits<double>::infinity();
    double onestep_nrmse = std::numeric_limits<double>::infinity();
    bool diverged = false;
    bool feasible = true;
    std::string note;  // reason for infeasibility, if any
};

struct GridSettings {
    double ridge = 0.0;
    std::size_t horizon = kDefaultHorizon;
    std::uint64_t dict_hash = 0;
    std::size_t eval_start = 0;
};

struct GridResult {
    std::vector<GridCell> cells;  // N-major, alpha-minor, in grid order
    std::size_t best_n_mem = 0;
    double best_alpha = 0.0;
    GridSettings settings;

    [[nodiscard]] const GridCell& best() const {
        for (const auto& c : cells) {
            if (c.n_mem == best_n_mem && c.alpha == best_alpha) return c;
        }
        throw Error("best cell missing from grid");
    }
};

namespace detail {

inline std::size_t shortest_states(std::span<const Trajectory> trajs) {
    std::size_t shortest = std::numeric_limits<std::size_t>::max();
    for (const auto& t : trajs) shortest = std::min(shortest, static_cast<std::size_t>(t.states.cols()));
    return shortest;
}

/// Lower score wins; ties go to smaller N, then smaller alpha.
inline bool better(const GridCell& a, const GridCell& b) {
    if (a.rollout_nrmse != b.rollout_nrmse) return a.rollout_nrmse < b.rollout_nrmse;
    if (a.n_mem != b.n_mem) return a.n_mem < b.n_mem;
    return a.alpha < b.alpha;
}

}  // namespace detail

/// Scores every (N, alpha) by mean validation rollout NRMSE of a model identified on train.
/// Cells whose N does not fit the data are marked infeasible; diverged cells score +inf.
inline GridResult grid_search(const Dataset& dataset, const Dictionary& dict, const std::vector<std::size_t>& n_grid,
                              const std::vector<double>& alpha_grid, double ridge = 0.0,
                              std::size_t horizon = kDefaultHorizon, std::size_t threads = 1) {
    if (n_grid.empty() || alpha_grid.empty()) throw ConfigError("grid search needs nonempty grids");
    if (horizon == 0) throw ConfigError("horizon must be positive");
    const std::size_t shortest = std::min(detail::shortest_states(dataset.train), detail::shortest_states(dataset.validation));

    // A cell is feasible when N < shortest trajectory length and its window fits the validation data.
    auto fits = [&](std::size_t n) { return n + 1 < shortest && std::max<std::size_t>(n, 1) + horizon <= shortest; };
    std::size_t start = 1;
    for (auto n : n_grid) {
        if (fits(n)) start = std::max(start, std::max<std::size_t>(n, 1));
    }

    GridResult result;
    result.settings = {ridge, horizon, dict.fingerprint(), start};
    for (auto n : n_grid) {
        for (double a : alpha_grid) {
            GridCell cell;
            cell.n_mem = n;
            cell.alpha = a;
            result.cells.push_back(std::move(cell));
        }
    }
    parallel_for(result.cells.size(), threads, [&](std::size_t i) {
        auto& cell = result.cells[i];
        if (!fits(cell.n_mem)) {
            cell.feasible = false;
            cell.note = "memory length does not fit the trajectories";
            return;
        }
        try {
            const auto model = identify(dataset, dict, cell.alpha, cell.n_mem, ridge);
            const auto ev = evaluate(model, dataset.validation, start, horizon);
            cell.rollout_nrmse = ev.mean_rollout();
            cell.onestep_nrmse = ev.mean_onestep();
            cell.diverged = ev.diverged > 0 || !std::isfinite(cell.rollout_nrmse);
            if (cell.diverged) cell.rollout_nrmse = std::numeric_limits<double>::infinity();
        } catch (const RankDeficiencyError& e) {
            cell.feasible = false;
            cell.note = e.what();
        }
    });

    const GridCell* best = nullptr;
    for (const auto& c : result.cells) {
        if (!c.feasible || c.diverged) continue;
        if (!best || detail::better(c, *best)) best = &c;
    }
    if (!best) throw Error("every grid cell diverged or was infeasible");
    result.best_n_mem = best->n_mem;
    result.best_alpha = best->alpha;
    return result;
}

struct MethodResult {
    Method method = Method::koopman_gl;
    std::size_t n_mem = 0;
    double alpha = 0.0;
    double onestep_nrmse = 0.0;  // mean over test trajectories
    double rollout_nrmse = 0.0;
    Evaluation evaluation;
    std::optional<SpectralRadius> spectral_radius;  // memory models only
};

struct Comparison {
    std::vector<MethodResult> rows;  // Koopman-GL, Koopman-Markov, State-GL, State-Markov
    std::size_t eval_start = 0;
    std::size_t horizon = 0;

    [[nodiscard]] const MethodResult& row(Method m) const {
        for (const auto& r : rows) {
            if (r.method == m) return r;
        }
        throw Error("method missing from comparison");
    }
};

/// Four-way comparison on the test split. State-GL shares the selected (N, alpha).
inline Comparison compare_baselines(const Dataset& dataset, const Dictionary& dict, std::size_t n_mem, double alpha,
                                    double ridge = 0.0, std::size_t horizon = kDefaultHorizon, std::size_t threads = 1,
                                    bool with_spectral_radius = true) {
    if (n_mem == 0) throw ConfigError("the selected configuration must have memory");
    Comparison cmp;
    cmp.eval_start = n_mem;
    cmp.horizon = horizon;
    cmp.rows.resize(std::size(kAllMethods));
    parallel_for(cmp.rows.size(), threads, [&](std::size_t i) {
        const Method method = kAllMethods[i];
        const auto model = identify_method(dataset, method, dict, alpha, n_mem, ridge);
        MethodResult r;
        r.method = method;
        r.n_mem = model.kernel.n_mem;
        r.alpha = model.kernel.alpha;
        r.evaluation = evaluate(model, dataset.test, cmp.eval_start, horizon);
        r.onestep_nrmse = r.evaluation.mean_onestep();
        r.rollout_nrmse = r.evaluation.mean_rollout();
        if (with_spectral_radius && !model.kernel.is_markov()) r.spectral_radius = spectral_radius(build_augmented(model));
        cmp.rows[i] = std::move(r);
    });
    return cmp;
}

}  // namespace kgl
