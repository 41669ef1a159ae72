#pragma once

// Ground truth for the benchmark: a 2-D nonlinear map with a Prony-series hereditary term
// acting through g(x) = [tanh(x1); 0], driven by PRBS inputs and observed through
// additive Gaussian measurement noise.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ranges>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kgl/errors.hpp"
#include "kgl/parallel.hpp"
#include "kgl/random.hpp"

namespace kgl {

inline constexpr std::size_t kBenchmarkStateDim = 2;
inline constexpr std::size_t kBenchmarkInputDim = 1;

struct BenchmarkConfig {
    std::size_t j_ref = 400;
    std::array<double, 2> prony_a{25e-5, 7.5e-5};
    std::array<double, 2> prony_rho{0.995, 0.97};
    double noise_std = 1e-3;
    double prbs_amplitude = 1.0;
    std::size_t prbs_hold = 10;
    std::uint64_t seed = 0;

    void validate() const {
        if (j_ref < 1) throw ConfigError("j_ref must be at least 1");
        for (double rho : prony_rho) {
            if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("Prony decay rates must lie in (0,1)");
        }
        for (double a : prony_a) {
            if (!std::isfinite(a)) throw ConfigError("Prony weights must be finite");
        }
        if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ConfigError("noise_std must be a finite nonnegative number");
        if (!(prbs_amplitude >= 0.0) || !std::isfinite(prbs_amplitude)) throw ConfigError("PRBS amplitude must be finite and nonnegative");
        if (prbs_hold < 1) throw ConfigError("PRBS hold must be at least 1 sample");
    }
};

/// States and clean states are n x (T+1), inputs m x T; column k is time k.
struct Trajectory {
    Eigen::MatrixXd states;
    Eigen::MatrixXd clean_states;
    Eigen::MatrixXd inputs;

    [[nodiscard]] std::size_t length() const noexcept { return static_cast<std::size_t>(inputs.cols()); }
    [[nodiscard]] std::size_t state_dim() const noexcept { return static_cast<std::size_t>(states.rows()); }
    [[nodiscard]] std::size_t input_dim() const noexcept { return static_cast<std::size_t>(inputs.rows()); }

    void validate() const {
        if (states.cols() != inputs.cols() + 1) throw ShapeError("trajectory must hold exactly one more state than inputs");
        if (clean_states.size() != 0 && (clean_states.rows() != states.rows() || clean_states.cols() != states.cols())) {
            throw ShapeError("clean states do not match measured states");
        }
        if (!states.allFinite() || !inputs.allFinite()) throw NumericError("trajectory contains non-finite entries");
    }
};

enum class Split { train, validation, test };

inline const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
    }
    return "?";
}

inline Split parse_split(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "validation" || s == "val") return Split::validation;
    if (s == "test") return Split::test;
    throw ConfigError("unknown split '" + std::string(s) + "'");
}

struct SplitFractions {
    double train = 0.6;
    double validation = 0.2;
    double test = 0.2;
};

struct Dataset {
    std::vector<Trajectory> train;
    std::vector<Trajectory> validation;
    std::vector<Trajectory> test;
    BenchmarkConfig config;
    std::size_t traj_len = 0;
    SplitFractions fractions;

    [[nodiscard]] const std::vector<Trajectory>& split(Split s) const {
        switch (s) {
            case Split::train: return train;
            case Split::validation: return validation;
            case Split::test: return test;
        }
        return train;
    }
    [[nodiscard]] std::size_t size() const noexcept { return train.size() + validation.size() + test.size(); }
};

/// h_1..h_{J_ref} with h_j = a_1 rho_1^j + a_2 rho_2^j.
inline std::vector<double> prony_kernel(const BenchmarkConfig& config) {
    config.validate();
    std::vector<double> h(config.j_ref);
    double r1 = 1.0;
    double r2 = 1.0;
    for (std::size_t j = 0; j < config.j_ref; ++j) {
        r1 *= config.prony_rho[0];
        r2 *= config.prony_rho[1];
        h[j] = config.prony_a[0] * r1 + config.prony_a[1] * r2;
    }
    return h;
}

/// Instantaneous map f(x, u) of the benchmark.
inline Eigen::Vector2d benchmark_f(const Eigen::Ref<const Eigen::VectorXd>& x, double u) {
    return {0.90 * x[0] + 0.10 * std::sin(x[1]) + 0.10 * u,
            0.85 * x[1] + 0.08 * std::cos(x[0]) + 0.05 * x[0] * x[0] + 0.05 * u};
}

/// x_{k+1} = f(x_k, u_k) + sum_{j=1}^{min(len, J_ref)} h_j g(x_{k+1-j}) + noise.
///
/// `history` is newest-first: history[0] = x_k, history[j-1] = x_{k+1-j}. Only
/// min(history.size(), kernel.size()) lags are used.
template <std::ranges::random_access_range History>
Eigen::VectorXd truth_step(const History& history, const Eigen::Ref<const Eigen::VectorXd>& u,
                           const std::vector<double>& kernel, const Eigen::Ref<const Eigen::VectorXd>& noise) {
    const auto len = static_cast<std::size_t>(std::ranges::size(history));
    if (len == 0) throw ShapeError("truth_step needs at least the current state");
    const auto& current = *std::ranges::begin(history);
    if (current.size() != 2 || u.size() != 1 || noise.size() != 2) throw ShapeError("benchmark is 2-D with a scalar input");
    Eigen::VectorXd next = benchmark_f(current, u[0]);
    const std::size_t lags = std::min(len, kernel.size());
    double memory = 0.0;
    auto it = std::ranges::begin(history);
    for (std::size_t j = 1; j <= lags; ++j, ++it) memory += kernel[j - 1] * std::tanh((*it)[0]);
    next[0] += memory;
    next += noise;
    if (!next.allFinite()) throw SimulationBlowUp(len - 1, "state became non-finite");
    return next;
}

/// Two-level piecewise-constant sequence; at each hold boundary the level flips with probability 1/2.
inline std::vector<double> generate_prbs(std::size_t length, const BenchmarkConfig& config, Xoshiro256& stream) {
    config.validate();
    std::vector<double> out(length, 0.0);
    if (config.prbs_amplitude == 0.0) return out;
    double level = stream.uniform() < 0.5 ? -config.prbs_amplitude : config.prbs_amplitude;
    for (std::size_t k = 0; k < length; ++k) {
        if (k > 0 && k % config.prbs_hold == 0 && stream.uniform() < 0.5) level = -level;
        out[k] = level;
    }
    return out;
}

/// Rolls the truth for inputs.size() steps from x0 and adds measurement noise drawn from `stream`.
inline Trajectory simulate(const BenchmarkConfig& config, const Eigen::Ref<const Eigen::VectorXd>& x0,
                           const std::vector<double>& inputs, Xoshiro256& stream) {
    config.validate();
    if (x0.size() != 2) throw ShapeError("benchmark initial state must be 2-D");
    if (!x0.allFinite()) throw NumericError("initial state is not finite");
    const auto kernel = prony_kernel(config);
    const std::size_t steps = inputs.size();

    std::vector<Eigen::VectorXd> history;
    history.reserve(steps + 1);
    history.emplace_back(x0);
    const Eigen::VectorXd zero_noise = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd u(1);
    for (std::size_t k = 0; k < steps; ++k) {
        u[0] = inputs[k];
        history.push_back(truth_step(history | std::views::reverse, u, kernel, zero_noise));
    }

    Trajectory traj;
    traj.clean_states.resize(2, static_cast<Eigen::Index>(steps + 1));
    for (std::size_t k = 0; k <= steps; ++k) traj.clean_states.col(static_cast<Eigen::Index>(k)) = history[k];
    traj.states = traj.clean_states;
    if (config.noise_std > 0.0) {
        for (Eigen::Index k = 0; k < traj.states.cols(); ++k) {
            for (Eigen::Index i = 0; i < traj.states.rows(); ++i) traj.states(i, k) += config.noise_std * stream.normal();
        }
    }
    traj.inputs.resize(1, static_cast<Eigen::Index>(steps));
    for (std::size_t k = 0; k < steps; ++k) traj.inputs(0, static_cast<Eigen::Index>(k)) = inputs[k];
    return traj;
}

/// Sub-stream seeds for trajectory `index` of a dataset.
struct TrajectorySeeds {
    std::uint64_t initial_condition;
    std::uint64_t input;
    std::uint64_t noise;
};

inline TrajectorySeeds trajectory_seeds(std::uint64_t seed, std::size_t index) {
    return {substream_seed(seed, index, "initial-condition"), substream_seed(seed, index, "prbs"),
            substream_seed(seed, index, "noise")};
}

/// Trajectory `index` of the dataset defined by (config, traj_len), reproducible in isolation.
inline Trajectory generate_trajectory(const BenchmarkConfig& config, std::size_t traj_len, std::size_t index) {
    const auto seeds = trajectory_seeds(config.seed, index);
    Xoshiro256 ic_stream(seeds.initial_condition);
    Xoshiro256 input_stream(seeds.input);
    Xoshiro256 noise_stream(seeds.noise);
    Eigen::VectorXd x0(2);
    x0[0] = ic_stream.uniform(-1.0, 1.0);
    x0[1] = ic_stream.uniform(-1.0, 1.0);
    const auto u = generate_prbs(traj_len, config, input_stream);
    return simulate(config, x0, u, noise_stream);
}

struct SplitCounts {
    std::size_t train;
    std::size_t validation;
    std::size_t test;
};

inline SplitCounts split_counts(std::size_t n_traj, const SplitFractions& f) {
    for (double v : {f.train, f.validation, f.test}) {
        if (!(v >= 0.0)) throw ConfigError("split fractions must be nonnegative");
    }
    if (std::abs(f.train + f.validation + f.test - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
    const auto n = static_cast<double>(n_traj);
    const auto train = static_cast<std::size_t>(std::llround(f.train * n));
    const auto validation = static_cast<std::size_t>(std::llround(f.validation * n));
    if (train + validation >= n_traj || train == 0 || validation == 0) {
        throw ConfigError("split leaves an empty partition for " + std::to_string(n_traj) + " trajectories");
    }
    return {train, validation, n_traj - train - validation};
}

/// Trajectories 0..n_train-1 go to train, the next n_val to validation, the rest to test.
inline Dataset generate_dataset(const BenchmarkConfig& config, std::size_t n_traj, std::size_t traj_len,
                                const SplitFractions& fractions = {}, std::size_t threads = 1) {
    config.validate();
    if (n_traj < 3) throw ConfigError("need at least 3 trajectories for three splits");
    if (traj_len < 1) throw ConfigError("trajectory length must be positive");
    const auto counts = split_counts(n_traj, fractions);

    std::vector<Trajectory> all(n_traj);
    parallel_for(n_traj, threads, [&](std::size_t i) { all[i] = generate_trajectory(config, traj_len, i); });

    Dataset ds;
    ds.config = config;
    ds.traj_len = traj_len;
    ds.fractions = fractions;
    for (std::size_t i = 0; i < n_traj; ++i) {
        auto& dest = i < counts.train ? ds.train : (i < counts.train + counts.validation ? ds.validation : ds.test);
        dest.push_back(std::move(all[i]));
    }
    return ds;
}

}  // namespace kgl
