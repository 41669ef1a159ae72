#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "kgl/dataset_io.hpp"
#include "kgl/hereditary_sim.hpp"

using namespace kgl;

namespace {

BenchmarkConfig memoryless(BenchmarkConfig c = {}) {
    c.prony_a = {0.0, 0.0};
    return c;
}

}  // namespace

TEST(Prony, FirstWeight) {
    const auto h = prony_kernel(BenchmarkConfig{});
    ASSERT_EQ(h.size(), 400u);
    EXPECT_NEAR(h[0], 3.215e-4, 1e-18);
}

TEST(Prony, PositiveAndDecreasing) {
    const auto h = prony_kernel(BenchmarkConfig{});
    for (std::size_t j = 0; j < h.size(); ++j) {
        EXPECT_GT(h[j], 0.0);
        if (j) {
            EXPECT_LT(h[j], h[j - 1]);
        }
    }
}

TEST(Prony, ZeroWeightsGiveZeroKernel) {
    for (double v : prony_kernel(memoryless())) EXPECT_EQ(v, 0.0);
}

TEST(TruthStep, HandValues) {
    const std::vector<Eigen::VectorXd> hist{Eigen::Vector2d(0, 0)};
    const std::vector<double> zero_kernel(10, 0.0);
    const Eigen::Vector2d noise(0, 0);
    Eigen::VectorXd u(1);
    u[0] = 0.0;
    const auto a = truth_step(hist, u, zero_kernel, noise);
    EXPECT_DOUBLE_EQ(a[0], 0.0);
    EXPECT_DOUBLE_EQ(a[1], 0.08);
    u[0] = 1.0;
    const auto b = truth_step(hist, u, zero_kernel, noise);
    EXPECT_DOUBLE_EQ(b[0], 0.10);
    EXPECT_DOUBLE_EQ(b[1], 0.13);
}

TEST(TruthStep, MemoryVanishesWhenX1IsZero) {
    const std::vector<Eigen::VectorXd> hist(20, Eigen::Vector2d(0, 0.7));
    const auto kernel = prony_kernel(BenchmarkConfig{});
    Eigen::VectorXd u(1);
    u[0] = 0.3;
    const auto with = truth_step(hist, u, kernel, Eigen::Vector2d(0, 0));
    const auto without = truth_step(hist, u, std::vector<double>(400, 0.0), Eigen::Vector2d(0, 0));
    EXPECT_EQ(with, without);
}

TEST(TruthStep, WindowIsTruncatedToKernelLength) {
    // Entries older than the kernel must not matter.
    std::vector<Eigen::VectorXd> hist(5, Eigen::Vector2d(0.5, 0));
    const std::vector<double> kernel{0.1, 0.2, 0.3};
    Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
    const auto a = truth_step(hist, u, kernel, Eigen::Vector2d(0, 0));
    hist[3] = Eigen::Vector2d(100, 0);
    hist[4] = Eigen::Vector2d(-100, 0);
    const auto b = truth_step(hist, u, kernel, Eigen::Vector2d(0, 0));
    EXPECT_EQ(a, b);
    // A short history uses every available lag.
    const std::vector<Eigen::VectorXd> short_hist(2, Eigen::Vector2d(0.5, 0));
    const auto c = truth_step(short_hist, u, kernel, Eigen::Vector2d(0, 0));
    const double f1 = 0.9 * 0.5;
    EXPECT_DOUBLE_EQ(c[0], f1 + (0.1 + 0.2) * std::tanh(0.5));
}

TEST(TruthStep, BlowUpReportsStep) {
    const std::vector<Eigen::VectorXd> hist(3, Eigen::Vector2d(0, std::numeric_limits<double>::infinity()));
    Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
    try {
        (void)truth_step(hist, u, std::vector<double>(3, 0.0), Eigen::Vector2d(0, 0));
        FAIL();
    } catch (const SimulationBlowUp& e) {
        EXPECT_EQ(e.step(), 2u);
    }
}

TEST(Prbs, ZeroAmplitude) {
    BenchmarkConfig c;
    c.prbs_amplitude = 0.0;
    Xoshiro256 rng(1);
    for (double v : generate_prbs(50, c, rng)) EXPECT_EQ(v, 0.0);
}

TEST(Prbs, HoldEqualToLengthIsConstant) {
    BenchmarkConfig c;
    c.prbs_hold = 40;
    Xoshiro256 rng(2);
    const auto u = generate_prbs(40, c, rng);
    for (double v : u) EXPECT_EQ(v, u[0]);
    EXPECT_EQ(std::abs(u[0]), 1.0);
}

TEST(Prbs, SegmentStructure) {
    BenchmarkConfig c;
    c.prbs_amplitude = 2.5;
    Xoshiro256 rng(3);
    const auto u = generate_prbs(100, c, rng);
    for (std::size_t k = 0; k < u.size(); ++k) {
        EXPECT_TRUE(u[k] == 2.5 || u[k] == -2.5);
        if (k % 10 != 0) {
            EXPECT_EQ(u[k], u[k - 1]);  // changes only at the 10 segment starts
        }
    }
}

TEST(Simulate, NoiseFreeStatesEqualClean) {
    BenchmarkConfig c;
    c.noise_std = 0.0;
    const auto t = generate_trajectory(c, 200, 0);
    EXPECT_EQ(t.states, t.clean_states);
    EXPECT_EQ(t.states.cols(), 201);
    EXPECT_EQ(t.inputs.cols(), 200);
}

TEST(Simulate, MemorylessMatchesDirectRecursion) {
    const auto c = memoryless();
    Xoshiro256 rng(5);
    const Eigen::Vector2d x0(0.4, -0.6);
    std::vector<double> u(300);
    for (auto& v : u) v = rng.uniform(-1, 1);
    Xoshiro256 noise(6);
    const auto t = simulate(c, x0, u, noise);
    double x1 = 0.4, x2 = -0.6;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double n1 = 0.90 * x1 + 0.10 * std::sin(x2) + 0.10 * u[k];
        const double n2 = 0.85 * x2 + 0.08 * std::cos(x1) + 0.05 * x1 * x1 + 0.05 * u[k];
        x1 = n1;
        x2 = n2;
        EXPECT_EQ(t.clean_states(0, static_cast<Eigen::Index>(k + 1)), x1);
        EXPECT_EQ(t.clean_states(1, static_cast<Eigen::Index>(k + 1)), x2);
    }
}

TEST(Simulate, ZeroInputStaysBounded) {
    BenchmarkConfig c = memoryless();
    c.noise_std = 0.0;
    Xoshiro256 rng(0);
    const auto t = simulate(c, Eigen::Vector2d(0, 0), std::vector<double>(2000, 0.0), rng);
    EXPECT_LT(t.states.cwiseAbs().maxCoeff(), 1.0);
    const auto last = t.states.col(t.states.cols() - 1);
    const auto prev = t.states.col(t.states.cols() - 2);
    EXPECT_LT((last - prev).norm(), 1e-12);
}

TEST(Simulate, NoiseDoesNotAffectCleanStates) {
    BenchmarkConfig a;
    BenchmarkConfig b;
    b.noise_std = 0.05;
    const auto ta = generate_trajectory(a, 300, 4);
    const auto tb = generate_trajectory(b, 300, 4);
    EXPECT_EQ(ta.clean_states, tb.clean_states);
    EXPECT_EQ(ta.inputs, tb.inputs);
    EXPECT_NE(ta.states, tb.states);
}

TEST(Simulate, SeedDeterminism) {
    BenchmarkConfig c;
    c.seed = 99;
    const auto a = generate_trajectory(c, 100, 7);
    const auto b = generate_trajectory(c, 100, 7);
    EXPECT_EQ(a.states, b.states);
    c.seed = 100;
    EXPECT_NE(generate_trajectory(c, 100, 7).states, a.states);
}

TEST(Dataset, OnePerSplit) {
    const auto ds = generate_dataset(BenchmarkConfig{}, 3, 20, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    EXPECT_EQ(ds.train.size(), 1u);
    EXPECT_EQ(ds.validation.size(), 1u);
    EXPECT_EQ(ds.test.size(), 1u);
}

TEST(Dataset, DefaultSplitSizes) {
    const auto counts = split_counts(60, SplitFractions{});
    EXPECT_EQ(counts.train, 36u);
    EXPECT_EQ(counts.validation, 12u);
    EXPECT_EQ(counts.test, 12u);
}

TEST(Dataset, InvalidSplits) {
    EXPECT_THROW(split_counts(10, {0.5, 0.5, 0.5}), ConfigError);
    EXPECT_THROW(split_counts(3, {0.9, 0.05, 0.05}), ConfigError);
    EXPECT_THROW(generate_dataset(BenchmarkConfig{}, 2, 10), ConfigError);
}

TEST(Dataset, DefaultsAreBoundedAndDeterministic) {
    const auto a = generate_dataset(BenchmarkConfig{}, 60, 600, {}, 4);
    const auto b = generate_dataset(BenchmarkConfig{}, 60, 600, {}, 1);
    for (Split s : {Split::train, Split::validation, Split::test}) {
        ASSERT_EQ(a.split(s).size(), b.split(s).size());
        for (std::size_t i = 0; i < a.split(s).size(); ++i) {
            EXPECT_TRUE(a.split(s)[i].states.allFinite());
            EXPECT_LT(a.split(s)[i].states.cwiseAbs().maxCoeff(), 10.0);
            EXPECT_EQ(a.split(s)[i].states, b.split(s)[i].states);
        }
    }
}

TEST(Dataset, WriteReadRoundTrip) {
    BenchmarkConfig c;
    c.seed = 21;
    const auto ds = generate_dataset(c, 6, 50, {0.5, 1.0 / 6, 1.0 / 3});
    const auto dir = std::filesystem::temp_directory_path() / "kgl_dataset_roundtrip";
    std::filesystem::remove_all(dir);
    write_dataset(dir, ds);
    const auto back = read_dataset(dir);
    EXPECT_EQ(back.config.seed, 21u);
    EXPECT_EQ(back.traj_len, 50u);
    ASSERT_EQ(back.train.size(), ds.train.size());
    ASSERT_EQ(back.test.size(), ds.test.size());
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
        EXPECT_EQ(back.train[i].states, ds.train[i].states);
        EXPECT_EQ(back.train[i].clean_states, ds.train[i].clean_states);
        EXPECT_EQ(back.train[i].inputs, ds.train[i].inputs);
    }
    EXPECT_EQ(dataset_manifest_hash(back), dataset_manifest_hash(ds));
    std::filesystem::remove_all(dir);
}

TEST(Dataset, CsvLayout) {
    BenchmarkConfig c;
    const auto t = generate_trajectory(c, 3, 0);
    const auto csv = trajectory_csv(t);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,u_1,x_1,x_2,xclean_1,xclean_2");
    const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
    EXPECT_EQ(last.substr(0, 3), "3,,");
}
