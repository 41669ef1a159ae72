#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "kgl/lifting.hpp"
#include "support.hpp"

using namespace kgl;

namespace {

Dictionary four_features() { return Dictionary::parse("sin(x2);cos(x1);mono(x1^2);tanh(x1)", 2); }

}  // namespace

TEST(Lift, AtOrigin) {
    const auto z = lift(Eigen::Vector2d(0, 0), four_features()).values;
    const Eigen::VectorXd expected = (Eigen::VectorXd(7) << 1, 0, 0, 0, 1, 0, 0).finished();
    EXPECT_EQ(z, expected);
}

TEST(Lift, AtUnitX1) {
    const auto z = lift(Eigen::Vector2d(1, 0), four_features()).values;
    const Eigen::VectorXd expected = (Eigen::VectorXd(7) << 1, 1, 0, 0, std::cos(1.0), 1, std::tanh(1.0)).finished();
    EXPECT_EQ(z, expected);
}

TEST(Lift, EmptyDictionaryIsAffine) {
    const auto dict = Dictionary::affine(3);
    EXPECT_EQ(dict.lifted_dim(), 4u);
    const Eigen::Vector3d x(0.5, -2, 7);
    const auto z = lift(x, dict).values;
    EXPECT_EQ(z[0], 1.0);
    EXPECT_EQ(z.tail(3), x);
}

TEST(Lift, DefaultDictionary) {
    const auto dict = Dictionary::benchmark_default();
    EXPECT_EQ(dict.lifted_dim(), 9u);
    const Eigen::Vector2d x(0.3, -1.2);
    const auto z = lift(x, dict).values;
    const double expected[] = {1, 0.3, -1.2, std::sin(-1.2), std::cos(0.3), 0.3 * 0.3, std::tanh(0.3), 0.3 * -1.2, 1.2 * 1.2};
    for (int i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(z[i], expected[i]);
}

TEST(Lift, ShapeAndNumericErrors) {
    EXPECT_THROW(lift(Eigen::Vector3d(1, 2, 3), four_features()), ShapeError);
    const auto quartic = Dictionary::parse("mono(x1^4)", 2);
    try {
        (void)lift(Eigen::Vector2d(1e100, 0), quartic);
        FAIL() << "overflow not reported";
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("mono(x1^4)"), std::string::npos);
    }
}

TEST(Readout, SliceSemantics) {
    const Eigen::VectorXd z = (Eigen::VectorXd(5) << 1, 3.5, -2, 9, 9).finished();
    EXPECT_EQ(readout(z, 2), Eigen::Vector2d(3.5, -2));
}

TEST(Readout, RoundTripIsExact) {
    Xoshiro256 rng(11);
    for (const auto& dict : {Dictionary::benchmark_default(), Dictionary::affine(2), four_features()}) {
        for (int trial = 0; trial < 1000; ++trial) {
            const Eigen::Vector2d x(rng.uniform(-3, 3), rng.uniform(-3, 3));
            const auto z = lift(x, dict);
            EXPECT_EQ(readout(z), x);
            EXPECT_EQ(z.values.size(), static_cast<Eigen::Index>(1 + 2 + dict.feature_count()));
        }
    }
}

TEST(Readout, Matrix) {
    const auto c = readout_matrix(four_features());
    ASSERT_EQ(c.rows(), 2);
    ASSERT_EQ(c.cols(), 7);
    EXPECT_EQ(c(0, 1), 1.0);
    EXPECT_EQ(c(1, 2), 1.0);
    EXPECT_EQ(c.sum(), 2.0);
    for (Eigen::Index r = 0; r < 2; ++r) EXPECT_EQ(c.row(r).sum(), 1.0);
    const Eigen::Vector2d x(0.7, -0.1);
    EXPECT_EQ(c * lift(x, four_features()).values, x);
}

TEST(Lift, Deterministic) {
    const Eigen::Vector2d x(0.123, 4.56);
    const auto dict = Dictionary::benchmark_default();
    EXPECT_EQ(lift(x, dict).values, lift(x, dict).values);
}

TEST(Dictionary, DescriptorRoundTrip) {
    const std::string spec = "sin(x2);cos(x1);mono(x1^2*x2);tanh(x1);prod(x1,x2);mono(x2^3)";
    const auto dict = Dictionary::parse(spec, 2);
    EXPECT_EQ(dict.descriptor(), spec);
    EXPECT_EQ(Dictionary::parse(dict.descriptor(), 2), dict);
    EXPECT_EQ(Dictionary::parse("default", 2), Dictionary::benchmark_default());
    EXPECT_EQ(Dictionary::parse(Dictionary::benchmark_default().descriptor(), 2), Dictionary::benchmark_default());
}

TEST(Dictionary, RejectsInvalidFeatures) {
    EXPECT_THROW(Dictionary::parse("mono(x1)", 2), ConfigError);
    EXPECT_THROW(Dictionary::parse("mono(x1^5)", 2), ConfigError);
    EXPECT_THROW(Dictionary::parse("prod(x1,x1)", 2), ConfigError);
    EXPECT_THROW(Dictionary::parse("sin(x3)", 2), ParseError);
    EXPECT_THROW(Dictionary::parse("sin(x1);sin(x1)", 2), ConfigError);
    EXPECT_ANY_THROW(Dictionary::parse("exp(x1)", 2));
    EXPECT_ANY_THROW(Dictionary::parse("sin(x0)", 2));
}

TEST(Dictionary, FingerprintTracksContents) {
    EXPECT_EQ(Dictionary::benchmark_default().fingerprint(), Dictionary::benchmark_default().fingerprint());
    EXPECT_NE(Dictionary::benchmark_default().fingerprint(), Dictionary::affine(2).fingerprint());
}
