#pragma once

// Observable map psi(x) = [1; x; phi(x)] built from declarative feature descriptors.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kgl/errors.hpp"
#include "kgl/text.hpp"

namespace kgl {

inline constexpr int kMaxMonomialDegree = 4;

/// One nonlinear observable. Coordinates are 0-based in memory and 1-based in descriptors.
struct Feature {
    enum class Kind { monomial, sine, cosine, tanh, product };

    Kind kind = Kind::monomial;
    std::vector<int> exponents;  // monomial only, length == state_dim
    std::size_t i = 0;
    std::size_t j = 0;  // product only

    static Feature monomial(std::vector<int> exponents) { return {Kind::monomial, std::move(exponents), 0, 0}; }
    static Feature sine(std::size_t i) { return {Kind::sine, {}, i, 0}; }
    static Feature cosine(std::size_t i) { return {Kind::cosine, {}, i, 0}; }
    static Feature hyperbolic_tangent(std::size_t i) { return {Kind::tanh, {}, i, 0}; }
    static Feature product(std::size_t i, std::size_t j) { return {Kind::product, {}, i, j}; }

    [[nodiscard]] double evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        switch (kind) {
            case Kind::sine: return std::sin(x[static_cast<Eigen::Index>(i)]);
            case Kind::cosine: return std::cos(x[static_cast<Eigen::Index>(i)]);
            case Kind::tanh: return std::tanh(x[static_cast<Eigen::Index>(i)]);
            case Kind::product: return x[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(j)];
            case Kind::monomial: {
                double v = 1.0;
                for (std::size_t c = 0; c < exponents.size(); ++c) {
                    for (int e = 0; e < exponents[c]; ++e) v *= x[static_cast<Eigen::Index>(c)];
                }
                return v;
            }
        }
        return 0.0;
    }

    [[nodiscard]] std::string descriptor() const {
        auto var = [](std::size_t c) { return "x" + std::to_string(c + 1); };
        switch (kind) {
            case Kind::sine: return "sin(" + var(i) + ")";
            case Kind::cosine: return "cos(" + var(i) + ")";
            case Kind::tanh: return "tanh(" + var(i) + ")";
            case Kind::product: return "prod(" + var(i) + "," + var(j) + ")";
            case Kind::monomial: {
                std::string out = "mono(";
                bool first = true;
                for (std::size_t c = 0; c < exponents.size(); ++c) {
                    if (exponents[c] == 0) continue;
                    if (!first) out += '*';
                    out += var(c);
                    if (exponents[c] != 1) out += "^" + std::to_string(exponents[c]);
                    first = false;
                }
                return out + ")";
            }
        }
        return {};
    }

    friend bool operator==(const Feature&, const Feature&) = default;
};

namespace detail {

inline std::size_t parse_coordinate(std::string_view token, std::size_t state_dim) {
    if (token.size() < 2 || token.front() != 'x') throw ParseError("expected coordinate like x1, got '" + std::string(token) + "'");
    auto idx = text::parse_u64(token.substr(1));
    if (idx < 1 || idx > state_dim) {
        throw ParseError("coordinate '" + std::string(token) + "' outside 1.." + std::to_string(state_dim));
    }
    return static_cast<std::size_t>(idx - 1);
}

inline Feature parse_feature(std::string_view desc, std::size_t state_dim) {
    auto open = desc.find('(');
    if (open == std::string_view::npos || desc.back() != ')') throw ParseError("malformed feature '" + std::string(desc) + "'");
    auto head = desc.substr(0, open);
    auto body = desc.substr(open + 1, desc.size() - open - 2);
    if (head == "sin") return Feature::sine(parse_coordinate(body, state_dim));
    if (head == "cos") return Feature::cosine(parse_coordinate(body, state_dim));
    if (head == "tanh") return Feature::hyperbolic_tangent(parse_coordinate(body, state_dim));
    if (head == "prod") {
        auto parts = text::split(body, ',');
        if (parts.size() != 2) throw ParseError("prod() takes two coordinates: '" + std::string(desc) + "'");
        return Feature::product(parse_coordinate(parts[0], state_dim), parse_coordinate(parts[1], state_dim));
    }
    if (head == "mono") {
        std::vector<int> exponents(state_dim, 0);
        for (auto term : text::split(body, '*')) {
            auto caret = term.find('^');
            auto c = parse_coordinate(term.substr(0, caret), state_dim);
            int e = 1;
            if (caret != std::string_view::npos) e = static_cast<int>(text::parse_u64(term.substr(caret + 1)));
            exponents[c] += e;
        }
        return Feature::monomial(std::move(exponents));
    }
    throw ParseError("unknown feature kind '" + std::string(head) + "'");
}

}  // namespace detail

/// Ordered, immutable list of features over an n-dimensional state.
class Dictionary {
public:
    /// Affine lifting of a scalar state.
    Dictionary() : Dictionary(1, {}) {}

    Dictionary(std::size_t state_dim, std::vector<Feature> features)
        : state_dim_(state_dim), features_(std::move(features)) {
        validate();
    }

    /// The lifting [1; x] used by the state-space baselines.
    static Dictionary affine(std::size_t state_dim) { return Dictionary(state_dim, {}); }

    /// {sin(x2), cos(x1), x1^2, tanh(x1), x1*x2, x2^2}: p = 9 for the 2-D benchmark.
    static Dictionary benchmark_default() {
        return Dictionary(2, {Feature::sine(1), Feature::cosine(0), Feature::monomial({2, 0}),
                              Feature::hyperbolic_tangent(0), Feature::product(0, 1), Feature::monomial({0, 2})});
    }

    /// Parses `feat;feat;...`, or one of the presets `default` / `affine` (also `none` or empty).
    static Dictionary parse(std::string_view spec, std::size_t state_dim) {
        if (spec == "default") {
            if (state_dim != 2) throw ConfigError("the default dictionary is defined for 2-D states");
            return benchmark_default();
        }
        if (spec.empty() || spec == "affine" || spec == "none") return affine(state_dim);
        std::vector<Feature> features;
        for (auto part : text::split(spec, ';')) {
            if (part.empty()) continue;
            features.push_back(detail::parse_feature(part, state_dim));
        }
        return Dictionary(state_dim, std::move(features));
    }

    [[nodiscard]] std::size_t state_dim() const noexcept { return state_dim_; }
    [[nodiscard]] std::size_t feature_count() const noexcept { return features_.size(); }
    [[nodiscard]] std::size_t lifted_dim() const noexcept { return 1 + state_dim_ + features_.size(); }
    [[nodiscard]] const std::vector<Feature>& features() const noexcept { return features_; }

    /// Canonical `;`-joined descriptor; parse(descriptor()) reproduces the dictionary.
    [[nodiscard]] std::string descriptor() const {
        std::string out;
        for (std::size_t f = 0; f < features_.size(); ++f) {
            if (f) out += ';';
            out += features_[f].descriptor();
        }
        return out;
    }

    [[nodiscard]] std::uint64_t fingerprint() const {
        return text::Fnv1a{}.update("n=" + std::to_string(state_dim_) + "|" + descriptor()).digest();
    }

    friend bool operator==(const Dictionary&, const Dictionary&) = default;

private:
    void validate() const {
        if (state_dim_ == 0) throw ConfigError("state dimension must be positive");
        for (std::size_t f = 0; f < features_.size(); ++f) {
            const auto& feat = features_[f];
            auto in_range = [&](std::size_t c) { return c < state_dim_; };
            switch (feat.kind) {
                case Feature::Kind::monomial: {
                    if (feat.exponents.size() != state_dim_) throw ConfigError("monomial exponent vector has wrong length");
                    int degree = 0;
                    for (int e : feat.exponents) {
                        if (e < 0) throw ConfigError("negative monomial exponent");
                        degree += e;
                    }
                    if (degree == 0) throw ConfigError("monomial of degree 0 duplicates the constant coordinate");
                    if (degree == 1) throw ConfigError("monomial of degree 1 duplicates a linear coordinate");
                    if (degree > kMaxMonomialDegree) {
                        throw ConfigError("monomial " + feat.descriptor() + " exceeds total degree " +
                                          std::to_string(kMaxMonomialDegree));
                    }
                    break;
                }
                case Feature::Kind::product:
                    if (!in_range(feat.i) || !in_range(feat.j)) throw ConfigError("product coordinate out of range");
                    if (feat.i == feat.j) throw ConfigError("prod(xi,xi) is a monomial; use mono(xi^2)");
                    break;
                default:
                    if (!in_range(feat.i)) throw ConfigError("feature coordinate out of range");
            }
            for (std::size_t g = 0; g < f; ++g) {
                if (features_[g] == feat) throw ConfigError("duplicate feature " + feat.descriptor());
            }
        }
    }

    std::size_t state_dim_;
    std::vector<Feature> features_;
};

struct LiftedState {
    Eigen::VectorXd values;
    std::size_t state_dim = 0;
    std::uint64_t dict_id = 0;
};

/// Writes psi(x) into `out` (length p). Throws NumericError naming any non-finite feature.
inline void lift_into(const Eigen::Ref<const Eigen::VectorXd>& x, const Dictionary& dict, Eigen::Ref<Eigen::VectorXd> out) {
    const auto n = static_cast<Eigen::Index>(dict.state_dim());
    if (x.size() != n) {
        throw ShapeError("state has length " + std::to_string(x.size()) + ", dictionary expects " + std::to_string(n));
    }
    if (out.size() != static_cast<Eigen::Index>(dict.lifted_dim())) throw ShapeError("lifted buffer has wrong length");
    out[0] = 1.0;
    out.segment(1, n) = x;
    Eigen::Index row = 1 + n;
    for (const auto& feat : dict.features()) {
        const double v = feat.evaluate(x);
        if (!std::isfinite(v)) throw NumericError("feature " + feat.descriptor() + " evaluated to a non-finite value");
        out[row++] = v;
    }
}

inline LiftedState lift(const Eigen::Ref<const Eigen::VectorXd>& x, const Dictionary& dict) {
    LiftedState z{Eigen::VectorXd(static_cast<Eigen::Index>(dict.lifted_dim())), dict.state_dim(), dict.fingerprint()};
    lift_into(x, dict, z.values);
    return z;
}

/// Lifts every column of `states` (n x T) into a p x T matrix.
inline Eigen::MatrixXd lift_columns(const Eigen::MatrixXd& states, const Dictionary& dict) {
    Eigen::MatrixXd lifted(static_cast<Eigen::Index>(dict.lifted_dim()), states.cols());
    for (Eigen::Index c = 0; c < states.cols(); ++c) lift_into(states.col(c), dict, lifted.col(c));
    return lifted;
}

/// C z: the linear block z[1..n].
inline Eigen::VectorXd readout(const LiftedState& z) {
    return z.values.segment(1, static_cast<Eigen::Index>(z.state_dim));
}

inline Eigen::VectorXd readout(const Eigen::Ref<const Eigen::VectorXd>& z, std::size_t state_dim) {
    return z.segment(1, static_cast<Eigen::Index>(state_dim));
}

/// C = [0 | I_n | 0] sized to the dictionary.
inline Eigen::MatrixXd readout_matrix(const Dictionary& dict) {
    const auto n = static_cast<Eigen::Index>(dict.state_dim());
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(dict.lifted_dim()));
    c.block(0, 1, n, n).setIdentity();
    return c;
}

}  // namespace kgl
