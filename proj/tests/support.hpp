#pragma once

// Planted Koopman-GL systems whose lifted dynamics are known exactly.
//
// With the affine lifting psi(x) = [1; x] the model
//   z_{k+1} = A_bar z_k + B_bar u_k - sum_j w_j z_{k+1-j}
// keeps the constant coordinate at 1 when A_bar(0,0) = 1 + sum_j w_j and the rest of
// row 0 is zero, so every simulated state is an exact lift of its readout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "kgl/kgl.hpp"

namespace kgl::testing {

inline Eigen::MatrixXd random_matrix(Xoshiro256& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0,
                                     double hi = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(lo, hi);
    }
    return m;
}

inline double memory_mass(const GLKernel& kernel) {
    double s = 0.0;
    for (std::size_t j = 1; j < kernel.weights.size(); ++j) s += std::abs(kernel.weights[j]);
    return s;
}

/// Random planted model over an n-dimensional state with m inputs. The state block is scaled
/// so that its norm plus the retained memory mass stays below `gain`.
inline KoopmanGLModel planted_model(Xoshiro256& rng, std::size_t n, std::size_t m, const GLKernel& kernel,
                                    double gain = 0.9) {
    const auto nn = static_cast<Eigen::Index>(n);
    KoopmanGLModel model;
    model.dict = Dictionary::affine(n);
    model.kernel = kernel;
    const auto p = nn + 1;
    model.A_bar = Eigen::MatrixXd::Zero(p, p);
    double w_sum = 0.0;
    for (std::size_t j = 1; j < kernel.weights.size(); ++j) w_sum += kernel.weights[j];
    model.A_bar(0, 0) = 1.0 + w_sum;
    model.A_bar.block(1, 0, nn, 1) = random_matrix(rng, nn, 1, -0.1, 0.1);
    Eigen::MatrixXd a = random_matrix(rng, nn, nn);
    const double budget = std::max(0.05, gain - memory_mass(kernel));
    a *= budget / a.operatorNorm();
    model.A_bar.block(1, 1, nn, nn) = a;
    model.B_bar = Eigen::MatrixXd::Zero(p, static_cast<Eigen::Index>(m));
    model.B_bar.bottomRows(nn) = random_matrix(rng, nn, static_cast<Eigen::Index>(m));
    return model;
}

/// +-1 levels held for `hold` samples, flipping with probability 1/2, independently per channel.
inline Eigen::MatrixXd prbs_inputs(Xoshiro256& rng, std::size_t m, std::size_t steps, std::size_t hold = 3) {
    Eigen::MatrixXd u(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(steps));
    for (Eigen::Index c = 0; c < u.rows(); ++c) {
        double level = rng.uniform() < 0.5 ? -1.0 : 1.0;
        for (Eigen::Index k = 0; k < u.cols(); ++k) {
            if (k > 0 && static_cast<std::size_t>(k) % hold == 0 && rng.uniform() < 0.5) level = -level;
            u(c, k) = level;
        }
    }
    return u;
}

/// Runs the planted model for `steps` steps. The first max(N,1) states are random; every later
/// state follows the model exactly. When `disturbance` is nonempty, column k is added to
/// z_{k+1} (its first entry should be zero to preserve the constant coordinate).
inline Trajectory planted_trajectory(Xoshiro256& rng, const KoopmanGLModel& model, std::size_t steps,
                                     const Eigen::MatrixXd& disturbance = {}) {
    const std::size_t n = model.n();
    const std::size_t N = model.kernel.n_mem;
    const std::size_t hist = std::max<std::size_t>(N, 1);
    const auto p = static_cast<Eigen::Index>(model.p());
    Trajectory t;
    t.inputs = prbs_inputs(rng, model.m(), steps);
    std::vector<Eigen::VectorXd> z;
    for (std::size_t k = 0; k < hist; ++k) {
        Eigen::VectorXd v(p);
        v[0] = 1.0;
        v.tail(p - 1) = random_matrix(rng, p - 1, 1);
        z.push_back(v);
    }
    while (z.size() < steps + 1) {
        const std::size_t k = z.size() - 1;
        Eigen::VectorXd next = model.A_bar * z[k] + model.B_bar * t.inputs.col(static_cast<Eigen::Index>(k));
        for (std::size_t j = 1; j <= N; ++j) next -= model.kernel.weights[j] * z[k + 1 - j];
        if (disturbance.size() != 0) next += disturbance.col(static_cast<Eigen::Index>(k));
        z.push_back(next);
    }
    t.states.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(steps + 1));
    for (std::size_t k = 0; k <= steps; ++k) t.states.col(static_cast<Eigen::Index>(k)) = z[k].segment(1, static_cast<Eigen::Index>(n));
    return t;
}

inline std::vector<Eigen::VectorXd> as_columns(const Eigen::MatrixXd& m) {
    std::vector<Eigen::VectorXd> out;
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.emplace_back(m.col(c));
    return out;
}

/// Moore-Penrose pseudoinverse by complete orthogonal decomposition, independent of the SVD solver.
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& m) {
    return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(m).pseudoInverse();
}

/// GL weight from the binomial closed form (-1)^j Gamma(a+1) / (Gamma(j+1) Gamma(a-j+1)).
inline double gl_closed_form(double alpha, std::size_t j) {
    const long double a = alpha;
    const long double jj = static_cast<long double>(j);
    const long double v = std::tgamma(a + 1.0L) / (std::tgamma(jj + 1.0L) * std::tgamma(a - jj + 1.0L));
    return static_cast<double>(j % 2 == 0 ? v : -v);
}

/// Outcome of one synthetic reference-memory-model run.
struct ReferenceTrial {
    double epsilon = 0.0;
    double m_z = 0.0;
    double xi_bar = 0.0;
    double max_disturbance = 0.0;  // max_k ||d_k||
    std::size_t violations = 0;    // steps with ||d_k|| > M_z eps + xi_bar
};

/// Prony-type reference kernel c*_j = -(a1 r1^j + a2 r2^j) with random parameters.
inline std::vector<double> random_prony(Xoshiro256& rng, std::size_t length) {
    const double a1 = rng.uniform(0.005, 0.05), a2 = rng.uniform(0.005, 0.05);
    const double r1 = rng.uniform(0.9, 0.995), r2 = rng.uniform(0.5, 0.9);
    std::vector<double> c(length);
    for (std::size_t j = 1; j <= length; ++j) {
        c[j - 1] = -(a1 * std::pow(r1, static_cast<double>(j)) + a2 * std::pow(r2, static_cast<double>(j)));
    }
    return c;
}

/// Simulates z_{k+1} = A z_k + B u_k - sum_j c*_j z_{k+1-j} + xi_k (states before z_0 are zero)
/// and measures d_k = z_{k+1} - (A z_k + B u_k - sum_{j<=N} w_j z_{k+1-j}) against M_z eps_N + xi_bar.
inline ReferenceTrial reference_trial(Xoshiro256& rng, Eigen::Index p, std::size_t n_mem, double alpha,
                                      const std::vector<double>& c_star, double xi_bar, std::size_t steps) {
    const auto w = gl_weights(alpha, n_mem).weights;
    Eigen::MatrixXd a = random_matrix(rng, p, p);
    a *= 0.5 / a.operatorNorm();
    const Eigen::MatrixXd b = random_matrix(rng, p, 1);
    const Eigen::MatrixXd u = prbs_inputs(rng, 1, steps);
    std::vector<Eigen::VectorXd> z{random_matrix(rng, p, 1)};
    std::vector<Eigen::VectorXd> xi;
    for (std::size_t k = 0; k < steps; ++k) {
        Eigen::VectorXd dir = random_matrix(rng, p, 1);
        dir.normalize();
        xi.emplace_back(dir * rng.uniform(0.0, xi_bar));
        Eigen::VectorXd next = a * z[k] + b * u.col(static_cast<Eigen::Index>(k)) + xi.back();
        for (std::size_t j = 1; j <= std::min(c_star.size(), k + 1); ++j) next -= c_star[j - 1] * z[k + 1 - j];
        z.push_back(next);
    }
    ReferenceTrial out;
    out.xi_bar = xi_bar;
    for (const auto& v : z) out.m_z = std::max(out.m_z, v.norm());
    out.epsilon = kernel_mismatch(alpha, n_mem, c_star).epsilon;
    const double bound = out.m_z * out.epsilon + xi_bar;
    for (std::size_t k = 0; k < steps; ++k) {
        Eigen::VectorXd model = a * z[k] + b * u.col(static_cast<Eigen::Index>(k));
        for (std::size_t j = 1; j <= std::min(n_mem, k + 1); ++j) model -= w[j] * z[k + 1 - j];
        const double d = (z[k + 1] - model).norm();
        out.max_disturbance = std::max(out.max_disturbance, d);
        if (d > bound) ++out.violations;
    }
    return out;
}

}  // namespace kgl::testing
