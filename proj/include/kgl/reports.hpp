#pragma once

// Delimited-text report writers. Numbers use 17 significant digits, LF line endings.
//
//   heatmap.csv         N,alpha,rollout_nrmse,onestep_nrmse,diverged
//   summary.csv         method,onestep_nrmse,rollout_nrmse
//   per_trajectory.csv  method,trajectory,onestep_nrmse,rollout_nrmse
//   per_step.csv        step,<method>...,disturbance_bound
//                       (mean relative error ||x-xhat|| / (||x|| + 1e-8) over test trajectories)

#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "kgl/bounds.hpp"
#include "kgl/prediction.hpp"
#include "kgl/selection.hpp"
#include "kgl/text.hpp"

namespace kgl::reports {

inline std::string heatmap_csv(const GridResult& grid) {
    std::string out = "N,alpha,rollout_nrmse,onestep_nrmse,diverged\n";
    for (const auto& c : grid.cells) {
        const bool scored = c.feasible;
        out += std::to_string(c.n_mem) + ',' + text::fmt(c.alpha) + ',' +
               (scored ? text::fmt(c.rollout_nrmse) : std::string("nan")) + ',' +
               (scored ? text::fmt(c.onestep_nrmse) : std::string("nan")) + ',' + (c.diverged ? "1" : "0") + '\n';
    }
    return out;
}

inline std::string summary_csv(const Comparison& cmp) {
    std::string out = "method,onestep_nrmse,rollout_nrmse\n";
    for (const auto& r : cmp.rows) {
        out += std::string(method_name(r.method)) + ',' + text::fmt(r.onestep_nrmse) + ',' + text::fmt(r.rollout_nrmse) + '\n';
    }
    return out;
}

/// Aligned plaintext rendering in the shape of a two-column accuracy table.
inline std::string summary_table(const Comparison& cmp) {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-16s %16s %16s\n", "Method", "NRMSE (1-step)", "NRMSE (rollout)");
    out += line;
    out += std::string(50, '-') + '\n';
    for (const auto& r : cmp.rows) {
        std::snprintf(line, sizeof line, "%-16s %16.4f %16.4f\n", method_label(r.method), r.onestep_nrmse, r.rollout_nrmse);
        out += line;
    }
    return out;
}

inline std::string per_trajectory_csv(const Comparison& cmp) {
    std::string out = "method,trajectory,onestep_nrmse,rollout_nrmse\n";
    for (const auto& r : cmp.rows) {
        for (std::size_t t = 0; t < r.evaluation.rollout_nrmse.size(); ++t) {
            out += std::string(method_name(r.method)) + ',' + std::to_string(t) + ',' +
                   text::fmt(r.evaluation.onestep_nrmse[t]) + ',' + text::fmt(r.evaluation.rollout_nrmse[t]) + '\n';
        }
    }
    return out;
}

/// `disturbance_bound` is the constant M_z eps_N + xi_bar repeated on every row.
inline std::string per_step_csv(const Comparison& cmp, double disturbance_bound) {
    std::string out = "step";
    for (const auto& r : cmp.rows) {
        std::string name = method_name(r.method);
        for (char& ch : name) {
            if (ch == '-') ch = '_';
        }
        out += ',' + name;
    }
    out += ",disturbance_bound\n";
    for (std::size_t k = 0; k < cmp.horizon; ++k) {
        out += std::to_string(k + 1);
        for (const auto& r : cmp.rows) out += ',' + text::fmt(r.evaluation.mean_relative_error[k]);
        out += ',' + text::fmt(disturbance_bound) + '\n';
    }
    return out;
}

/// Single-model evaluation tables.
inline std::string evaluation_per_trajectory_csv(const Evaluation& ev) {
    std::string out = "trajectory,onestep_nrmse,rollout_nrmse\n";
    for (std::size_t t = 0; t < ev.rollout_nrmse.size(); ++t) {
        out += std::to_string(t) + ',' + text::fmt(ev.onestep_nrmse[t]) + ',' + text::fmt(ev.rollout_nrmse[t]) + '\n';
    }
    return out;
}

inline std::string evaluation_per_step_csv(const Evaluation& ev) {
    std::string out = "step,mean_relative_error\n";
    for (std::size_t k = 0; k < ev.mean_relative_error.size(); ++k) {
        out += std::to_string(k + 1) + ',' + text::fmt(ev.mean_relative_error[k]) + '\n';
    }
    return out;
}

struct BoundsSummary {
    KernelMismatchReport mismatch;
    std::string kernel_name;  // "prony" or "gl"
    double c_alpha = 0.0;
    double gl_tail_mass = 0.0;
    double gl_truncation_bound = 0.0;
};

/// `key = value` lines; readable as a TOML table body.
inline std::string bounds_text(const BoundsSummary& b) {
    const auto& r = b.mismatch;
    std::string out;
    out += "reference_kernel = \"" + b.kernel_name + "\"\n";
    out += "alpha = " + text::fmt(r.alpha) + '\n';
    out += "n_mem = " + std::to_string(r.n_mem) + '\n';
    out += "retained_mismatch = " + text::fmt(r.retained_mismatch) + '\n';
    out += "tail = " + text::fmt(r.tail) + '\n';
    out += "epsilon = " + text::fmt(r.epsilon) + '\n';
    out += "m_z = " + text::fmt(r.m_z) + '\n';
    out += "xi_bar = " + text::fmt(r.xi_bar) + '\n';
    if (r.xi_bar == 0.0) out += "xi_bar_note = \"residual bound assumed zero\"\n";
    out += "disturbance_bound = " + text::fmt(r.d_bound) + '\n';
    out += "c_alpha = " + text::fmt(b.c_alpha) + '\n';
    out += "gl_tail_mass = " + text::fmt(b.gl_tail_mass) + '\n';
    out += "gl_truncation_bound = " + text::fmt(b.gl_truncation_bound) + '\n';
    return out;
}

/// Full bound summary for (alpha, N): mismatch against `c_star`, M_z from `trajectories`,
/// plus the pure-GL decay constant, tail mass and truncation rate.
inline BoundsSummary summarize_bounds(double alpha, std::size_t n_mem, std::span<const double> c_star,
                                      std::string kernel_name, std::span<const Trajectory> trajectories,
                                      const Dictionary& dict, double xi_bar = 0.0,
                                      std::size_t j_max = kDefaultTailHorizon, std::size_t decay_fit_terms = 100'000) {
    BoundsSummary b;
    b.kernel_name = std::move(kernel_name);
    b.mismatch = bound_report(alpha, n_mem, c_star, trajectories, dict, xi_bar);
    b.c_alpha = fit_decay_constant(alpha, decay_fit_terms);
    b.gl_tail_mass = tail_mass(alpha, n_mem, j_max);
    b.gl_truncation_bound = gl_truncation_bound(alpha, n_mem, b.mismatch.m_z, b.c_alpha);
    return b;
}

/// Dense matrix as comma-separated rows.
inline std::string matrix_csv(const Eigen::MatrixXd& mat) {
    std::string out;
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index c = 0; c < mat.cols(); ++c) {
            if (c) out += ',';
            out += text::fmt(mat(r, c));
        }
        out += '\n';
    }
    return out;
}

}  // namespace kgl::reports
