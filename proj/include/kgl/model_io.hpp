#pragma once

// Model file: one `key value...` record per line, matrices row-major with 17 significant
// digits, so that a reloaded model predicts bitwise-identically.
//
//   kgl-model 1
//   n 2
//   m 1
//   p 9
//   dictionary sin(x2);cos(x1);...
//   alpha 0.20000000000000001
//   n_mem 100
//   weights w_0 ... w_N
//   A_bar <rows> <cols>
//   <row 0>
//   ...
//   B_bar <rows> <cols>
//   ...
//   fit.residual_norm / fit.mu / fit.ridge / fit.row_count / fit.data_hash / fit.rank_deficient
//   dataset_hash 0x...

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kgl/dataset_io.hpp"
#include "kgl/errors.hpp"
#include "kgl/identification.hpp"
#include "kgl/text.hpp"

namespace kgl {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline void write_matrix(std::string& out, const char* name, const Eigen::MatrixXd& mat) {
    out += std::string(name) + ' ' + std::to_string(mat.rows()) + ' ' + std::to_string(mat.cols()) + '\n';
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index c = 0; c < mat.cols(); ++c) {
            if (c) out += ' ';
            out += text::fmt(mat(r, c));
        }
        out += '\n';
    }
}

inline std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> out;
    for (auto f : text::split(line, ' ')) {
        if (!f.empty()) out.push_back(f);
    }
    return out;
}

class LineReader {
public:
    explicit LineReader(const std::string& contents) : in_(contents) {}

    std::string next() {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError("model file ended early");
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    }

    /// Reads `key rest` and returns rest.
    std::string expect(std::string_view key) {
        auto line = next();
        if (line.rfind(std::string(key) + ' ', 0) != 0 && line != key) {
            throw ParseError("line " + std::to_string(line_no_) + ": expected '" + std::string(key) + "'");
        }
        return line.size() > key.size() ? line.substr(key.size() + 1) : std::string{};
    }

    Eigen::MatrixXd matrix(std::string_view key) {
        const auto header = expect(key);
        const auto dims = fields(header);
        if (dims.size() != 2) throw ParseError("matrix header needs rows and cols");
        const auto rows = static_cast<Eigen::Index>(text::parse_u64(dims[0]));
        const auto cols = static_cast<Eigen::Index>(text::parse_u64(dims[1]));
        Eigen::MatrixXd mat(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const auto line = next();
            const auto values = fields(line);
            if (static_cast<Eigen::Index>(values.size()) != cols) throw ParseError("matrix row has the wrong length");
            for (Eigen::Index c = 0; c < cols; ++c) mat(r, c) = text::parse_double(values[static_cast<std::size_t>(c)]);
        }
        return mat;
    }

private:
    std::istringstream in_;
    std::size_t line_no_ = 0;
};

}  // namespace detail

inline std::string model_text(const KoopmanGLModel& model) {
    model.validate();
    std::string out = "kgl-model " + std::to_string(kModelFormatVersion) + '\n';
    out += "n " + std::to_string(model.n()) + '\n';
    out += "m " + std::to_string(model.m()) + '\n';
    out += "p " + std::to_string(model.p()) + '\n';
    out += "dictionary " + model.dict.descriptor() + '\n';
    out += "alpha " + text::fmt(model.kernel.alpha) + '\n';
    out += "n_mem " + std::to_string(model.kernel.n_mem) + '\n';
    out += "weights";
    for (double w : model.kernel.weights) out += ' ' + text::fmt(w);
    out += '\n';
    detail::write_matrix(out, "A_bar", model.A_bar);
    detail::write_matrix(out, "B_bar", model.B_bar);
    out += "fit.residual_norm " + text::fmt(model.fit.residual_norm) + '\n';
    out += "fit.mu " + text::fmt(model.fit.mu) + '\n';
    out += "fit.ridge " + text::fmt(model.fit.ridge) + '\n';
    out += "fit.row_count " + std::to_string(model.fit.row_count) + '\n';
    out += "fit.data_hash " + text::hex(model.fit.data_hash) + '\n';
    out += "fit.rank_deficient " + std::string(model.fit.rank_deficient ? "1" : "0") + '\n';
    out += "dataset_hash " + text::hex(model.dataset_hash) + '\n';
    return out;
}

inline KoopmanGLModel parse_model(const std::string& contents) {
    detail::LineReader in(contents);
    if (in.expect("kgl-model") != std::to_string(kModelFormatVersion)) throw ParseError("unsupported model format version");
    const auto n = static_cast<std::size_t>(text::parse_u64(in.expect("n")));
    const auto m = static_cast<std::size_t>(text::parse_u64(in.expect("m")));
    const auto p = static_cast<std::size_t>(text::parse_u64(in.expect("p")));
    KoopmanGLModel model;
    model.dict = Dictionary::parse(in.expect("dictionary"), n);
    if (model.dict.lifted_dim() != p) throw ParseError("dictionary does not produce the recorded lifted dimension");
    model.kernel.alpha = text::parse_double(in.expect("alpha"));
    model.kernel.n_mem = static_cast<std::size_t>(text::parse_u64(in.expect("n_mem")));
    model.kernel.weights.clear();
    const auto weight_line = in.expect("weights");
    for (auto f : detail::fields(weight_line)) model.kernel.weights.push_back(text::parse_double(f));
    if (model.kernel.n_mem > 0 && model.kernel.weights != gl_weights(model.kernel.alpha, model.kernel.n_mem).weights) {
        throw ParseError("stored weights disagree with the GL recursion for the recorded alpha and memory length");
    }
    model.A_bar = in.matrix("A_bar");
    model.B_bar = in.matrix("B_bar");
    if (model.m() != m) throw ParseError("B_bar column count disagrees with m");
    model.fit.residual_norm = text::parse_double(in.expect("fit.residual_norm"));
    model.fit.mu = text::parse_double(in.expect("fit.mu"));
    model.fit.ridge = text::parse_double(in.expect("fit.ridge"));
    model.fit.row_count = static_cast<std::size_t>(text::parse_u64(in.expect("fit.row_count")));
    model.fit.data_hash = text::parse_u64(in.expect("fit.data_hash"), 16);
    model.fit.rank_deficient = in.expect("fit.rank_deficient") == "1";
    model.dataset_hash = text::parse_u64(in.expect("dataset_hash"), 16);
    model.validate();
    return model;
}

inline void save_model(const std::filesystem::path& path, const KoopmanGLModel& model) {
    detail::write_file(path, model_text(model));
}

inline KoopmanGLModel load_model(const std::filesystem::path& path) { return parse_model(detail::read_file(path)); }

}  // namespace kgl
