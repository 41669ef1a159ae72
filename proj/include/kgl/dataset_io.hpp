#pragma once

// Dataset directory: manifest.json plus traj_NNNN.csv per trajectory.
// CSV columns: k,u_1..u_m,x_1..x_n,xclean_1..xclean_n; the last row (k = T) leaves u empty.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgl/errors.hpp"
#include "kgl/hereditary_sim.hpp"
#include "kgl/random.hpp"
#include "kgl/text.hpp"

namespace kgl {

inline constexpr int kDatasetFormatVersion = 1;

namespace detail {

inline std::string trajectory_file_name(std::size_t index) {
    std::string digits = std::to_string(index);
    if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
    return "traj_" + digits + ".csv";
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << contents;
    if (!out) throw ConfigError("failed while writing " + path.string());
}

}  // namespace detail

inline nlohmann::ordered_json config_to_json(const BenchmarkConfig& c) {
    return {{"j_ref", c.j_ref},
            {"prony_a", {c.prony_a[0], c.prony_a[1]}},
            {"prony_rho", {c.prony_rho[0], c.prony_rho[1]}},
            {"noise_std", c.noise_std},
            {"prbs_amplitude", c.prbs_amplitude},
            {"prbs_hold", c.prbs_hold},
            {"seed", c.seed}};
}

inline BenchmarkConfig config_from_json(const nlohmann::ordered_json& j) {
    BenchmarkConfig c;
    c.j_ref = j.at("j_ref").get<std::size_t>();
    c.prony_a = {j.at("prony_a").at(0).get<double>(), j.at("prony_a").at(1).get<double>()};
    c.prony_rho = {j.at("prony_rho").at(0).get<double>(), j.at("prony_rho").at(1).get<double>()};
    c.noise_std = j.at("noise_std").get<double>();
    c.prbs_amplitude = j.at("prbs_amplitude").get<double>();
    c.prbs_hold = j.at("prbs_hold").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
}

/// Manifest text for a generated dataset; trajectories are indexed train, then validation, then test.
inline std::string manifest_text(const Dataset& ds) {
    nlohmann::ordered_json m;
    m["format"] = "kgl-dataset";
    m["version"] = kDatasetFormatVersion;
    m["generator"] = std::string(kGeneratorName);
    m["config"] = config_to_json(ds.config);
    m["n_traj"] = ds.size();
    m["traj_len"] = ds.traj_len;
    m["split_fractions"] = {ds.fractions.train, ds.fractions.validation, ds.fractions.test};
    auto& entries = m["trajectories"] = nlohmann::ordered_json::array();
    std::size_t index = 0;
    for (Split s : {Split::train, Split::validation, Split::test}) {
        for (std::size_t i = 0; i < ds.split(s).size(); ++i, ++index) {
            const auto seeds = trajectory_seeds(ds.config.seed, index);
            entries.push_back({{"index", index},
                               {"file", detail::trajectory_file_name(index)},
                               {"split", split_name(s)},
                               {"seed_initial_condition", seeds.initial_condition},
                               {"seed_input", seeds.input},
                               {"seed_noise", seeds.noise}});
        }
    }
    return m.dump(2) + "\n";
}

inline std::uint64_t dataset_manifest_hash(const Dataset& ds) { return text::hash(manifest_text(ds)); }

inline std::string trajectory_csv(const Trajectory& t) {
    const auto n = t.states.rows();
    const auto m = t.inputs.rows();
    std::string out = "k";
    for (Eigen::Index i = 0; i < m; ++i) out += ",u_" + std::to_string(i + 1);
    for (Eigen::Index i = 0; i < n; ++i) out += ",x_" + std::to_string(i + 1);
    for (Eigen::Index i = 0; i < n; ++i) out += ",xclean_" + std::to_string(i + 1);
    out += '\n';
    const bool has_clean = t.clean_states.size() != 0;
    for (Eigen::Index k = 0; k < t.states.cols(); ++k) {
        out += std::to_string(k);
        for (Eigen::Index i = 0; i < m; ++i) {
            out += ',';
            if (k < t.inputs.cols()) out += text::fmt(t.inputs(i, k));
        }
        for (Eigen::Index i = 0; i < n; ++i) out += ',' + text::fmt(t.states(i, k));
        for (Eigen::Index i = 0; i < n; ++i) out += ',' + (has_clean ? text::fmt(t.clean_states(i, k)) : std::string{});
        out += '\n';
    }
    return out;
}

inline Trajectory parse_trajectory_csv(const std::string& contents, std::size_t n, std::size_t m) {
    std::istringstream in(contents);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty trajectory file");
    const auto header = text::split(line, ',');
    if (header.size() != 1 + m + 2 * n) throw ParseError("trajectory header has " + std::to_string(header.size()) + " columns");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = text::split(line, ',');
        if (fields.size() != header.size()) throw ParseError("ragged trajectory row: " + line);
        if (text::parse_u64(fields[0]) != rows.size()) throw ParseError("trajectory rows out of order");
        std::vector<double> row(header.size() - 1, 0.0);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            const bool input_col = c <= m;
            if (fields[c].empty()) {
                if (!input_col) throw ParseError("missing state value in row " + std::to_string(rows.size()));
                continue;
            }
            row[c - 1] = text::parse_double(fields[c]);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("trajectory has no rows");
    const auto steps = static_cast<Eigen::Index>(rows.size() - 1);
    Trajectory t;
    t.inputs.resize(static_cast<Eigen::Index>(m), steps);
    t.states.resize(static_cast<Eigen::Index>(n), steps + 1);
    t.clean_states.resize(static_cast<Eigen::Index>(n), steps + 1);
    for (Eigen::Index k = 0; k <= steps; ++k) {
        const auto& row = rows[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < m; ++i) {
            if (k < steps) t.inputs(static_cast<Eigen::Index>(i), k) = row[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            t.states(static_cast<Eigen::Index>(i), k) = row[m + i];
            t.clean_states(static_cast<Eigen::Index>(i), k) = row[m + n + i];
        }
    }
    t.validate();
    return t;
}

inline void write_dataset(const std::filesystem::path& dir, const Dataset& ds) {
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "manifest.json", manifest_text(ds));
    std::size_t index = 0;
    for (Split s : {Split::train, Split::validation, Split::test}) {
        for (const auto& t : ds.split(s)) detail::write_file(dir / detail::trajectory_file_name(index++), trajectory_csv(t));
    }
}

inline Dataset read_dataset(const std::filesystem::path& dir) {
    const auto manifest = nlohmann::ordered_json::parse(detail::read_file(dir / "manifest.json"));
    if (manifest.value("format", "") != "kgl-dataset") throw ParseError(dir.string() + " is not a dataset directory");
    if (manifest.at("version").get<int>() != kDatasetFormatVersion) throw ParseError("unsupported dataset format version");
    Dataset ds;
    ds.config = config_from_json(manifest.at("config"));
    ds.traj_len = manifest.at("traj_len").get<std::size_t>();
    const auto& f = manifest.at("split_fractions");
    ds.fractions = {f.at(0).get<double>(), f.at(1).get<double>(), f.at(2).get<double>()};
    for (const auto& entry : manifest.at("trajectories")) {
        auto t = parse_trajectory_csv(detail::read_file(dir / entry.at("file").get<std::string>()), kBenchmarkStateDim,
                                      kBenchmarkInputDim);
        switch (parse_split(entry.at("split").get<std::string>())) {
            case Split::train: ds.train.push_back(std::move(t)); break;
            case Split::validation: ds.validation.push_back(std::move(t)); break;
            case Split::test: ds.test.push_back(std::move(t)); break;
        }
    }
    if (ds.train.empty() || ds.validation.empty() || ds.test.empty()) throw ParseError("dataset has an empty split");
    return ds;
}

}  // namespace kgl
