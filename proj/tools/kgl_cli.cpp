// kgl: dataset generation, identification, evaluation, grid search, baselines and bound reports
// for Koopman models with Grunwald-Letnikov memory.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgl/kgl.hpp"

namespace fs = std::filesystem;
using namespace kgl;

namespace {

/// Failure inside a named pipeline stage.
struct StageError : Error {
    StageError(const std::string& stage, const std::string& what) : Error(stage + ": " + what) {}
};

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

struct BenchmarkFlags {
    std::size_t n_traj = 60;
    std::size_t traj_len = 600;
    std::vector<double> split{0.6, 0.2, 0.2};
    BenchmarkConfig config;
    std::vector<double> prony_a{config.prony_a.begin(), config.prony_a.end()};
    std::vector<double> prony_rho{config.prony_rho.begin(), config.prony_rho.end()};

    void add(CLI::App* cmd) {
        cmd->add_option("--n-traj", n_traj, "number of trajectories")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--traj-len", traj_len, "steps per trajectory")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--split", split, "train/validation/test fractions")->expected(3)->capture_default_str();
        cmd->add_option("--noise-std", config.noise_std, "measurement noise standard deviation")->capture_default_str();
        cmd->add_option("--seed", config.seed, "master seed")->capture_default_str();
        cmd->add_option("--j-ref", config.j_ref, "Prony kernel length")->capture_default_str();
        cmd->add_option("--prony-a", prony_a, "Prony weights a1 a2")->expected(2)->capture_default_str();
        cmd->add_option("--prony-rho", prony_rho, "Prony decay rates rho1 rho2")->expected(2)->capture_default_str();
        cmd->add_option("--prbs-amplitude", config.prbs_amplitude, "PRBS level")->capture_default_str();
        cmd->add_option("--prbs-hold", config.prbs_hold, "PRBS hold in samples")->capture_default_str();
    }

    [[nodiscard]] BenchmarkConfig resolved() const {
        BenchmarkConfig c = config;
        c.prony_a = {prony_a.at(0), prony_a.at(1)};
        c.prony_rho = {prony_rho.at(0), prony_rho.at(1)};
        c.validate();
        return c;
    }
    [[nodiscard]] SplitFractions fractions() const { return {split.at(0), split.at(1), split.at(2)}; }
};

struct ModelFlags {
    std::string dict = "default";
    double alpha = 0.2;
    std::size_t n_mem = 100;
    double ridge = 0.0;

    void add(CLI::App* cmd, bool with_memory = true) {
        cmd->add_option("--dict", dict, "dictionary: preset (default, affine) or features like 'sin(x2);prod(x1,x2)'")
            ->capture_default_str();
        if (with_memory) {
            cmd->add_option("--alpha", alpha, "fractional order in (0,1)")->capture_default_str();
            cmd->add_option("--n-mem", n_mem, "memory length N (0 gives a Markov model)")->capture_default_str();
        }
        cmd->add_option("--ridge", ridge, "ridge regularization")->capture_default_str()->check(CLI::NonNegativeNumber);
    }
};

struct Options {
    std::size_t threads = default_thread_count();

    struct {
        std::string out = "dataset";
        BenchmarkFlags bench;
    } generate;

    struct {
        std::string dataset;
        std::string out = "model.kgl";
        std::string baseline = "koopman-gl";
        ModelFlags model;
    } identify;

    struct {
        std::string model;
        std::string dataset;
        std::string split = "test";
        std::size_t horizon = kDefaultHorizon;
        std::size_t start = 0;  // 0: first full history
        std::string out = "evaluation";
    } evaluate;

    struct {
        std::string dataset;
        std::string out = "grid";
        std::vector<std::size_t> n_grid{10, 25, 50, 100};
        std::vector<double> alpha_grid{0.1, 0.2, 0.3, 0.5, 0.8};
        std::size_t horizon = kDefaultHorizon;
        ModelFlags model;
    } grid;

    struct {
        std::string dataset;
        std::string out = "compare";
        std::size_t horizon = kDefaultHorizon;
        double xi_bar = 0.0;
        ModelFlags model;
    } compare;

    struct {
        std::string dataset;
        std::string out = "bounds.toml";
        std::string kernel = "prony";
        double alpha = 0.2;
        std::size_t n_mem = 100;
        double xi_bar = 0.0;
        double m_z = -1.0;  // negative: measure from the dataset
        std::size_t j_max = kDefaultTailHorizon;
        std::string dict = "default";
        BenchmarkFlags bench;
    } bounds;

    struct {
        std::string out = "bundle";
        BenchmarkFlags bench;
        std::vector<std::size_t> n_grid{10, 25, 50, 100};
        std::vector<double> alpha_grid{0.1, 0.2, 0.3, 0.5, 0.8};
        std::size_t horizon = kDefaultHorizon;
        double xi_bar = 0.0;
        ModelFlags model;
    } reproduce;

    struct {
        std::string model;
        std::string out = "augmented";
    } exporter;
};

/// The resolved configuration as TOML, restricted to `cmd`'s own keys.
/// Feeding it back through `--config` before the subcommand name reruns the same command.
std::string config_echo(const CLI::App& app, const CLI::App* cmd) {
    const std::string all = app.config_to_str(true, false);
    const std::string prefix = cmd->get_name() + ".";
    std::istringstream in(all);
    std::string out;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind(prefix, 0) != 0) continue;
        // Defaults of list options come back as quoted strings; write them as TOML arrays.
        const auto eq = line.find('=');
        std::string value = line.substr(eq + 1);
        if (value.size() >= 4 && value.front() == '"' && value[1] == '[' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
            std::string spaced;
            for (char ch : value) {
                spaced += ch;
                if (ch == ',') spaced += ' ';
            }
            value = spaced;
        }
        out += line.substr(0, eq + 1) + value + '\n';
    }
    return out;
}

void write_echo(const fs::path& path, const CLI::App& app, const CLI::App* cmd) {
    std::string text = "# kgl " + std::string(kVersion) + " resolved configuration; rerun with\n";
    text += "#   kgl --config " + path.filename().string() + " " + cmd->get_name() + "\n";
    detail::write_file(path, text + config_echo(app, cmd));
}

Dictionary dictionary_for(const std::string& spec) { return Dictionary::parse(spec, kBenchmarkStateDim); }

Dataset load(const std::string& dir) {
    if (dir.empty()) throw ConfigError("--dataset is required");
    return stage("load dataset", [&] { return read_dataset(dir); });
}

void print_fit(const KoopmanGLModel& model) {
    const auto& f = model.fit;
    std::printf("rows (K)          %zu\n", f.row_count);
    std::printf("lifted dim (p)    %zu\n", model.p());
    std::printf("memory (N)        %zu\n", model.n_mem());
    std::printf("alpha             %s\n", model.kernel.is_markov() ? "-" : text::fmt(model.kernel.alpha).c_str());
    std::printf("residual ||D||_F  %s\n", text::fmt(f.residual_norm).c_str());
    std::printf("mu                %s\n", text::fmt(f.mu).c_str());
    std::printf("error bound       %s\n", text::fmt(f.identification_bound()).c_str());
    if (f.ridge > 0.0) std::printf("ridge             %s\n", text::fmt(f.ridge).c_str());
}

int run_generate(const Options& o, const CLI::App& app, const CLI::App* cmd) {
    const auto& g = o.generate;
    const auto ds = stage("generate", [&] {
        return generate_dataset(g.bench.resolved(), g.bench.n_traj, g.bench.traj_len, g.bench.fractions(), o.threads);
    });
    stage("write dataset", [&] {
        write_dataset(g.out, ds);
        write_echo(fs::path(g.out) / "resolved_config.toml", app, cmd);
    });
    std::printf("train %zu, validation %zu, test %zu trajectories written to %s\n", ds.train.size(),
                ds.validation.size(), ds.test.size(), g.out.c_str());
    return 0;
}

int run_identify(const Options& o, const CLI::App& app, const CLI::App* cmd) {
    const auto& c = o.identify;
    const auto ds = load(c.dataset);
    const Method method = parse_method(c.baseline);
    const auto dict = dictionary_for(c.model.dict);
    KoopmanGLModel model;
    try {
        model = identify_method(ds, method, dict, c.model.alpha, c.model.n_mem, c.model.ridge, o.threads);
    } catch (const RankDeficiencyError& e) {
        std::fprintf(stderr, "error: identify: %s\n", e.what());
        std::fprintf(stderr, "hint: rerun with --ridge 1e-8, a smaller dictionary, or more data\n");
        return 2;
    }
    model.dataset_hash = dataset_manifest_hash(ds);
    stage("write model", [&] {
        save_model(c.out, model);
        write_echo(c.out + ".config.toml", app, cmd);
    });
    std::printf("%s model written to %s\n", method_label(method), c.out.c_str());
    print_fit(model);
    return 0;
}

int run_evaluate(const Options& o, const CLI::App& app, const CLI::App* cmd) {
    const auto& c = o.evaluate;
    if (c.model.empty()) throw ConfigError("--model is required");
    const auto model = stage("load model", [&] { return load_model(c.model); });
    const auto ds = load(c.dataset);
    const auto& trajs = ds.split(parse_split(c.split));
    const std::size_t start = c.start == 0 ? model.history_length() : c.start;
    const auto ev = stage("evaluate", [&] { return evaluate(model, trajs, start, c.horizon, o.threads); });
    stage("write reports", [&] {
        fs::create_directories(c.out);
        detail::write_file(fs::path(c.out) / "per_trajectory.csv", reports::evaluation_per_trajectory_csv(ev));
        detail::write_file(fs::path(c.out) / "per_step.csv", reports::evaluation_per_step_csv(ev));
        write_echo(fs::path(c.out) / "resolved_config.toml", app, cmd);
    });
    std::printf("%s split, %zu trajectories, window [%zu, %zu)\n", c.split.c_str(), trajs.size(), start, start + c.horizon);
    std::printf("one-step NRMSE  %.6f\n", ev.mean_onestep());
    std::printf("rollout NRMSE   %.6f\n", ev.mean_rollout());
    if (ev.diverged) std::printf("diverged        %zu\n", ev.diverged);
    return 0;
}

void print_grid(const GridResult& grid) {
    std::printf("%6s %8s %14s %14s\n", "N", "alpha", "rollout", "one-step");
    for (const auto& c : grid.cells) {
        if (!c.feasible) {
            std::printf("%6zu %8.3f %14s %14s\n", c.n_mem, c.alpha, "infeasible", "-");
        } else if (c.diverged) {
            std::printf("%6zu %8.3f %14s %14.6f\n", c.n_mem, c.alpha, "diverged", c.onestep_nrmse);
        } else {
            std::printf("%6zu %8.3f %14.6f %14.6f\n", c.n_mem, c.alpha, c.rollout_nrmse, c.onestep_nrmse);
        }
    }
    std::printf("best: N = %zu, alpha = %s\n", grid.best_n_mem, text::fmt(grid.best_alpha).c_str());
}

int run_grid(const Options& o, const CLI::App& app, const CLI::App* cmd) {
    const auto& c = o.grid;
    const auto ds = load(c.dataset);
    const auto dict = dictionary_for(c.model.dict);
    const auto grid = stage("grid", [&] {
        return grid_search(ds, dict, c.n_grid, c.alpha_grid, c.model.ridge, c.horizon, o.threads);
    });
    stage("write reports", [&] {
        fs::create_directories(c.out);
        detail::write_file(fs::path(c.out) / "heatmap.csv", reports::heatmap_csv(grid));
        write_echo(fs::path(c.out) / "resolved_config.toml", app, cmd);
    });
    print_grid(grid);
    return 0;
}

double bound_overlay(const Dataset& ds, const Dictionary& dict, double alpha, std::size_t n_mem, double xi_bar) {
    const auto c_star = reference_kernel_from_prony(ds.config);
    return bound_report(alpha, n_mem, c_star, ds.train, dict, xi_bar).d_bound;
}

int run_compare(const Options& o, const CLI::App& app, const CLI::App* cmd) {
    const auto& c = o.compare;
    const auto ds = load(c.dataset);
    const auto dict = dictionary_for(c.model.dict);
    const auto cmp = stage("compare", [&] {
        return compare_baselines(ds, dict, c.model.n_mem, c.model.alpha, c.model.ridge, c.horizon, o.threads);
    });
    const double overlay = stage("bounds", [&] { return bound_overlay(ds, dict, c.model.alpha, c.model.n_mem, c.xi_bar); });
    stage("write reports", [&] {
        const fs::path dir(c.out);
        fs::create_directories(dir);
        detail::write_file(dir / "summary.csv", reports::summary_csv(cmp));
        detail::write_file(dir / "summary.txt", reports::summary_table(cmp));
        detail::write_file(dir / "per_trajectory.csv", reports::per_trajectory_csv(cmp));
        detail::write_file(dir / "per_step.csv", reports::per_step_csv(cmp, overlay));
        write_echo(dir / "resolved_config.toml", app, cmd);
    });
    std::fputs(reports::summary_table(cmp).c_str(), stdout);
    return 0;
}

int run_bounds(const Options& o, const CLI::App& app, const CLI::App* cmd) {
    const auto& c = o.bounds;
    const auto dict = dictionary_for(c.dict);
    std::vector<double> c_star;
    BenchmarkConfig bench = c.bench.resolved();
    Dataset ds;
    if (!c.dataset.empty()) {
        ds = load(c.dataset);
        bench = ds.config;
    }
    if (c.kernel == "prony") {
        c_star = reference_kernel_from_prony(bench);
    } else if (c.kernel == "gl") {
        c_star = gl_reference_kernel(c.alpha, c.j_max);
    } else {
        throw ConfigError("--kernel must be prony or gl, got '" + c.kernel + "'");
    }

    reports::BoundsSummary summary;
    if (c.m_z >= 0.0) {
        summary.kernel_name = c.kernel;
        summary.mismatch = kernel_mismatch(c.alpha, c.n_mem, c_star);
        summary.mismatch.m_z = c.m_z;
        summary.mismatch.xi_bar = c.xi_bar;
        summary.mismatch.d_bound = disturbance_bound(summary.mismatch.epsilon, c.m_z, c.xi_bar);
        summary.c_alpha = fit_decay_constant(c.alpha, 100'000);
        summary.gl_tail_mass = tail_mass(c.alpha, c.n_mem, c.j_max);
        summary.gl_truncation_bound = gl_truncation_bound(c.alpha, c.n_mem, c.m_z, summary.c_alpha);
    } else {
        if (c.dataset.empty()) throw ConfigError("either --dataset (to measure M_z) or --m-z is required");
        summary = stage("bounds", [&] {
            return reports::summarize_bounds(c.alpha, c.n_mem, c_star, c.kernel, ds.train, dict, c.xi_bar, c.j_max);
        });
    }
    const std::string body = reports::bounds_text(summary);
    stage("write bounds", [&] {
        detail::write_file(c.out, body);
        write_echo(c.out + ".config.toml", app, cmd);
    });
    std::fputs(body.c_str(), stdout);
    return 0;
}

std::string toml_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + '"';
}

int run_reproduce(const Options& o, const CLI::App& app, const CLI::App* cmd) {
    const auto& c = o.reproduce;
    const auto t0 = std::chrono::steady_clock::now();
    const auto bench = stage("generate", [&] { return c.bench.resolved(); });
    const auto ds = stage("generate", [&] {
        return generate_dataset(bench, c.bench.n_traj, c.bench.traj_len, c.bench.fractions(), o.threads);
    });
    const auto dict = stage("dictionary", [&] { return dictionary_for(c.model.dict); });
    const auto grid = stage("grid", [&] {
        return grid_search(ds, dict, c.n_grid, c.alpha_grid, c.model.ridge, c.horizon, o.threads);
    });
    const std::size_t n_mem = grid.best_n_mem;
    const double alpha = grid.best_alpha;
    const auto cmp = stage("compare", [&] {
        return compare_baselines(ds, dict, n_mem, alpha, c.model.ridge, c.horizon, o.threads);
    });
    const auto bounds = stage("bounds", [&] {
        const auto c_star = reference_kernel_from_prony(bench);
        return reports::summarize_bounds(alpha, n_mem, c_star, "prony", ds.train, dict, c.xi_bar);
    });

    std::string manifest = "# kgl " + std::string(kVersion) + " reproduction bundle; rerun with\n";
    manifest += "#   kgl --config manifest.toml reproduce\n";
    // The bundle location is not part of the result.
    std::istringstream echo(config_echo(app, cmd));
    for (std::string line; std::getline(echo, line);) {
        if (line.rfind("reproduce.out=", 0) != 0) manifest += line + '\n';
    }
    manifest += "\n[provenance]\n";
    manifest += "version = " + toml_string(kVersion) + '\n';
    manifest += "generator = " + toml_string(std::string(kGeneratorName)) + '\n';
    manifest += "seed = " + std::to_string(bench.seed) + '\n';
    manifest += "substream_tags = [\"initial-condition\", \"prbs\", \"noise\"]\n";
    manifest += "dataset_hash = " + toml_string(text::hex(dataset_manifest_hash(ds))) + '\n';
    manifest += "dictionary = " + toml_string(dict.descriptor()) + '\n';
    manifest += "lifted_dim = " + std::to_string(dict.lifted_dim()) + '\n';
    manifest += "split_sizes = [" + std::to_string(ds.train.size()) + ", " + std::to_string(ds.validation.size()) + ", " +
                std::to_string(ds.test.size()) + "]\n";
    manifest += "grid_eval_start = " + std::to_string(grid.settings.eval_start) + '\n';
    manifest += "selected_n_mem = " + std::to_string(n_mem) + '\n';
    manifest += "selected_alpha = " + text::fmt(alpha) + '\n';
    manifest += "compare_eval_start = " + std::to_string(cmp.eval_start) + '\n';
    manifest += "horizon = " + std::to_string(cmp.horizon) + '\n';
    for (const auto& r : cmp.rows) {
        if (r.spectral_radius) {
            std::string key = method_name(r.method);
            for (char& ch : key) {
                if (ch == '-') ch = '_';
            }
            manifest += "spectral_radius_" + key + " = " + text::fmt(r.spectral_radius->value) + '\n';
        }
    }
    manifest += "\n[provenance.bounds]\n" + reports::bounds_text(bounds);

    stage("write bundle", [&] {
        const fs::path dir(c.out);
        fs::create_directories(dir);
        detail::write_file(dir / "heatmap.csv", reports::heatmap_csv(grid));
        detail::write_file(dir / "per_trajectory.csv", reports::per_trajectory_csv(cmp));
        detail::write_file(dir / "per_step.csv", reports::per_step_csv(cmp, bounds.mismatch.d_bound));
        detail::write_file(dir / "summary.csv", reports::summary_csv(cmp));
        detail::write_file(dir / "manifest.toml", manifest);
    });

    print_grid(grid);
    std::printf("\n");
    std::fputs(reports::summary_table(cmp).c_str(), stdout);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("\nbundle written to %s (%.1f s)\n", c.out.c_str(), secs);
    return 0;
}

int run_export(const Options& o, const CLI::App& app, const CLI::App* cmd) {
    const auto& c = o.exporter;
    if (c.model.empty()) throw ConfigError("--model is required");
    const auto model = stage("load model", [&] { return load_model(c.model); });
    const auto real = stage("augment", [&] { return build_augmented(model); });
    stage("write matrices", [&] {
        const fs::path dir(c.out);
        fs::create_directories(dir);
        detail::write_file(dir / "A_aug.csv", reports::matrix_csv(real.dense_A()));
        detail::write_file(dir / "B_aug.csv", reports::matrix_csv(real.dense_B()));
        write_echo(dir / "resolved_config.toml", app, cmd);
    });
    std::printf("A_aug %td x %td, B_aug %td x %zu written to %s\n", real.dim(), real.dim(), real.dim(), real.m,
                c.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Koopman models with Grunwald-Letnikov memory"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "read options from a TOML file (place before the subcommand)");
    app.require_subcommand(1);

    Options o;
    app.add_option("--threads", o.threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

    using Runner = std::function<int(const Options&, const CLI::App&, const CLI::App*)>;
    std::vector<std::pair<CLI::App*, Runner>> commands;

    auto* gen = app.add_subcommand("generate", "simulate the benchmark and write a dataset directory");
    gen->add_option("--out", o.generate.out, "output directory")->capture_default_str();
    o.generate.bench.add(gen);
    commands.emplace_back(gen, run_generate);

    auto* idf = app.add_subcommand("identify", "fit a model on the training split");
    idf->add_option("--dataset", o.identify.dataset, "dataset directory")->required();
    idf->add_option("--out", o.identify.out, "model file")->capture_default_str();
    idf->add_option("--baseline", o.identify.baseline, "koopman-gl, koopman-markov, state-gl or state-markov")
        ->capture_default_str();
    o.identify.model.add(idf);
    commands.emplace_back(idf, run_identify);

    auto* ev = app.add_subcommand("evaluate", "score a model by one-step and rollout NRMSE");
    ev->add_option("--model", o.evaluate.model, "model file")->required();
    ev->add_option("--dataset", o.evaluate.dataset, "dataset directory")->required();
    ev->add_option("--split", o.evaluate.split, "train, validation or test")->capture_default_str();
    ev->add_option("--horizon", o.evaluate.horizon, "rollout horizon")->capture_default_str();
    ev->add_option("--start", o.evaluate.start, "first predicted state (0: first full history)")->capture_default_str();
    ev->add_option("--out", o.evaluate.out, "report directory")->capture_default_str();
    commands.emplace_back(ev, run_evaluate);

    auto* gr = app.add_subcommand("grid", "search (N, alpha) on validation rollouts");
    gr->add_option("--dataset", o.grid.dataset, "dataset directory")->required();
    gr->add_option("--out", o.grid.out, "report directory")->capture_default_str();
    gr->add_option("--n-grid", o.grid.n_grid, "memory lengths")->capture_default_str();
    gr->add_option("--alpha-grid", o.grid.alpha_grid, "fractional orders")->capture_default_str();
    gr->add_option("--horizon", o.grid.horizon, "rollout horizon")->capture_default_str();
    o.grid.model.add(gr, false);
    commands.emplace_back(gr, run_grid);

    auto* cp = app.add_subcommand("compare", "compare the four model families on the test split");
    cp->add_option("--dataset", o.compare.dataset, "dataset directory")->required();
    cp->add_option("--out", o.compare.out, "report directory")->capture_default_str();
    cp->add_option("--horizon", o.compare.horizon, "rollout horizon")->capture_default_str();
    cp->add_option("--xi-bar", o.compare.xi_bar, "residual bound for the overlay")->capture_default_str();
    o.compare.model.add(cp);
    commands.emplace_back(cp, run_compare);

    auto* bd = app.add_subcommand("bounds", "kernel mismatch and disturbance bound report");
    bd->add_option("--dataset", o.bounds.dataset, "dataset directory (Prony parameters and M_z)");
    bd->add_option("--out", o.bounds.out, "output TOML file")->capture_default_str();
    bd->add_option("--kernel", o.bounds.kernel, "reference kernel: prony or gl")->capture_default_str();
    bd->add_option("--alpha", o.bounds.alpha, "fractional order")->capture_default_str();
    bd->add_option("--n-mem", o.bounds.n_mem, "memory length")->capture_default_str()->check(CLI::PositiveNumber);
    bd->add_option("--xi-bar", o.bounds.xi_bar, "residual bound")->capture_default_str();
    bd->add_option("--m-z", o.bounds.m_z, "lifted-state bound (negative: measure from the dataset)")
        ->capture_default_str();
    bd->add_option("--j-max", o.bounds.j_max, "tail summation horizon")->capture_default_str();
    bd->add_option("--dict", o.bounds.dict, "dictionary used for M_z")->capture_default_str();
    o.bounds.bench.add(bd);
    commands.emplace_back(bd, run_bounds);

    auto* rp = app.add_subcommand("reproduce", "generate, grid, compare and bounds in one run");
    rp->add_option("--out", o.reproduce.out, "bundle directory")->capture_default_str();
    rp->add_option("--n-grid", o.reproduce.n_grid, "memory lengths")->capture_default_str();
    rp->add_option("--alpha-grid", o.reproduce.alpha_grid, "fractional orders")->capture_default_str();
    rp->add_option("--horizon", o.reproduce.horizon, "rollout horizon")->capture_default_str();
    rp->add_option("--xi-bar", o.reproduce.xi_bar, "residual bound for the overlay")->capture_default_str();
    o.reproduce.bench.add(rp);
    o.reproduce.model.add(rp, false);
    commands.emplace_back(rp, run_reproduce);

    auto* ex = app.add_subcommand("export-augmented", "write the augmented (A_aug, B_aug) matrices");
    ex->add_option("--model", o.exporter.model, "model file")->required();
    ex->add_option("--out", o.exporter.out, "output directory")->capture_default_str();
    commands.emplace_back(ex, run_export);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    for (auto& [sub, run] : commands) {
        if (!sub->parsed()) continue;
        try {
            return run(o, app, sub);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s: %s\n", sub->get_name().c_str(), e.what());
            return 1;
        }
    }
    return 1;
}
