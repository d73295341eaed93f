// Command-line front end: waveform/filter design runs, RLS refinement,
// CLEAN deconvolution and BGA NLFM synthesis, each writing its resolved
// configuration to manifest.json so runs can be reproduced exactly.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pulsecomp/bga.hpp"
#include "pulsecomp/clean.hpp"
#include "pulsecomp/errors.hpp"
#include "pulsecomp/filter_design.hpp"
#include "pulsecomp/io.hpp"
#include "pulsecomp/rls.hpp"
#include "pulsecomp/waveform.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pulsecomp;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

/// Configuration problem (missing/invalid parameters). Exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommandContext {
    std::string name;
    json params;  // fully resolved
    fs::path out_dir;

    double num(const std::string& key) const {
        if (!params.contains(key)) {
            throw ConfigError("missing parameter: " + key);
        }
        return params.at(key).get<double>();
    }
    Index idx(const std::string& key) const {
        return static_cast<Index>(num(key));
    }
    std::string str(const std::string& key) const {
        if (!params.contains(key)) {
            throw ConfigError("missing parameter: " + key);
        }
        return params.at(key).get<std::string>();
    }

    void write(const std::string& filename, const std::string& content) const {
        io::write_file(out_dir / filename, content);
    }
    void write_manifest() const {
        json manifest;
        manifest["command"] = name;
        manifest["params"] = params;
        write("manifest.json", manifest.dump(2) + "\n");
    }
};

/// Per-command flag registry. Values flow defaults -> --paper-defaults ->
/// --config file -> explicit flags, later sources overriding earlier ones.
struct ParamBuilder {
    CLI::App* cmd;
    json defaults = json::object();
    json paper = json::object();
    std::deque<double> numeric_storage;
    std::deque<std::string> string_storage;
    std::vector<std::pair<std::string, const double*>> numeric_flags;   // flag -> value
    std::vector<std::pair<std::string, const std::string*>> string_flags;
    std::string config_path;
    std::string out_dir = ".";
    bool use_paper = false;

    explicit ParamBuilder(CLI::App* app) : cmd(app) {
        cmd->add_option("--config", config_path,
                        "JSON config or a manifest.json from a previous run");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_flag("--paper-defaults", use_paper,
                      "pin the published design parameters");
    }

    void number(const std::string& flag, const std::string& key,
                const std::string& help) {
        numeric_storage.push_back(0.0);
        numeric_flags.emplace_back(flag, &numeric_storage.back());
        cmd->add_option(flag, numeric_storage.back(), help);
        flag_keys[flag] = key;
    }

    void number_default(const std::string& flag, const std::string& key,
                        const std::string& help, double value) {
        number(flag, key, help);
        defaults[key] = value;
    }

    void text(const std::string& flag, const std::string& key, const std::string& help,
              const std::string& default_value = "") {
        string_storage.emplace_back();
        string_flags.emplace_back(flag, &string_storage.back());
        cmd->add_option(flag, string_storage.back(), help);
        flag_keys[flag] = key;
        if (!default_value.empty()) {
            defaults[key] = default_value;
        }
    }

    CommandContext resolve(const std::string& name) const {
        json params = defaults;
        if (use_paper) {
            for (auto it = paper.begin(); it != paper.end(); ++it) {
                params[it.key()] = it.value();
            }
        }
        if (!config_path.empty()) {
            json file = json::parse(io::read_file(config_path));
            if (file.contains("params")) {
                file = file.at("params");  // manifest form
            }
            for (auto it = file.begin(); it != file.end(); ++it) {
                params[it.key()] = it.value();
            }
        }
        for (const auto& [flag, storage] : numeric_flags) {
            if (cmd->count(flag) > 0) {
                params[flag_keys.at(flag)] = *storage;
            }
        }
        for (const auto& [flag, storage] : string_flags) {
            if (cmd->count(flag) > 0) {
                params[flag_keys.at(flag)] = *storage;
            }
        }

        CommandContext ctx;
        ctx.name = name;
        ctx.params = std::move(params);
        ctx.out_dir = out_dir;
        fs::create_directories(ctx.out_dir);
        return ctx;
    }

private:
    std::map<std::string, std::string> flag_keys;
};

void add_waveform_flags(ParamBuilder& b, bool with_taper) {
    b.number("--bandwidth", "bandwidth", "sweep bandwidth in Hz");
    b.number("--pulse-width", "pulse-width", "pulse width in seconds");
    b.number("--sample-rate", "sample-rate", "complex baseband sample rate in Hz");
    b.number("--filter-length", "filter-length", "mismatched filter length (taps)");
    b.number_default("--mainlobe-width", "mainlobe-width",
                     "compressed mainlobe width in samples (odd)", 3.0);
    if (with_taper) {
        b.number_default("--taper-alpha", "taper-alpha", "Tukey taper fraction", 0.1);
    }
    b.paper["bandwidth"] = 5e6;
    b.paper["pulse-width"] = 20e-6;
    b.paper["sample-rate"] = 12e6;
    b.paper["filter-length"] = 480;
    b.paper["mainlobe-width"] = 3;
    if (with_taper) {
        b.paper["taper-alpha"] = 0.1;
    }
}

Waveform waveform_from(const CommandContext& ctx) {
    return generate_lfm(ctx.num("bandwidth"), ctx.num("pulse-width"),
                        ctx.num("sample-rate"), ctx.num("taper-alpha"));
}

Index filter_length_from(const CommandContext& ctx, const Waveform& w) {
    if (ctx.params.contains("filter-length")) {
        return ctx.idx("filter-length");
    }
    return 2 * w.size();
}

void write_filter_bundle(const CommandContext& ctx, const std::string& stem,
                         const Waveform& w, const FilterWeights& filt,
                         const ConvolutionMatrix& S) {
    const CompressionMetrics m = compute_metrics(w, filt, S);
    ctx.write("filter_" + stem + ".csv", io::filter_csv(filt));
    ctx.write("filter_" + stem + ".json", io::filter_meta_json(filt, &m));
    ctx.write("response_" + stem + ".csv", io::response_csv(S.entries * filt.weights));
    ctx.write("metrics_" + stem + ".json", io::metrics_json(m));
}

int cmd_design_isl(const CommandContext& ctx) {
    const Waveform w = waveform_from(ctx);
    const Index L = filter_length_from(ctx, w);
    const ConvolutionMatrix S = build_convolution_matrix(w, L, ctx.idx("mainlobe-width"));

    ctx.write_manifest();
    ctx.write("waveform.csv", io::waveform_csv(w));
    ctx.write("waveform.json", io::waveform_sidecar_json(w, ctx.num("taper-alpha")));

    const FilterWeights matched = matched_filter(w, L);
    write_filter_bundle(ctx, "matched", w, matched, S);

    const FilterWeights min_isl = solve_min_isl(S, Complex(w.energy(), 0.0));
    write_filter_bundle(ctx, "min_isl", w, min_isl, S);

    std::cout << "design-isl: N=" << w.size() << " L=" << L
              << " isl(matched)=" << isl(matched, S) << " dB"
              << " isl(min_isl)=" << isl(min_isl, S) << " dB\n";
    return 0;
}

int cmd_optimize_rls(const CommandContext& ctx) {
    const Waveform w = waveform_from(ctx);
    const Index L = filter_length_from(ctx, w);
    const ConvolutionMatrix S = build_convolution_matrix(w, L, ctx.idx("mainlobe-width"));

    ctx.write_manifest();
    ctx.write("waveform.csv", io::waveform_csv(w));
    ctx.write("waveform.json", io::waveform_sidecar_json(w, ctx.num("taper-alpha")));

    const FilterWeights w_init = solve_min_isl(S, Complex(w.energy(), 0.0));
    const std::string shape_name = ctx.str("desired-shape");
    DesiredShape shape;
    if (shape_name == "flat") {
        shape = DesiredShape::flat;
    } else if (shape_name == "triangular") {
        shape = DesiredShape::triangular;
    } else {
        throw ConfigError("desired-shape must be 'flat' or 'triangular'");
    }
    const DesiredResponse d = build_desired_response(
        S.n_output(), ctx.idx("mainlobe-width"), Complex(w.energy(), 0.0), shape);

    double delta = ctx.num("regularization");
    if (delta <= 0.0) {  // auto: 100x the mean signal power
        delta = 100.0 * w.energy() / static_cast<double>(w.size());
    }

    IslTrace trace;
    try {
        trace = optimize(S, d, w_init, ctx.idx("iterations"), ctx.num("forgetting"), delta);
    } catch (const DivergenceError& e) {
        if (!e.partial_trace().raw.empty()) {
            ctx.write("trace.csv", export_trace(e.partial_trace()));
        }
        throw;
    }

    ctx.write("trace.csv", export_trace(trace));
    write_filter_bundle(ctx, "rls", w, trace.best_weights, S);

    std::cout << "optimize-rls: best iteration " << trace.best_iteration << " of "
              << trace.raw.size() << ", isl "
              << trace.db[static_cast<std::size_t>(trace.best_iteration)] << " dB\n";
    return 0;
}

int cmd_clean(const CommandContext& ctx) {
    const Waveform w = waveform_from(ctx);
    const Index L = filter_length_from(ctx, w);
    const ConvolutionMatrix S = build_convolution_matrix(w, L, ctx.idx("mainlobe-width"));

    CommandContext resolved = ctx;
    if (!resolved.params.contains("scene")) {
        // Inline the scene into the manifest so a rerun does not depend on
        // the original file still being around.
        const std::string path = resolved.str("scene-file");
        resolved.params["scene"] = json::parse(io::read_file(path));
    }
    const RangeScene scene = io::parse_scene(resolved.params.at("scene").dump(), L);
    // The detector needs a positive noise floor; a noiseless scene gets a
    // unit floor (with y = 0 every statistic is 0 regardless).
    const double sigma2 = scene.noise_power > 0.0 ? scene.noise_power : 1.0;

    double eta;
    if (resolved.params.contains("eta")) {
        eta = resolved.num("eta");
    } else {
        const RVector thresholds = pfa_thresholds(S, sigma2, resolved.num("pfa"));
        eta = thresholds.maxCoeff();
        resolved.params["eta"] = eta;
    }
    resolved.params.erase("scene-file");
    resolved.write_manifest();

    const CVector y = simulate_profile(S, scene);
    resolved.write("profile_raw.csv", io::profile_csv(y));
    resolved.write("statistics.csv", io::detections_csv(detect(S, y, sigma2, eta)));
    const CVector cleaned = clean_pipeline(S, y, sigma2, eta);
    resolved.write("cleaned.csv", io::profile_csv(cleaned));

    std::cout << "clean: " << L << " cells, eta=" << eta << "\n";
    return 0;
}

int cmd_design_nlfm(const CommandContext& ctx) {
    GaConfig cfg;
    cfg.population_size = ctx.idx("population");
    cfg.truncation_fraction = ctx.num("truncation");
    cfg.mutation_rate = ctx.num("mutation-rate");
    cfg.max_generations = ctx.idx("generations");
    cfg.stall_generations = ctx.idx("stall");
    cfg.seed = static_cast<std::uint64_t>(ctx.num("seed"));
    cfg.waveform_params.bandwidth = ctx.num("bandwidth");
    cfg.waveform_params.pulse_width = ctx.num("pulse-width");
    cfg.waveform_params.sample_rate = ctx.num("sample-rate");
    cfg.waveform_params.filter_length =
        ctx.params.contains("filter-length") ? ctx.idx("filter-length") : 0;
    cfg.waveform_params.mainlobe_width = ctx.idx("mainlobe-width");
    validate(cfg);

    ctx.write_manifest();
    const GaHistory history = evolve(cfg);

    ctx.write("history.csv", io::history_csv(history));
    ctx.write("best_genome.json", io::genome_json(history.best.genome,
                                                  history.best.fitness));

    const FrequencyFunction freq = build_nlfm_frequency(
        history.best.genome, nlfm_sample_count(cfg.waveform_params));
    ctx.write("frequency_function.csv", io::frequency_csv(freq));

    const Waveform w = synthesize_nlfm(freq, cfg.waveform_params.sample_rate);
    ctx.write("waveform_nlfm.csv", io::waveform_csv(w));
    ctx.write("waveform_nlfm.json", io::waveform_sidecar_json(w, 0.0));

    const ConvolutionMatrix S = build_convolution_matrix(
        w, nlfm_filter_length(cfg.waveform_params), cfg.waveform_params.mainlobe_width);
    const FilterWeights filt = solve_min_isl(S, Complex(w.energy(), 0.0));
    const CompressionMetrics m = compute_metrics(w, filt, S);
    ctx.write("filter_nlfm.csv", io::filter_csv(filt));
    ctx.write("filter_nlfm.json", io::filter_meta_json(filt, &m));
    ctx.write("acf.csv", io::response_csv(S.entries * filt.weights));
    ctx.write("metrics_nlfm.json", io::metrics_json(m));

    std::cout << "design-nlfm: " << history.generations.size() << " generations, best "
              << history.best.fitness << " dB\n";
    return 0;
}

int cmd_metrics(const CommandContext& ctx) {
    const Waveform w = io::parse_waveform(io::read_file(ctx.str("waveform")),
                                          io::read_file(ctx.str("waveform-meta")));
    const std::string filter_meta = ctx.params.contains("filter-meta")
                                        ? io::read_file(ctx.str("filter-meta"))
                                        : std::string();
    const FilterWeights filt =
        io::parse_filter(io::read_file(ctx.str("filter")), filter_meta);
    const ConvolutionMatrix S =
        build_convolution_matrix(w, filt.size(), ctx.idx("mainlobe-width"));

    ctx.write_manifest();
    const CompressionMetrics m = compute_metrics(w, filt, S);
    ctx.write("metrics.json", io::metrics_json(m));
    std::cout << io::metrics_json(m);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pulse-compression waveform and mismatched-filter design toolkit"};
    app.require_subcommand(1);

    auto* isl_cmd = app.add_subcommand(
        "design-isl", "closed-form minimum-ISL mismatched filter for an LFM pulse");
    ParamBuilder isl_params(isl_cmd);
    add_waveform_flags(isl_params, true);

    auto* rls_cmd = app.add_subcommand(
        "optimize-rls", "refine the minimum-ISL filter by recursive least squares");
    ParamBuilder rls_params(rls_cmd);
    add_waveform_flags(rls_params, true);
    rls_params.number_default("--iterations", "iterations", "RLS iterations", 10000.0);
    rls_params.number_default("--forgetting", "forgetting", "RLS forgetting factor",
                              0.998);
    rls_params.number_default("--regularization", "regularization",
                              "initial P scale (<=0 picks 100x mean signal power)", 0.0);
    rls_params.text("--desired-shape", "desired-shape",
                    "desired mainlobe shape: flat or triangular", "triangular");
    rls_params.paper["iterations"] = 10000;

    auto* clean_cmd = app.add_subcommand(
        "clean", "simulate a range profile and deconvolve strong-scatterer sidelobes");
    ParamBuilder clean_params(clean_cmd);
    add_waveform_flags(clean_params, true);
    clean_params.text("--scene", "scene-file", "range scene JSON");
    clean_params.number("--eta", "eta", "detection threshold (amplitude)");
    clean_params.number_default("--pfa", "pfa",
                                "false-alarm probability used when --eta is omitted",
                                1e-3);

    auto* nlfm_cmd = app.add_subcommand(
        "design-nlfm", "breeder-GA search over Bezier NLFM frequency functions");
    ParamBuilder nlfm_params(nlfm_cmd);
    add_waveform_flags(nlfm_params, false);
    nlfm_params.number_default("--population", "population", "population size", 200.0);
    nlfm_params.number_default("--truncation", "truncation",
                               "parent fraction kept by truncation selection", 0.40);
    nlfm_params.number_default("--mutation-rate", "mutation-rate",
                               "per-gene mutation probability", 0.001);
    nlfm_params.number_default("--generations", "generations", "generation cap", 100.0);
    nlfm_params.number_default("--stall", "stall",
                               "generations without improvement before stopping", 20.0);
    nlfm_params.number_default("--seed", "seed", "RNG seed", 0.0);
    nlfm_params.paper["population"] = 200;
    nlfm_params.paper["truncation"] = 0.40;
    nlfm_params.paper["mutation-rate"] = 0.001;

    auto* metrics_cmd = app.add_subcommand(
        "metrics", "ISL/PSL/SNR-loss report for a waveform + filter pair");
    ParamBuilder metrics_params(metrics_cmd);
    metrics_params.text("--waveform", "waveform", "waveform CSV");
    metrics_params.text("--waveform-meta", "waveform-meta", "waveform JSON sidecar");
    metrics_params.text("--filter", "filter", "filter coefficient CSV");
    metrics_params.text("--filter-meta", "filter-meta", "filter metadata JSON");
    metrics_params.number_default("--mainlobe-width", "mainlobe-width",
                                  "compressed mainlobe width in samples (odd)", 3.0);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (isl_cmd->parsed()) return cmd_design_isl(isl_params.resolve("design-isl"));
        if (rls_cmd->parsed()) return cmd_optimize_rls(rls_params.resolve("optimize-rls"));
        if (clean_cmd->parsed()) return cmd_clean(clean_params.resolve("clean"));
        if (nlfm_cmd->parsed()) return cmd_design_nlfm(nlfm_params.resolve("design-nlfm"));
        if (metrics_cmd->parsed()) return cmd_metrics(metrics_params.resolve("metrics"));
    } catch (const io::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DivergenceError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const SingularSystemError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
