#include "cli.hpp"

#include "kitoke/cost_model.hpp"
#include "kitoke/error.hpp"
#include "kitoke/pipeline.hpp"
#include "kitoke/report_json.hpp"
#include "kitoke/segmenter.hpp"
#include "kitoke/tensor_io.hpp"
#include "kitoke/testkit/scenes.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace kitoke::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CompressArgs {
    std::string input;
    std::string out;
    std::string report;
    std::string layout;
    std::string dump_trace;
    bool dump_diversity = false;
    std::string mode{to_string(RetentionConfig{}.selection_mode)};
    std::string merge{to_string(RetentionConfig{}.merge_mode)};
    RetentionConfig cfg;
};

struct CalibrateArgs {
    std::string inputs;
    std::string out;
    double percentile = 80.0;
    double margin = 1.0;
};

struct CostArgs {
    std::uint64_t tokens = 0;
    std::string preset = "qwen2-7b";
    std::string preset_dir;
};

struct GenArgs {
    testkit::PlantedParams params;
    std::string out;
    std::size_t layout_rows = 0;
};

struct TraceArgs {
    std::string input;
    std::string out;
    RetentionConfig cfg;
};

void write_json(const fs::path& path, const json& doc) {
    std::ofstream f(path);
    if (!f) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
    f << doc.dump(2) << '\n';
    if (!f) fail(ErrorKind::io, "failed writing " + path.string());
}

void add_threshold_flags(CLI::App& cmd, RetentionConfig& cfg) {
    cmd.add_option("--tau-diff", cfg.tau_diff, "Frame difference threshold")->capture_default_str();
    cmd.add_option("--tau-dev", cfg.tau_dev, "Absolute deviation threshold")->capture_default_str();
    cmd.add_option("--tau-rel", cfg.tau_rel, "Relative deviation threshold")->capture_default_str();
}

std::optional<LayoutSpec> parse_layout(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) fail(ErrorKind::invalid_argument, "--layout expects HxW, got '" + text + "'");
    try {
        LayoutSpec layout;
        layout.rows_per_frame = std::stoul(text.substr(0, x));
        layout.cols_per_row = std::stoul(text.substr(x + 1));
        return layout;
    } catch (const std::exception&) {
        fail(ErrorKind::invalid_argument, "--layout expects HxW, got '" + text + "'");
    }
}

void do_compress(const CompressArgs& a, std::ostream& out) {
    RetentionConfig cfg = a.cfg;
    cfg.selection_mode = parse_selection_mode(a.mode);
    cfg.merge_mode = parse_merge_mode(a.merge);
    cfg.validate();
    std::optional<LayoutSpec> layout;
    if (!a.layout.empty()) layout = parse_layout(a.layout);

    const auto tensor = load_tensor(a.input);
    if (!layout) layout = load_meta(a.input).layout;

    const auto art = compress_detailed(tensor, cfg, layout);
    save_tensor(art.result.as_tensor(), a.out);
    const fs::path report = a.report.empty() ? sibling_path(a.out, "report.json") : fs::path(a.report);
    auto doc = to_json(art.result);
    doc["input"] = a.input;
    write_json(report, doc);
    if (a.dump_diversity) save_diversity(art.profile, sibling_path(a.input, "diversity.ktk1"));
    if (!a.dump_trace.empty()) {
        std::ofstream csv(a.dump_trace);
        if (!csv) fail(ErrorKind::io, "cannot open " + a.dump_trace + " for writing");
        write_trace_csv(csv, art.trace, cfg);
    }
    out << report.string() << '\n';
}

void do_calibrate(const CalibrateArgs& a, std::ostream& out) {
    if (!fs::is_directory(a.inputs)) fail(ErrorKind::io, a.inputs + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.inputs))
        if (entry.is_regular_file() && entry.path().extension() == ".ktk1" &&
            entry.path().string().find(".diversity.") == std::string::npos)
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(ErrorKind::io, "no .ktk1 tensors in " + a.inputs);

    std::vector<DiffTrace> traces;
    for (const auto& f : files) {
        const auto tensor = load_tensor(f);
        if (tensor.frames() >= 2) traces.push_back(compute_trace(tensor));
    }
    const auto s = suggest_thresholds(traces, a.percentile, a.margin);
    auto doc = to_json(s);
    doc["percentile"] = a.percentile;
    doc["margin"] = a.margin;
    if (a.out.empty()) {
        out << doc.dump(2) << '\n';
    } else {
        write_json(a.out, doc);
        out << a.out << '\n';
    }
}

void do_cost(const CostArgs& a, std::ostream& out) {
    const auto preset = a.preset_dir.empty() ? load_preset(a.preset) : load_preset(a.preset, a.preset_dir);
    const double total = flops(a.tokens, preset.spec);
    json doc = {{"preset", preset.name},
                {"tokens", a.tokens},
                {"per_layer", flops_per_layer(a.tokens, preset.spec)},
                {"total", total},
                {"tflops", total / 1e12}};
    if (const auto exact = flops_exact(a.tokens, preset.spec)) doc["total_exact"] = *exact;
    out << doc.dump(2) << '\n';
}

void do_gen(const GenArgs& a, std::ostream& out) {
    const auto script = testkit::planted_script(a.params);
    const auto video = testkit::generate_scenes(script);
    save_tensor(video.tensor, a.out);
    json truth = {{"frames", video.tensor.frames()},
                  {"tokens_per_frame", video.tensor.tokens_per_frame()},
                  {"dims", video.tensor.dims()},
                  {"boundaries", video.boundaries},
                  {"scenes", a.params.scenes},
                  {"frames_per_scene", a.params.frames_per_scene},
                  {"noise_sigma", a.params.noise_sigma},
                  {"separation", a.params.separation},
                  {"drift", a.params.drift},
                  {"seed", a.params.seed}};
    write_json(sibling_path(a.out, "truth.json"), truth);
    if (a.layout_rows > 0) {
        if (a.params.tokens_per_frame % a.layout_rows != 0)
            fail(ErrorKind::invalid_argument, "--layout-rows must divide --tokens");
        TensorMeta meta;
        meta.layout = LayoutSpec{a.layout_rows, a.params.tokens_per_frame / a.layout_rows, true};
        meta.provenance["generator"] = "kitoke gen";
        save_meta(meta, a.out);
    }
    out << a.out << '\n';
}

void do_trace(const TraceArgs& a, std::ostream& out) {
    a.cfg.validate();
    const auto tensor = load_tensor(a.input);
    std::ofstream csv(a.out);
    if (!csv) fail(ErrorKind::io, "cannot open " + a.out + " for writing");
    write_trace_csv(csv, compute_trace(tensor), a.cfg);
    if (!csv) fail(ErrorKind::io, "failed writing " + a.out);
    out << a.out << '\n';
}

int report_error(std::ostream& err, int code, std::string_view kind, const std::string& message,
                 const std::string& stage = {}) {
    json doc = {{"error", message}, {"kind", kind}, {"exit_code", code}};
    if (!stage.empty()) doc["stage"] = stage;
    err << doc.dump() << '\n';
    return code;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument: return exit_usage;
    case ErrorKind::io:
    case ErrorKind::format: return exit_io;
    case ErrorKind::numeric: return exit_math;
    }
    return exit_math;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Video token compression by kernel diversity and interval-aware merging", "kitoke"};
    app.require_subcommand(1);

    CompressArgs compress_args;
    auto* compress = app.add_subcommand("compress", "Compress one token tensor");
    compress->add_option("--input", compress_args.input, "Input .ktk1 tensor")->required();
    compress->add_option("--out", compress_args.out, "Output .ktk1 with the merged tokens (T=1, M=K)")->required();
    compress->add_option("--report", compress_args.report, "Report JSON path (default <out>.report.json)");
    compress->add_option("--gamma", compress_args.cfg.gamma, "Retention ratio in (0, 1]")->capture_default_str();
    compress->add_option("--alpha", compress_args.cfg.alpha, "Gaussian kernel bandwidth")->capture_default_str();
    add_threshold_flags(*compress, compress_args.cfg);
    compress->add_option("--mode", compress_args.mode, "Token selection mode")
        ->check(CLI::IsMember({"pivotal", "multinomial", "topk"}))
        ->capture_default_str();
    compress->add_option("--merge", compress_args.merge, "Merge mode")
        ->check(CLI::IsMember({"none", "uniform", "weighted"}))
        ->capture_default_str();
    compress->add_option("--seed", compress_args.cfg.seed, "Sampling seed")->capture_default_str();
    compress->add_option("--layout", compress_args.layout,
                         "Frame layout HxW with newline tokens (overrides the .meta.json sidecar)");
    compress->add_flag("--dump-diversity", compress_args.dump_diversity,
                       "Write <input>.diversity.ktk1 (2 x N float64: density, score)");
    compress->add_option("--dump-trace", compress_args.dump_trace, "Write the frame difference trace as CSV");

    CalibrateArgs calibrate_args;
    auto* calibrate = app.add_subcommand("calibrate", "Suggest boundary thresholds from a corpus of tensors");
    calibrate->add_option("--inputs", calibrate_args.inputs, "Directory of .ktk1 tensors")->required();
    calibrate->add_option("--percentile", calibrate_args.percentile, "Percentile of each signal")
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    calibrate->add_option("--margin", calibrate_args.margin, "Multiplier applied to each percentile")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    calibrate->add_option("--out", calibrate_args.out, "Write the suggestion JSON here instead of stdout");

    CostArgs cost_args;
    auto* cost = app.add_subcommand("cost", "Theoretical LLM FLOPs for n visual tokens");
    cost->add_option("--tokens", cost_args.tokens, "Number of visual tokens")->required();
    cost->add_option("--preset", cost_args.preset, "Backbone preset name")->capture_default_str();
    cost->add_option("--preset-dir", cost_args.preset_dir, "Directory of preset JSON files");

    GenArgs gen_args;
    auto& p = gen_args.params;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic multi-scene tensor with ground truth");
    gen->add_option("--scenes", p.scenes, "Number of scenes")->capture_default_str();
    gen->add_option("--frames-per-scene", p.frames_per_scene, "Frames per scene")->capture_default_str();
    gen->add_option("--tokens", p.tokens_per_frame, "Tokens per frame")->capture_default_str();
    gen->add_option("--dims", p.dims, "Embedding dimension")->capture_default_str();
    gen->add_option("--noise", p.noise_sigma, "Per-coordinate noise sigma")->capture_default_str();
    gen->add_option("--separation", p.separation, "Scene center spacing in noise-norm units")->capture_default_str();
    gen->add_option("--drift", p.drift, "Per-frame drift in noise-norm units")->capture_default_str();
    gen->add_option("--seed", p.seed, "Generator seed")->capture_default_str();
    gen->add_option("--layout-rows", gen_args.layout_rows, "Also write a layout sidecar with H rows");
    gen->add_option("--out", gen_args.out, "Output .ktk1 path")->required();

    TraceArgs trace_args;
    auto* trace = app.add_subcommand("dump-trace", "Write per-frame difference signals as CSV");
    trace->add_option("--input", trace_args.input, "Input .ktk1 tensor")->required();
    trace->add_option("--out", trace_args.out, "Output CSV path")->required();
    add_threshold_flags(*trace, trace_args.cfg);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e, out, err);
        err << app.help();
        return report_error(err, exit_usage, "usage", e.what());
    }

    try {
        if (*compress) do_compress(compress_args, out);
        else if (*calibrate) do_calibrate(calibrate_args, out);
        else if (*cost) do_cost(cost_args, out);
        else if (*gen) do_gen(gen_args, out);
        else if (*trace) do_trace(trace_args, out);
        return exit_ok;
    } catch (const Error& e) {
        return report_error(err, exit_code_for(e.kind()), to_string(e.kind()), e.what(), e.stage());
    } catch (const nlohmann::json::exception& e) {
        return report_error(err, exit_io, "format", e.what());
    } catch (const std::exception& e) {
        return report_error(err, exit_math, "internal", e.what());
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace kitoke::cli
