#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "restobench/baselines.hpp"
#include "restobench/dataset.hpp"
#include "restobench/degradation.hpp"
#include "restobench/error.hpp"
#include "restobench/evaluation.hpp"
#include "restobench/metrics.hpp"
#include "restobench/parallel.hpp"

// Subcommand front end: build / oracle / eval / report / inspect. Exit codes:
// 0 success, 1 usage error, 2 data or I/O error, 3 external-metric error.
// Diagnostics go to stderr; machine-readable output goes to files (inspect,
// which exists to be read by a human, prints to stdout).

namespace restobench::cli {

namespace detail {

inline int default_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

inline int run_build(const BuildConfig& cfg) {
    const DatasetManifest manifest = build_dataset(cfg);
    std::cerr << "wrote " << manifest.clips.size() << " clips to " << manifest.root << "\n";
    return 0;
}

inline int run_oracle(const std::string& dataset, const std::string& kind_name,
                      const std::string& out, int threads) {
    namespace fs = std::filesystem;
    const TrajectoryKind kind = trajectory_kind_from_name(kind_name);
    const DatasetManifest manifest = load_manifest(dataset);
    fs::create_directories(out);

    parallel_for(manifest.clips.size(), threads, [&](size_t i) {
        const ManifestEntry& entry = manifest.clips[i];
        const fs::path clip_dir = fs::path(dataset) / entry.path;
        const std::string clip_id = fs::path(entry.path).filename().string();
        const ImageBuffer degraded = read_png((clip_dir / frame_file_name(1)).string());

        std::vector<ImageBuffer> frames;
        switch (kind) {
            case TrajectoryKind::Interp: {
                const ImageBuffer clean = read_png((clip_dir / frame_file_name(kFrameCount)).string());
                frames = interp_oracle(degraded, clean);
                break;
            }
            case TrajectoryKind::Unsharp:
            case TrajectoryKind::ExposureLift:
                frames = classical_trajectory(degraded, kind);
                break;
            case TrajectoryKind::RLDeconv: {
                const auto meta = restobench::detail::read_json_file(clip_dir / "clip.json");
                if (meta.value("task", std::string()) != "blur")
                    fail(ErrorKind::InvalidArgument,
                         clip_id + ": rl oracle needs a blur dataset (kernel metadata)");
                const auto& params = meta.at("params");
                const int k1 = params.at("k").at(0).get<int>();
                const double alpha = params.at("alpha").get<double>();
                const Kernel2D kernel =
                    k1 <= 1 ? Kernel2D() : motion_kernel(k1, alpha);
                frames = rl_deconv_trajectory(degraded, kernel);
                break;
            }
        }
        write_trajectory(out, clip_id, frames);
    });
    std::cerr << "wrote " << manifest.clips.size() << " trajectories to " << out << "\n";
    return 0;
}

struct EvalOptions {
    std::string dataset;
    std::string trajectories;
    std::string metrics = "psnr,ssim";
    std::string external_cmd;
    std::string external_csv;
    std::string out;
    std::string summary;
    int threads = 1;
};

inline MetricConfig parse_metric_list(const std::string& list) {
    MetricConfig config;
    config.use_psnr = config.use_ssim = false;
    std::stringstream ss(list);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token == "psnr") config.use_psnr = true;
        else if (token == "ssim") config.use_ssim = true;
        else if (token == "external") config.use_external = true;
        else fail(ErrorKind::InvalidArgument, "unknown metric '" + token + "' (psnr|ssim|external)");
    }
    if (!config.use_psnr && !config.use_ssim && !config.use_external)
        fail(ErrorKind::InvalidArgument, "metric list is empty");
    return config;
}

inline int run_eval(const EvalOptions& opt) {
    namespace fs = std::filesystem;
    const MetricConfig config = parse_metric_list(opt.metrics);

    ExternalMetricSource ext;
    if (config.use_external) {
        if (!opt.external_csv.empty())
            ext = load_external_csv(opt.external_csv);
        else if (!opt.external_cmd.empty())
            ext.command = opt.external_cmd;
        else
            fail(ErrorKind::InvalidArgument,
                 "external metric requested: pass --external-cmd or --external-csv");
    }

    const DatasetManifest manifest = load_manifest(opt.dataset);
    const TrajectoryProvider provider = import_trajectories(opt.trajectories, manifest);

    std::vector<FrameCurve> curves(manifest.clips.size());
    parallel_for(manifest.clips.size(), opt.threads, [&](size_t i) {
        const ManifestEntry& entry = manifest.clips[i];
        const std::string clip_id = fs::path(entry.path).filename().string();
        const std::string clean_path =
            (fs::path(opt.dataset) / entry.path / frame_file_name(kFrameCount)).string();
        const ImageBuffer clean = read_png(clean_path);

        std::function<double(int)> external_at;
        if (config.use_external) {
            if (ext.csv_mode)
                external_at = [&ext, clip_id](int t) { return lookup_external(ext, clip_id, t); };
            else
                external_at = [&ext, &provider, clean_path, clip_id](int t) {
                    return run_external_command(ext.command, clean_path,
                                                provider.frame_path(clip_id, t));
                };
        }
        curves[i] = evaluate_trajectory(
            clip_id, clean, [&](int t) { return provider.frame(clip_id, t); }, config, external_at);
    });

    write_report_csv(opt.out, curves);
    if (!opt.summary.empty()) write_summary_json(opt.summary, summarize(curves));
    std::cerr << "evaluated " << curves.size() << " clips -> " << opt.out << "\n";
    return 0;
}

inline int run_report(const std::string& csv, const std::string& out) {
    write_summary_json(out, summarize(read_report_csv(csv)));
    return 0;
}

inline int run_inspect(const std::string& clip) {
    namespace fs = std::filesystem;
    fs::path meta_path = fs::path(clip);
    if (fs::is_directory(meta_path)) meta_path /= "clip.json";
    if (!fs::is_regular_file(meta_path))
        fail(ErrorKind::Io, "no clip.json at " + meta_path.string());
    std::cout << restobench::detail::read_json_file(meta_path).dump(2) << "\n";
    return 0;
}

} // namespace detail

inline int run(std::vector<std::string> args) {
    CLI::App app{"Progressive degradation dataset builder and trajectory evaluator"};
    app.require_subcommand(1);

    // build
    BuildConfig build_cfg;
    build_cfg.threads = detail::default_threads();
    std::string build_task;
    auto* build = app.add_subcommand("build", "Synthesize a degradation dataset");
    build->add_option("--task", build_task, "resolution|blur|low_light")->required();
    build->add_option("--input", build_cfg.src_dir, "directory of source PNGs")->required();
    build->add_option("--out", build_cfg.out_dir, "output dataset directory")->required();
    build->add_option("--seed", build_cfg.master_seed, "master seed (default 0)");
    build->add_option("--clips-per-image", build_cfg.clips_per_image, "clips per source image (default 2)");
    build->add_option("--width", build_cfg.width, "target width (default 1360)");
    build->add_option("--height", build_cfg.height, "target height (default 768)");
    build->add_option("--prompt-mode", build_cfg.prompt_mode, "uniform|file (default uniform)");
    build->add_option("--prompt-file", build_cfg.prompt_file, "one prompt per line, clip order");
    build->add_option("--uniform-text", build_cfg.uniform_text, "override the uniform prompt");
    build->add_option("--threads", build_cfg.threads, "worker threads");

    // oracle
    std::string oracle_dataset, oracle_kind, oracle_out;
    int oracle_threads = detail::default_threads();
    auto* oracle = app.add_subcommand("oracle", "Generate baseline trajectories for a dataset");
    oracle->add_option("--dataset", oracle_dataset, "dataset root")->required();
    oracle->add_option("--kind", oracle_kind, "interp|unsharp|exposure|rl")->required();
    oracle->add_option("--out", oracle_out, "trajectory output directory")->required();
    oracle->add_option("--threads", oracle_threads, "worker threads");

    // eval
    detail::EvalOptions eval_opt;
    eval_opt.threads = detail::default_threads();
    auto* eval = app.add_subcommand("eval", "Evaluate trajectories against a dataset");
    eval->add_option("--dataset", eval_opt.dataset, "dataset root")->required();
    eval->add_option("--trajectories", eval_opt.trajectories, "trajectory directory")->required();
    eval->add_option("--metrics", eval_opt.metrics, "comma list: psnr,ssim,external (default psnr,ssim)");
    eval->add_option("--external-cmd", eval_opt.external_cmd, "external metric command prefix");
    eval->add_option("--external-csv", eval_opt.external_csv, "external metric CSV (clip_id,frame,value)");
    eval->add_option("--out", eval_opt.out, "report CSV path")->required();
    eval->add_option("--summary", eval_opt.summary, "summary JSON path");
    eval->add_option("--threads", eval_opt.threads, "worker threads");

    // report
    std::string report_csv, report_out;
    auto* report = app.add_subcommand("report", "Re-aggregate an existing report CSV");
    report->add_option("--csv", report_csv, "report CSV path")->required();
    report->add_option("--out", report_out, "summary JSON path")->required();

    // inspect
    std::string inspect_clip;
    auto* inspect = app.add_subcommand("inspect", "Print a clip's metadata");
    inspect->add_option("--clip", inspect_clip, "clip directory or clip.json path")->required();

    try {
        std::reverse(args.begin(), args.end()); // CLI11's vector overload wants reversed argv
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (build->parsed()) {
            build_cfg.task = task_from_name(build_task);
            if (build_cfg.prompt_mode != "uniform" && build_cfg.prompt_mode != "file")
                fail(ErrorKind::InvalidArgument, "prompt-mode must be uniform or file");
            return detail::run_build(build_cfg);
        }
        if (oracle->parsed()) return detail::run_oracle(oracle_dataset, oracle_kind, oracle_out, oracle_threads);
        if (eval->parsed()) return detail::run_eval(eval_opt);
        if (report->parsed()) return detail::run_report(report_csv, report_out);
        if (inspect->parsed()) return detail::run_inspect(inspect_clip);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << error_kind_name(e.kind()) << ": " << e.what() << "\n";
        return e.kind() == ErrorKind::ExternalMetric ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace restobench::cli
