#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "restobench/degradation.hpp"
#include "restobench/error.hpp"
#include "restobench/parallel.hpp"
#include "restobench/png_io.hpp"

// Corpus preparation, clip persistence, and the videos.txt / prompt.txt
// manifest pair. A dataset is a directory of clip_NNNNNN subdirectories
// (frame_01.png .. frame_09.png + clip.json) plus the two manifest files.

namespace restobench {

struct PromptRecord {
    std::string clip_id;
    std::string text;
    std::string mode; // "uniform" | "adaptive"
};

struct ManifestEntry {
    std::string path; // clip directory, relative to the dataset root
    PromptRecord prompt;
    uint64_t clip_seed = 0;
    std::string source_id;
    int width = 0;
    int height = 0;
};

struct DatasetManifest {
    std::string root;
    TaskKind task = TaskKind::Resolution;
    std::vector<ManifestEntry> clips;
    uint64_t master_seed = 0; // not recoverable from disk; 0 after load
};

inline std::string default_uniform_prompt(TaskKind task) {
    switch (task) {
        case TaskKind::Resolution:
            return "The image becomes sharper and higher in resolution. Nothing moves. Static image.";
        case TaskKind::Blur:
            return "The image becomes sharp and free of motion blur. Nothing moves. Static image.";
        case TaskKind::LowLight:
            return "The image gradually brightens to normal lighting. Nothing moves. Static image.";
    }
    return "";
}

inline std::string clip_dir_name(size_t clip_index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "clip_%06zu", clip_index);
    return buf;
}

inline std::string frame_file_name(int t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%02d.png", t);
    return buf;
}

// Cover-and-crop fit: scale by max(target_w/w, target_h/h), then center crop
// to exactly the target. Images already at target size pass through
// bit-exactly; smaller images are upscaled by the same rule.
inline ImageBuffer prepare_source(const ImageBuffer& img, int target_w = kDefaultWidth,
                                  int target_h = kDefaultHeight) {
    const double scale = std::max(static_cast<double>(target_w) / img.width,
                                  static_cast<double>(target_h) / img.height);
    const int sw = std::max(target_w, static_cast<int>(std::lround(img.width * scale)));
    const int sh = std::max(target_h, static_cast<int>(std::lround(img.height * scale)));
    ImageBuffer scaled = resize(img, sw, sh);
    if (sw == target_w && sh == target_h) return scaled;

    const int ox = (sw - target_w) / 2;
    const int oy = (sh - target_h) / 2;
    ImageBuffer out(target_w, target_h);
    for (int y = 0; y < target_h; ++y) {
        const double* srow = scaled.row(y + oy) + static_cast<size_t>(ox) * 3;
        std::copy(srow, srow + static_cast<size_t>(target_w) * 3, out.row(y));
    }
    return out;
}

namespace detail {

inline nlohmann::ordered_json spec_params_json(const DegradationSpec& spec) {
    nlohmann::ordered_json params;
    switch (spec.task) {
        case TaskKind::Resolution:
            params["s1"] = spec.s1;
            params["s"] = spec.s;
            params["q"] = spec.q;
            break;
        case TaskKind::Blur:
            params["alpha"] = spec.alpha;
            params["k_max"] = spec.k_max;
            params["k"] = spec.k;
            break;
        case TaskKind::LowLight:
            params["n"] = spec.n;
            params["wb_u"] = spec.wb_u;
            params["s"] = spec.s;
            break;
    }
    return params;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary); // binary keeps LF line endings
    if (!out) fail(ErrorKind::Io, "cannot open for writing: " + path.string());
    out << content;
    if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

inline nlohmann::ordered_json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open: " + path.string());
    try {
        return nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Format, path.string() + ": " + e.what());
    }
}

} // namespace detail

// Writes one clip directory: nine frame PNGs streamed from the degradation
// pipeline plus clip.json. Returns the sampled spec.
inline DegradationSpec write_clip(const ImageBuffer& prepared, TaskKind task, uint64_t clip_seed,
                                  const std::string& clip_id, const std::string& source_id,
                                  const std::filesystem::path& clip_dir) {
    std::filesystem::create_directories(clip_dir);
    const DegradationSpec spec = render_clip(prepared, task, clip_seed, [&](int t, const ImageBuffer& frame) {
        write_png((clip_dir / frame_file_name(t)).string(), frame);
    });

    nlohmann::ordered_json meta;
    meta["clip_id"] = clip_id;
    meta["task"] = task_name(task);
    meta["clip_seed"] = clip_seed;
    meta["source_id"] = source_id;
    meta["fps"] = kDefaultFps;
    meta["width"] = prepared.width;
    meta["height"] = prepared.height;
    meta["params"] = detail::spec_params_json(spec);
    detail::write_text_file(clip_dir / "clip.json", meta.dump(2) + "\n");
    return spec;
}

// Writes videos.txt and prompt.txt for the manifest, index-aligned, LF-only.
inline void write_manifest(const DatasetManifest& manifest) {
    std::string videos, prompts;
    for (const ManifestEntry& e : manifest.clips) {
        videos += e.path;
        videos += '\n';
        prompts += e.prompt.text;
        prompts += '\n';
    }
    const std::filesystem::path root(manifest.root);
    detail::write_text_file(root / "videos.txt", videos);
    detail::write_text_file(root / "prompt.txt", prompts);
}

struct BuildConfig {
    std::string src_dir;
    std::string out_dir;
    TaskKind task = TaskKind::Resolution;
    uint64_t master_seed = 0;
    int clips_per_image = 2;
    int width = kDefaultWidth;
    int height = kDefaultHeight;
    std::string prompt_mode = "uniform"; // "uniform" | "file"
    std::string prompt_file;
    std::string uniform_text; // empty = task default
    int threads = 1;
};

// Renders the full dataset: every source image yields clips_per_image clips,
// clip_index = image_index * clips_per_image + j, each seeded independently
// via derive_stream(master_seed, clip_index). Output is a pure function of
// (sources, config); thread count only affects wall time.
inline DatasetManifest build_dataset(const BuildConfig& cfg) {
    namespace fs = std::filesystem;

    if (cfg.clips_per_image < 1)
        fail(ErrorKind::InvalidArgument, "clips-per-image must be >= 1");
    if (cfg.width < 1 || cfg.height < 1)
        fail(ErrorKind::InvalidArgument, "target dimensions must be >= 1");

    if (!fs::is_directory(cfg.src_dir))
        fail(ErrorKind::Io, "input directory not found: " + cfg.src_dir);
    std::vector<std::string> sources;
    for (const auto& entry : fs::directory_iterator(cfg.src_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == ".png") sources.push_back(entry.path().filename().string());
    }
    std::sort(sources.begin(), sources.end());
    if (sources.empty()) fail(ErrorKind::EmptyInput, "no PNG images in " + cfg.src_dir);

    const size_t clip_count = sources.size() * static_cast<size_t>(cfg.clips_per_image);

    std::vector<std::string> prompts(clip_count);
    if (cfg.prompt_mode == "uniform") {
        const std::string text =
            cfg.uniform_text.empty() ? default_uniform_prompt(cfg.task) : cfg.uniform_text;
        std::fill(prompts.begin(), prompts.end(), text);
    } else if (cfg.prompt_mode == "file") {
        if (cfg.prompt_file.empty())
            fail(ErrorKind::InvalidArgument, "prompt-mode file requires a prompt file path");
        const auto lines = detail::read_lines(cfg.prompt_file);
        if (lines.size() < clip_count)
            fail(ErrorKind::InvalidArgument, "prompt file has " + std::to_string(lines.size()) +
                                                 " lines, need " + std::to_string(clip_count));
        for (size_t i = 0; i < clip_count; ++i) {
            if (lines[i].empty())
                fail(ErrorKind::InvalidArgument,
                     "prompt file line " + std::to_string(i + 1) + " is empty");
            prompts[i] = lines[i];
        }
    } else {
        fail(ErrorKind::InvalidArgument, "prompt-mode must be uniform or file");
    }
    const std::string prompt_mode_name = cfg.prompt_mode == "uniform" ? "uniform" : "adaptive";

    fs::create_directories(cfg.out_dir);

    DatasetManifest manifest;
    manifest.root = cfg.out_dir;
    manifest.task = cfg.task;
    manifest.master_seed = cfg.master_seed;
    manifest.clips.resize(clip_count);

    parallel_for(sources.size(), cfg.threads, [&](size_t i) {
        const ImageBuffer raw = read_png((fs::path(cfg.src_dir) / sources[i]).string());
        const ImageBuffer prepared = prepare_source(raw, cfg.width, cfg.height);
        for (int j = 0; j < cfg.clips_per_image; ++j) {
            const size_t clip_index = i * cfg.clips_per_image + j;
            const std::string clip_id = clip_dir_name(clip_index);
            const uint64_t seed = derive_stream(cfg.master_seed, clip_index).state;
            write_clip(prepared, cfg.task, seed, clip_id, sources[i], fs::path(cfg.out_dir) / clip_id);

            ManifestEntry& entry = manifest.clips[clip_index];
            entry.path = clip_id;
            entry.prompt = PromptRecord{clip_id, prompts[clip_index], prompt_mode_name};
            entry.clip_seed = seed;
            entry.source_id = sources[i];
            entry.width = prepared.width;
            entry.height = prepared.height;
        }
    });

    write_manifest(manifest);
    return manifest;
}

// Loads a dataset manifest back from videos.txt / prompt.txt, pulling
// per-clip metadata out of each clip.json. Paths are normalized to forward
// slashes. The master seed is not persisted on disk and loads as 0.
inline DatasetManifest load_manifest(const std::string& root) {
    namespace fs = std::filesystem;

    const auto videos = detail::read_lines(fs::path(root) / "videos.txt");
    const auto prompts = detail::read_lines(fs::path(root) / "prompt.txt");
    if (videos.size() != prompts.size())
        fail(ErrorKind::Format, "videos.txt has " + std::to_string(videos.size()) +
                                    " lines but prompt.txt has " + std::to_string(prompts.size()));
    if (videos.empty()) fail(ErrorKind::EmptyInput, "videos.txt has no entries: " + root);

    DatasetManifest manifest;
    manifest.root = root;
    manifest.clips.reserve(videos.size());

    bool uniform = true;
    for (size_t i = 0; i < videos.size(); ++i) {
        std::string rel = videos[i];
        std::replace(rel.begin(), rel.end(), '\\', '/');
        const fs::path clip_dir = fs::path(root) / rel;
        if (!fs::is_directory(clip_dir))
            fail(ErrorKind::DanglingReference,
                 "videos.txt line " + std::to_string(i + 1) + " references missing clip: " + rel);
        const fs::path meta_path = clip_dir / "clip.json";
        if (!fs::is_regular_file(meta_path))
            fail(ErrorKind::DanglingReference, "clip has no clip.json: " + rel);
        const auto meta = detail::read_json_file(meta_path);

        ManifestEntry entry;
        entry.path = rel;
        entry.clip_seed = meta.value("clip_seed", static_cast<uint64_t>(0));
        entry.source_id = meta.value("source_id", std::string());
        entry.width = meta.value("width", 0);
        entry.height = meta.value("height", 0);
        entry.prompt = PromptRecord{meta.value("clip_id", rel), prompts[i], "uniform"};
        if (i == 0)
            manifest.task = task_from_name(meta.value("task", std::string("resolution")));
        if (i > 0 && prompts[i] != prompts[0]) uniform = false;
        manifest.clips.push_back(std::move(entry));
    }
    if (!uniform)
        for (ManifestEntry& e : manifest.clips) e.prompt.mode = "adaptive";
    return manifest;
}

} // namespace restobench
